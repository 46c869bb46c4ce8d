#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "affqetu/estimators.hpp"

using namespace aff;

namespace {

const TFIMParams kSix{6, 1.0, 1.0};

const HermitianOperator& six_site() {
    static const HermitianOperator h = build_tfim(kSix);
    return h;
}

} // namespace

TEST_CASE("direct measurement on product states") {
    // |0...0>: every bond correlator is 1, every field term averages to 0
    const CVector zeros = basis_state(6, 0);
    REQUIRE(dem_energy_exact(zeros, kSix) == Catch::Approx(-6.0));
    const double sampled =
        dem_energy(zeros, kSix, ShotBudget{20000, 3}, NoiseModel::none());
    REQUIRE(sampled == Catch::Approx(-6.0).margin(0.1));

    // |+>^6: bonds average to 0, every field term is 1
    CVector plus = CVector::Constant(64, Complex(1.0 / 8.0, 0.0));
    REQUIRE(dem_energy_exact(plus, kSix) == Catch::Approx(-6.0));
    const double sampled_plus =
        dem_energy(plus, kSix, ShotBudget{20000, 4}, NoiseModel::none());
    REQUIRE(sampled_plus == Catch::Approx(-6.0).margin(0.1));
}

TEST_CASE("direct measurement on the exact ground state") {
    const auto& d = six_site().decomposition();
    const CVector ground = d.eigenvectors.col(0);
    REQUIRE(dem_energy_exact(ground, kSix) ==
            Catch::Approx(d.eigenvalues(0)).margin(1e-10));
    const double e =
        dem_energy(ground, kSix, ShotBudget{10000, 5}, NoiseModel::none());
    REQUIRE(e == Catch::Approx(d.eigenvalues(0)).margin(0.15));
}

TEST_CASE("direct measurement is unbiased over seeds") {
    const auto& d = six_site().decomposition();
    const CVector ground = d.eigenvectors.col(0);
    const double truth = d.eigenvalues(0);
    double mean = 0.0;
    const int runs = 60;
    for (int s = 0; s < runs; ++s) {
        mean += dem_energy(ground, kSix, ShotBudget{2000, std::uint64_t(s)},
                           NoiseModel::none());
    }
    mean /= runs;
    // single-run sigma ~0.1 at 2000 shots; the mean tightens by sqrt(runs)
    REQUIRE(mean == Catch::Approx(truth).margin(4.0 * 0.1 / std::sqrt(60.0)));
}

TEST_CASE("phase estimation recovers an eigenphase exactly") {
    // synthetic single-phase operator: H = diag(0.3) on one qubit pair
    CMatrix h = CMatrix::Zero(2, 2);
    h(0, 0) = 0.3;
    h(1, 1) = 2.1;
    const HermitianOperator op(h);
    const CVector psi = basis_state(1, 0);
    RPEConfig cfg;
    cfg.theta_prev = 0.25;
    cfg.depth = 5;
    cfg.shots = 0; // exact moments
    const TFIMParams dummy{2, 1.0, 1.0};
    REQUIRE(rpe_estimate(psi, op, dummy, cfg) ==
            Catch::Approx(0.3).margin(1e-12));
}

TEST_CASE("phase estimation error shrinks with depth") {
    const auto& d = six_site().decomposition();
    const CVector ground = d.eigenvectors.col(0);
    RPEConfig cfg;
    cfg.theta_prev = dem_energy_exact(ground, kSix);
    cfg.shots = 0;
    double prev_err = 1e9;
    for (int depth : {1, 3, 5, 8}) {
        cfg.depth = depth;
        const double est = rpe_estimate(ground, six_site(), kSix, cfg);
        const double err = std::abs(est - d.eigenvalues(0));
        REQUIRE(err <= prev_err + 1e-12);
        prev_err = err;
    }
    REQUIRE(prev_err < 1e-9);
}

TEST_CASE("phase estimation unwinds across branch cuts") {
    // the ground phase aliases mod 2*pi; the rough estimate anchors the branch
    const auto& d = six_site().decomposition();
    const CVector ground = d.eigenvectors.col(0);
    RPEConfig cfg;
    cfg.theta_prev = -7.5; // coarse, off by 0.23
    cfg.depth = 8;
    cfg.shots = 0;
    REQUIRE(rpe_estimate(ground, six_site(), kSix, cfg) ==
            Catch::Approx(d.eigenvalues(0)).margin(1e-10));
}

TEST_CASE("phase estimation with sampled moments stays tight") {
    const auto& d = six_site().decomposition();
    const CVector ground = d.eigenvectors.col(0);
    RPEConfig cfg;
    cfg.theta_prev = dem_energy_exact(ground, kSix);
    cfg.depth = 8;
    cfg.shots = 10000;
    cfg.seed = 11;
    const double est = rpe_estimate(ground, six_site(), kSix, cfg);
    REQUIRE(est == Catch::Approx(d.eigenvalues(0)).margin(2e-3));
}

TEST_CASE("least-squares estimation recovers the ground energy") {
    const auto& d = six_site().decomposition();
    const CVector ground = d.eigenvectors.col(0);
    QCELSConfig cfg;
    cfg.lambda_lb = -10.0;
    cfg.lambda_ub = 10.0;
    cfg.stages = 9;
    cfg.samples = 5;
    cfg.tau = 0.2;
    cfg.shots = 0;
    const double est = qcels_estimate(ground, six_site(), kSix, cfg);
    REQUIRE(est == Catch::Approx(d.eigenvalues(0)).margin(1e-6));
}

TEST_CASE("two-point fit has the closed form") {
    // N = 2, single stage: theta* = -arg(Z1 conj(Z0)) / tau for exact moments
    CMatrix h = CMatrix::Zero(2, 2);
    h(0, 0) = -1.3;
    h(1, 1) = 0.9;
    const HermitianOperator op(h);
    const CVector psi = basis_state(1, 0);
    QCELSConfig cfg;
    cfg.lambda_lb = -2.0;
    cfg.lambda_ub = 2.0;
    cfg.stages = 1;
    cfg.samples = 2;
    cfg.tau = 0.2;
    cfg.shots = 0;
    const TFIMParams dummy{2, 1.0, 1.0};
    REQUIRE(qcels_estimate(psi, op, dummy, cfg) ==
            Catch::Approx(-1.3).margin(1e-8));
}

TEST_CASE("least-squares stage fit matches a dense scan oracle") {
    // random two-phase data: the stage optimum must match a brute-force scan
    RngStream rng(21);
    const double tau = 0.2;
    const int n = 5;
    std::vector<Complex> z(n);
    const double th_a = -3.1, th_b = -2.2;
    for (int k = 0; k < n; ++k) {
        z[std::size_t(k)] = 0.8 * std::exp(Complex(0, -th_a * k * tau)) +
                            0.2 * std::exp(Complex(0, -th_b * k * tau));
    }
    auto score = [&](double theta) {
        Complex r(0, 0);
        for (int k = 0; k < n; ++k) {
            r += z[std::size_t(k)] * std::exp(Complex(0, theta * k * tau));
        }
        return std::norm(r);
    };
    double best = -5.0, best_score = -1.0;
    for (double th = -5.0; th <= 0.0; th += 1e-4) {
        if (score(th) > best_score) {
            best_score = score(th);
            best = th;
        }
    }
    // feed the same data through the estimator with one stage
    CMatrix h = CMatrix::Zero(4, 4);
    h(0, 0) = th_a;
    h(1, 1) = th_b;
    const HermitianOperator op(h);
    CVector psi = CVector::Zero(4);
    psi(0) = std::sqrt(0.8);
    psi(1) = std::sqrt(0.2);
    QCELSConfig cfg;
    cfg.lambda_lb = -5.0;
    cfg.lambda_ub = 0.0;
    cfg.stages = 1;
    cfg.samples = n;
    cfg.tau = tau;
    cfg.shots = 0;
    const TFIMParams dummy{2, 1.0, 1.0};
    const double est = qcels_estimate(psi, op, dummy, cfg);
    REQUIRE(est == Catch::Approx(best).margin(2e-4));
}

TEST_CASE("least-squares estimation with sampled moments") {
    const auto& d = six_site().decomposition();
    const CVector ground = d.eigenvectors.col(0);
    QCELSConfig cfg;
    cfg.lambda_lb = -10.0;
    cfg.lambda_ub = 10.0;
    cfg.shots = 10000;
    cfg.seed = 13;
    const double est = qcels_estimate(ground, six_site(), kSix, cfg);
    REQUIRE(est == Catch::Approx(d.eigenvalues(0)).margin(2e-3));
}
