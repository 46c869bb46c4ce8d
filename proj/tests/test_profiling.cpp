#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "affqetu/profiling.hpp"

using namespace aff;

namespace {

/// Moments of a synthetic spectrum {(weight_j, x_j)} on (-1, 1).
std::vector<Complex> synthetic_moments(
    const std::vector<std::pair<double, double>>& spectrum, int d) {
    std::vector<Complex> m(std::size_t(d) + 1, Complex(0, 0));
    for (int k = 0; k <= d; ++k) {
        for (const auto& [w, x] : spectrum) {
            m[std::size_t(k)] += w * std::exp(Complex(0.0, -k * x));
        }
    }
    return m;
}

double exact_cdf(const std::vector<std::pair<double, double>>& spectrum,
                 double x) {
    double c = 0.0;
    for (const auto& [w, pos] : spectrum) {
        if (pos <= x) c += w;
    }
    return c;
}

} // namespace

TEST_CASE("modified bessel series against frozen references") {
    REQUIRE(bessel_i(0, 5.0) == Catch::Approx(27.239871823604453).epsilon(1e-12));
    REQUIRE(bessel_i(1, 5.0) == Catch::Approx(24.335642142450524).epsilon(1e-12));
    REQUIRE(bessel_i(2, 5.0) == Catch::Approx(17.505614966624236).epsilon(1e-12));
    REQUIRE(bessel_i(3, 5.0) == Catch::Approx(10.331150169151138).epsilon(1e-12));
    REQUIRE(bessel_i(3, 0.8) == Catch::Approx(1.110022102962393e-02).epsilon(1e-12));
    REQUIRE(bessel_i(-2, 5.0) == Catch::Approx(bessel_i(2, 5.0)));
    REQUIRE(bessel_i(0, 0.0) == Catch::Approx(1.0));
}

TEST_CASE("fourier coefficients structure") {
    const auto fc = fourier_coefficients(7, 5.0);
    REQUIRE(fc.at(0) == Complex(0.5, 0.0));
    REQUIRE(fc.at(2) == Complex(0.0, 0.0));
    REQUIRE(fc.at(4) == Complex(0.0, 0.0));
    REQUIRE(fc.at(6) == Complex(0.0, 0.0));
    // first odd coefficient: purely imaginary, negative imaginary part
    REQUIRE(fc.at(1).real() == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(fc.at(1).imag() == Catch::Approx(-0.31000323295528864).epsilon(1e-10));
    REQUIRE(std::abs(fc.at(3)) == Catch::Approx(0.08383128592936301).epsilon(1e-10));
    // truncation edge keeps a single kernel term
    REQUIRE(std::abs(fc.at(7)) == Catch::Approx(0.008871014574560982).epsilon(1e-10));
    // conjugate symmetry at every index
    for (int k = 1; k <= 7; ++k) {
        REQUIRE(fc.at(-k) == std::conj(fc.at(k)));
    }
    REQUIRE_THROWS_AS(fourier_coefficients(8, 5.0), BadParametersError);
    REQUIRE_THROWS_AS(fourier_coefficients(7, 0.05), BadParametersError);
}

TEST_CASE("profiling rescale endpoints") {
    const auto h = build_tfim({2, 1.0, 0.0}); // eigenvalues -1, -1, 1, 1
    const auto hr = rescale_for_profiling(h, SpectrumBounds{-1, 1});
    REQUIRE(hr.decomposition().eigenvalues(0) == Catch::Approx(-1.0));
    REQUIRE(hr.decomposition().eigenvalues(3) == Catch::Approx(1.0));

    const auto h6 = build_tfim({6, 1.0, 1.0});
    const auto hr6 = rescale_for_profiling(h6, SpectrumBounds{-10, 10});
    REQUIRE(hr6.ground_energy() == Catch::Approx(-0.77274).margin(2e-4));
    // midpoint of the window maps to zero
    const auto mid = rescale_for_profiling(
        HermitianOperator(CMatrix::Zero(2, 2)), SpectrumBounds{-10, 10});
    REQUIRE(mid.matrix()(0, 0).real() == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("single-level profile is a smoothed step at the level") {
    const auto fc = fourier_coefficients(7, 5.0);
    const auto moments = synthetic_moments({{1.0, 0.0}}, 7);
    for (const auto& m : moments) {
        REQUIRE(std::abs(m - Complex(1.0, 0.0)) < 1e-14); // eigenstate at 0
    }
    CDFProfile profile = build_cdf(moments, fc, 1001);
    REQUIRE(profile.max_imag_residual < 1e-12);
    auto value_at = [&](double x) {
        const auto idx = std::size_t(std::lround((x + 1.0) / 2.0 * 1000));
        return profile.cdf[idx];
    };
    REQUIRE(value_at(-0.9) <= 0.1);
    REQUIRE(value_at(0.9) >= 0.9);
    REQUIRE(value_at(0.0) == Catch::Approx(0.5).margin(0.05));

    differentiate(profile);
    // density peak within two grid cells of the level
    std::size_t peak = 0;
    for (std::size_t i = 0; i < profile.d1.size(); ++i) {
        if (profile.d1[i] > profile.d1[peak]) peak = i;
    }
    REQUIRE(std::abs(profile.x[peak] - 0.0) <= 2.0 * 0.002 + 1e-12);
}

TEST_CASE("two balanced levels cross one half between them") {
    const auto fc = fourier_coefficients(7, 5.0);
    const auto moments = synthetic_moments({{0.5, -0.5}, {0.5, 0.5}}, 7);
    CDFProfile profile = build_cdf(moments, fc, 1001);
    const double mid = profile.cdf[500]; // x = 0
    REQUIRE(mid == Catch::Approx(0.5).margin(0.02));
}

TEST_CASE("reconstruction tracks the exact cdf away from the levels") {
    const std::vector<std::pair<double, double>> spectrum = {
        {0.3, -0.6}, {0.5, -0.1}, {0.2, 0.55}};
    const double beta = 5.0;
    const auto fc = fourier_coefficients(7, beta);
    CDFProfile profile = build_cdf(synthetic_moments(spectrum, 7), fc, 1001);
    const double plateau_distance = 2.0 / std::sqrt(beta);
    for (std::size_t i = 0; i < profile.x.size(); ++i) {
        const double x = profile.x[i];
        bool plateau = true;
        for (const auto& [w, pos] : spectrum) {
            if (std::abs(x - pos) < plateau_distance) plateau = false;
        }
        if (!plateau) continue;
        REQUIRE(std::abs(profile.cdf[i] - exact_cdf(spectrum, x)) <= 0.1);
    }
}

TEST_CASE("derivatives of flat and linear profiles") {
    CDFProfile flat;
    const int g = 201;
    for (int i = 0; i < g; ++i) {
        flat.x.push_back(-1.0 + 2.0 * i / (g - 1));
        flat.cdf.push_back(0.7);
    }
    differentiate(flat);
    for (double v : flat.d1) REQUIRE(v == Catch::Approx(0.0).margin(1e-12));
    for (double v : flat.d2) REQUIRE(v == Catch::Approx(0.0).margin(1e-9));

    CDFProfile ramp;
    for (int i = 0; i < g; ++i) {
        const double x = -1.0 + 2.0 * i / (g - 1);
        ramp.x.push_back(x);
        ramp.cdf.push_back((x + 1.0) / 2.0);
    }
    differentiate(ramp);
    for (double v : ramp.d1) REQUIRE(v == Catch::Approx(0.5).margin(1e-9));
    for (double v : ramp.d2) REQUIRE(v == Catch::Approx(0.0).margin(1e-6));
}

TEST_CASE("central differences agree with the analytic derivative") {
    const auto fc = fourier_coefficients(7, 5.0);
    const auto moments = synthetic_moments({{0.6, -0.4}, {0.4, 0.3}}, 7);
    CDFProfile numeric = build_cdf(moments, fc, 1001);
    differentiate(numeric);
    CDFProfile analytic = build_cdf(moments, fc, 1001);
    differentiate_analytic(analytic, moments, fc);
    for (std::size_t i = 0; i < numeric.x.size(); ++i) {
        REQUIRE(numeric.d1[i] == Catch::Approx(analytic.d1[i]).margin(1e-3));
    }
}

TEST_CASE("extracted window contains an isolated level") {
    const auto fc = fourier_coefficients(7, 5.0);
    const SpectrumBounds bounds{-10.0, 10.0};
    const double lambda = -7.0;
    const double x0 = 2.0 * (lambda - bounds.lower) / bounds.width() - 1.0;
    CDFProfile profile = build_cdf(synthetic_moments({{1.0, x0}}, 7), fc, 1001);
    differentiate(profile);
    const auto out = extract_bounds(profile, 0.03, 0.02, bounds);
    REQUIRE(out.lower <= lambda);
    REQUIRE(out.upper >= lambda);
    // the window shrinks relative to the prior bounds
    REQUIRE(out.lower >= bounds.lower - 1e-12);
    REQUIRE(out.upper <= bounds.upper + 1e-12);
    REQUIRE(profile.bounds_x.has_value());
}

TEST_CASE("impossible thresholds raise no-qualifying-interval") {
    const auto fc = fourier_coefficients(7, 5.0);
    CDFProfile profile = build_cdf(synthetic_moments({{1.0, 0.0}}, 7), fc, 1001);
    differentiate(profile);
    REQUIRE_THROWS_AS(extract_bounds(profile, 1e6, 0.02, SpectrumBounds{-1, 1}),
                      NoQualifyingIntervalError);
}

TEST_CASE("csv serialization shape") {
    const auto fc = fourier_coefficients(3, 5.0);
    CDFProfile profile = build_cdf(synthetic_moments({{1.0, 0.0}}, 3), fc, 101);
    differentiate(profile);
    std::ostringstream out;
    write_cdf_csv(profile, out);
    const std::string text = out.str();
    REQUIRE(text.rfind("x,C,C1,C2\n", 0) == 0);
    REQUIRE(std::count(text.begin(), text.end(), '\n') == 102);
}

TEST_CASE("moment acquisition touches only the odd indices") {
    RngStream rng(41);
    const TFIMParams params{3, 1.0, 1.0};
    const auto h = build_tfim(params);
    const CVector psi = haar_random_state(8, rng);
    const auto bounds = default_bounds(params);
    const auto acq = acquire_moments(psi, h, bounds, 7, ShotBudget{0, 0},
                                     NoiseModel::none(), SimMode::Exact);
    REQUIRE(acq.sampled_k == std::vector<int>{1, 3, 5, 7});
    REQUIRE(acq.moments[0] == Complex(1.0, 0.0));
    REQUIRE(acq.moments[2] == Complex(0.0, 0.0));
    // exact moments match the rescaled spectral oracle
    const auto hr = rescale_for_profiling(h, bounds);
    for (int k : {1, 3, 5, 7}) {
        const Complex expected = moment_exact(psi, hr, double(k));
        REQUIRE(std::abs(acq.moments[std::size_t(k)] - expected) < 1e-12);
    }
    // bookkeeping: each moment contributes 2k/width of physical time
    double expected_time = 0.0;
    for (int k : {1, 3, 5, 7}) expected_time += 2.0 * k / bounds.width();
    REQUIRE(acq.evolution_time == Catch::Approx(expected_time));
}

TEST_CASE("shot-sampled profile still finds an isolated level") {
    const TFIMParams params{4, 1.0, 1.0};
    const auto h = build_tfim(params);
    const auto& d = h.decomposition();
    const CVector ground = d.eigenvectors.col(0);
    const SpectrumBounds bounds = default_bounds(params);
    const auto acq = acquire_moments(ground, h, bounds, 7, ShotBudget{1000, 5},
                                     NoiseModel::none(), SimMode::Exact);
    const auto fc = fourier_coefficients(7, 5.0);
    CDFProfile profile = build_cdf(acq.moments, fc, 1001);
    differentiate(profile);
    SpectrumBounds out{0, 0};
    double xi2 = 0.02;
    for (int attempt = 0; attempt < 4; ++attempt) {
        try {
            out = extract_bounds(profile, 0.03, xi2, bounds);
            break;
        } catch (const NoQualifyingIntervalError&) {
            xi2 *= 2.0;
        }
    }
    // under shot noise the window may land a few grid cells off the level
    const double cell = bounds.width() / 1000.0;
    REQUIRE(out.lower <= d.eigenvalues(0) + 3.0 * cell);
    REQUIRE(out.upper >= d.eigenvalues(0) - 3.0 * cell);
}
