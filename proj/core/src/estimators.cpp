#include "affqetu/estimators.hpp"

#include <cmath>
#include <numbers>

namespace aff {

namespace {

double wrap_to_pi(double x) {
    const double two_pi = 2.0 * std::numbers::pi;
    return x - two_pi * std::round(x / two_pi);
}

std::uint64_t sample_index(const CVector& state, RngStream& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    const Eigen::Index dim = state.size();
    for (Eigen::Index i = 0; i < dim; ++i) {
        acc += std::norm(state(i));
        if (u < acc) return std::uint64_t(i);
    }
    return std::uint64_t(dim - 1);
}

int bit_sign(std::uint64_t s, int j) { return ((s >> j) & 1) ? -1 : 1; }

} // namespace

double dem_energy_exact(const CVector& state, const TFIMParams& params) {
    params.validate();
    const int L = params.sites;
    const int bonds = (L >= 3) ? L : 1;
    double zz = 0.0;
    for (Eigen::Index s = 0; s < state.size(); ++s) {
        const double p = std::norm(state(s));
        for (int b = 0; b < bonds; ++b) {
            zz += p * bit_sign(std::uint64_t(s), b) *
                  bit_sign(std::uint64_t(s), (b + 1) % L);
        }
    }
    double x = 0.0;
    for (int j = 0; j < L; ++j) {
        Complex overlap(0.0, 0.0);
        for (Eigen::Index s = 0; s < state.size(); ++s) {
            overlap += std::conj(state(s)) * state(s ^ (Eigen::Index(1) << j));
        }
        x += overlap.real();
    }
    return -params.coupling * zz - params.field * x;
}

double dem_energy(const CVector& state, const TFIMParams& params,
                  const ShotBudget& shots, const NoiseModel& noise) {
    params.validate();
    noise.validate();
    if (shots.total_shots == 0) return dem_energy_exact(state, params);
    const int L = params.sites;
    const int bonds = (L >= 3) ? L : 1;
    const long z_shots = shots.total_shots / 2;
    const long x_shots = shots.total_shots - z_shots;
    RngStream base(shots.rng_seed);

    std::vector<double> bond_mean(std::size_t(bonds), 0.0);
    {
        RngStream rng = base.split(0);
        for (long s = 0; s < z_shots; ++s) {
            const std::uint64_t idx = sample_index(state, rng);
            for (int b = 0; b < bonds; ++b) {
                bond_mean[std::size_t(b)] +=
                    bit_sign(idx, b) * bit_sign(idx, (b + 1) % L);
            }
        }
        for (auto& m : bond_mean) m /= double(z_shots);
    }

    std::vector<double> site_mean(std::size_t(L), 0.0);
    {
        GateList basis_change;
        basis_change.qubits = L;
        for (int j = 0; j < L; ++j) basis_change.add(hadamard_matrix(), j);
        if (noise.is_zero()) {
            CVector rotated = state;
            apply_circuit(rotated, basis_change);
            RngStream rng = base.split(1);
            for (long s = 0; s < x_shots; ++s) {
                const std::uint64_t idx = sample_index(rotated, rng);
                for (int j = 0; j < L; ++j) {
                    site_mean[std::size_t(j)] += bit_sign(idx, j);
                }
            }
        } else {
            for (long s = 0; s < x_shots; ++s) {
                RngStream rng = base.split(std::uint64_t(2 + s));
                CVector rotated = state;
                apply_noisy(rotated, basis_change, noise, rng);
                const std::uint64_t idx = sample_index(rotated, rng);
                for (int j = 0; j < L; ++j) {
                    site_mean[std::size_t(j)] += bit_sign(idx, j);
                }
            }
        }
        for (auto& m : site_mean) m /= double(x_shots);
    }

    double e = 0.0;
    for (double m : bond_mean) e -= params.coupling * m;
    for (double m : site_mean) e -= params.field * m;
    return e;
}

namespace {

Complex acquire_phase_moment(const CVector& state, const HermitianOperator& h,
                             const TFIMParams& params, double t, long shots,
                             const NoiseModel& noise, SimMode mode,
                             std::uint64_t seed, int threads,
                             int steps_per_unit) {
    ShotBudget budget{shots, seed};
    if (mode == SimMode::Exact) {
        return estimate_moment(state, h, t, budget, noise, mode, nullptr,
                               threads);
    }
    RepeatedEvolution evo;
    if (t > 0.0) {
        evo = repeated_evolution(params, 1.0, 0.0, t, steps_per_unit);
    } else {
        evo.qubits = params.sites + 1; // t = 0: empty evolution block
    }
    return estimate_moment_repeated(state, evo, budget, noise, threads);
}

} // namespace

double rpe_estimate(const CVector& state, const HermitianOperator& h,
                    const TFIMParams& params, const RPEConfig& config) {
    if (config.depth < 1) {
        throw BadParametersError("rpe_estimate: depth must be >= 1");
    }
    config.noise.validate();
    RngStream base(config.seed);
    double theta = config.theta_prev;
    for (int j = 0; j < config.depth; ++j) {
        const double t = std::ldexp(1.0, j); // 2^j
        const Complex m = acquire_phase_moment(
            state, h, params, t, config.shots / 2, config.noise, config.mode,
            base.split(std::uint64_t(j)).root_seed(), config.threads,
            config.steps_per_unit);
        const Complex z = std::conj(m); // <psi| e^{+i t H} |psi>
        // lattice point (2k*pi + arg z)/t nearest to theta in wrap distance
        theta += wrap_to_pi(std::arg(z) - t * theta) / t;
    }
    return theta;
}

namespace {

struct StageFit {
    double theta;
};

/// Residual minimization reduces to maximizing |r*(theta)| with
/// r*(theta) = (1/N) sum_n Z_n exp(+i theta n tau).
double fit_score(const std::vector<Complex>& z, double theta, double tau) {
    Complex r(0.0, 0.0);
    for (std::size_t n = 0; n < z.size(); ++n) {
        r += z[n] * std::exp(Complex(0.0, theta * double(n) * tau));
    }
    return std::norm(r);
}

StageFit fit_stage(const std::vector<Complex>& z, double tau, double lb,
                   double ub) {
    const int grid = 200;
    double best_theta = lb;
    double best = -1.0;
    for (int i = 0; i <= grid; ++i) {
        const double theta = lb + (ub - lb) * double(i) / grid;
        const double score = fit_score(z, theta, tau);
        if (score > best) {
            best = score;
            best_theta = theta;
        }
    }
    // golden-section refinement around the best grid cell
    const double cell = (ub - lb) / grid;
    double a = std::max(lb, best_theta - cell);
    double b = std::min(ub, best_theta + cell);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = fit_score(z, c, tau);
    double fd = fit_score(z, d, tau);
    const double tol = 1e-10 / tau;
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = fit_score(z, c, tau);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = fit_score(z, d, tau);
        }
    }
    return StageFit{(a + b) / 2.0};
}

} // namespace

double qcels_estimate(const CVector& state, const HermitianOperator& h,
                      const TFIMParams& params, const QCELSConfig& config) {
    if (config.stages < 1 || config.samples < 2 || !(config.tau > 0.0)) {
        throw BadParametersError("qcels_estimate: bad stage parameters");
    }
    if (!(config.lambda_lb < config.lambda_ub)) {
        throw BadParametersError("qcels_estimate: bad search bounds");
    }
    config.noise.validate();
    RngStream base(config.seed);
    double lb = config.lambda_lb;
    double ub = config.lambda_ub;
    double theta = 0.5 * (lb + ub);
    for (int j = 0; j < config.stages; ++j) {
        const double tau_j = config.tau * std::ldexp(1.0, j);
        std::vector<Complex> z(std::size_t(config.samples));
        for (int n = 0; n < config.samples; ++n) {
            z[std::size_t(n)] = acquire_phase_moment(
                state, h, params, double(n) * tau_j, config.shots / 2,
                config.noise, config.mode,
                base.split(std::uint64_t(j) * 97 + std::uint64_t(n)).root_seed(),
                config.threads, config.steps_per_unit);
        }
        theta = fit_stage(z, tau_j, lb, ub).theta;
        lb = theta - std::numbers::pi / (2.0 * tau_j);
        ub = theta + std::numbers::pi / (2.0 * tau_j);
    }
    return theta;
}

} // namespace aff
