#include "affqetu/aff.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <mutex>
#include <numbers>

namespace aff {

void AFFConfig::validate() const {
    tfim.validate();
    if (stages < 1) throw BadParametersError("AFFConfig: stages must be >= 1");
    if (degree < 4 || degree % 2 != 0) {
        throw BadParametersError("AFFConfig: degree must be even and >= 4");
    }
    if (!(mu0 > 0.0) || !(mu0 < 1.0)) {
        throw BadParametersError("AFFConfig: mu0 must be in (0, 1)");
    }
    if (divisions.size() != std::size_t(stages)) {
        throw BadParametersError("AFFConfig: need one division per stage");
    }
    for (double m : divisions) {
        if (!(m >= 2.0)) {
            throw BadParametersError("AFFConfig: divisions must be >= 2");
        }
    }
    if (!(xi1 > 0.0) || !(xi2 > 0.0)) {
        throw BadParametersError("AFFConfig: thresholds must be positive");
    }
    bounds0.validate();
    noise.validate();
    if (mode == SimMode::Exact && !noise.is_zero()) {
        throw BadParametersError("AFFConfig: exact mode requires zero noise");
    }
}

std::vector<double> AFFConfig::default_divisions(int stages) {
    // a quarter first, a fifth next, halves afterwards; the early cuts take
    // small low-energy slices while the window is wide, the late cuts bisect
    std::vector<double> m(std::size_t(stages), 2.0);
    if (stages >= 1) m[0] = 4.0;
    if (stages >= 2) m[1] = 5.0;
    return m;
}

namespace {

double ground_overlap(const CVector& state, const SpectralDecomposition& decomp) {
    double w = 0.0;
    const double lambda0 = decomp.eigenvalues(0);
    for (Eigen::Index j = 0; j < decomp.dim(); ++j) {
        if (decomp.eigenvalues(j) - lambda0 > kDegeneracyTol) break;
        w += std::norm(decomp.eigenvectors.col(j).dot(state));
    }
    return std::sqrt(w);
}

struct FilterOutcome {
    PostSelectionResult result;
    double time = 0.0; ///< physical evolution time of one filter circuit
};

FilterOutcome apply_filter(const AFFConfig& config, const CVector& state,
                           const HermitianOperator& ham,
                           const SpectrumBounds& bounds, const QSPPhases& phases,
                           std::uint64_t stage_seed) {
    FilterOutcome out;
    out.time = config.degree * std::numbers::pi / bounds.width();
    if (config.mode == SimMode::Exact) {
        const HermitianOperator h_t = linear_transform(ham, bounds);
        out.result = qetu_execute_exact(state, phases, h_t);
        return out;
    }
    const GateList cu = trotter_circuit(config.tfim, bounds, 1.0, true,
                                        config.tfim.sites,
                                        config.trotter_steps_per_unit);
    ShotBudget shots{config.shots_filter.total_shots, stage_seed};
    out.result = qetu_execute_sampled(state, phases, cu, config.noise, shots,
                                      config.threads);
    return out;
}

} // namespace

RunReport run_aff(const AFFConfig& config, const CVector& initial,
                  const HermitianOperator& ham, PhaseCache* cache) {
    config.validate();
    const auto& decomp = ham.decomposition();
    if (config.mode == SimMode::Exact) {
        // the first mapping must cover the full spectrum
        if (decomp.eigenvalues(0) < config.bounds0.lower ||
            decomp.eigenvalues(decomp.dim() - 1) > config.bounds0.upper) {
            throw BadParametersError(
                "run_aff: initial bounds do not enclose the spectrum");
        }
    }
    PhaseCache local_cache;
    PhaseCache& phases_for = cache ? *cache : local_cache;

    RunReport report;
    report.config = config;
    CVector state = initial;
    SpectrumBounds bounds = config.bounds0;
    double mu = config.mu0;
    std::vector<double> circuit_times;
    double prev_overlap = ground_overlap(state, decomp);

    StepPolynomial stage0_poly;
    QSPPhases stage0_phases;

    for (int i = 0; i < config.stages; ++i) {
        StageReport stage;
        stage.index = i;
        stage.bounds_in = bounds;
        stage.mu = mu;

        const double w = config.halfwidth_override > 0.0
                             ? config.halfwidth_override
                             : default_halfwidth(mu);
        auto [poly, phases] = phases_for.obtain(config.degree, mu, w);
        if (i == 0) {
            stage0_poly = poly;
            stage0_phases = phases;
        }

        const std::uint64_t stage_seed =
            splitmix64(config.shots_filter.rng_seed ^
                       splitmix64(std::uint64_t(i) + 0x0f1))
            ^ splitmix64(config.seed);
        const FilterOutcome filtered =
            apply_filter(config, state, ham, bounds, phases, stage_seed);
        state = filtered.result.state;
        stage.success_probability = filtered.result.success_probability;
        stage.time_filter = filtered.time;
        circuit_times.push_back(filtered.time);

        stage.overlap_ground = ground_overlap(state, decomp);
        if (config.mode == SimMode::Exact &&
            stage.overlap_ground < 0.5 * prev_overlap) {
            throw OverfilteringError(
                "run_aff: ground overlap collapsed at stage " +
                std::to_string(i) + " (cutoff above the ground level?)");
        }
        if (config.mode == SimMode::Trotter &&
            stage.success_probability < 1e-4) {
            throw OverfilteringError(
                "run_aff: success probability collapsed at stage " +
                std::to_string(i));
        }
        prev_overlap = stage.overlap_ground;

        // profiling with threshold relaxation
        const std::uint64_t profile_seed =
            splitmix64(config.shots_profile.rng_seed ^
                       splitmix64(std::uint64_t(i) + 0x9e0))
            ^ splitmix64(config.seed + 1);
        ShotBudget profile_shots{config.shots_profile.total_shots, profile_seed};
        const SimMode profile_mode = config.mode;
        const MomentAcquisition acq = acquire_moments(
            state, ham, bounds, config.fourier_d, profile_shots, config.noise,
            profile_mode, &config.tfim, config.threads,
            config.trotter_steps_per_unit);
        const FourierCoefficients fc =
            fourier_coefficients(config.fourier_d, config.fourier_beta);
        CDFProfile profile = build_cdf(acq.moments, fc, config.grid_size);
        differentiate(profile);
        for (int k : acq.sampled_k) {
            circuit_times.push_back(2.0 * k / bounds.width());
        }
        stage.time_profile = acq.evolution_time;

        SpectrumBounds new_bounds;
        double xi2_eff = config.xi2;
        int attempt = 0;
        for (;; ++attempt) {
            try {
                new_bounds = extract_bounds(profile, config.xi1, xi2_eff, bounds);
                break;
            } catch (const NoQualifyingIntervalError&) {
                if (attempt >= 3) {
                    throw ProfilingFailedError(
                        "run_aff: profiling found no interval at stage " +
                        std::to_string(i) + " after 3 threshold relaxations");
                }
                xi2_eff *= 2.0;
                std::clog << "run_aff: stage " << i
                          << " relaxing second-derivative threshold to "
                          << xi2_eff << "\n";
            }
        }
        stage.relaxations = attempt;
        // The next stage assumes the window covers the surviving weight; the
        // curvature-tightened onset can sit above the lowest occupied level
        // once the reconstruction kernel is wider than the kept band, so pad
        // the lower edge by half a kernel width below the density peak.
        {
            const std::size_t peak = std::size_t(
                std::max_element(profile.d1.begin(), profile.d1.end()) -
                profile.d1.begin());
            const double lambda_peak =
                bounds.lower + bounds.width() * (profile.x[peak] + 1.0) / 2.0;
            const double kernel_sigma =
                (bounds.width() / 2.0) / std::sqrt(config.fourier_beta);
            new_bounds.lower =
                std::max(bounds.lower,
                         std::min(new_bounds.lower,
                                  lambda_peak - 0.25 * kernel_sigma));
        }
        stage.profiled = true;
        stage.profile = std::move(profile);
        stage.bounds_out = new_bounds;
        report.stages.push_back(std::move(stage));

        bounds = new_bounds;
        const auto tc = TransformCoefficients::from_bounds(bounds);
        const double m_i = config.divisions[std::size_t(i)];
        mu = std::cos(tc.c1 * (bounds.lower + bounds.width() / m_i) + tc.c2);
    }

    if (config.final_refilter) {
        StageReport stage;
        stage.index = config.stages;
        stage.bounds_in = config.bounds0;
        stage.bounds_out = bounds;
        stage.mu = config.mu0;
        const std::uint64_t seed =
            splitmix64(config.shots_filter.rng_seed ^ 0xfef1) ^
            splitmix64(config.seed);
        const FilterOutcome refiltered = apply_filter(
            config, state, ham, config.bounds0, stage0_phases, seed);
        state = refiltered.result.state;
        stage.success_probability = refiltered.result.success_probability;
        stage.time_filter = refiltered.time;
        stage.overlap_ground = ground_overlap(state, decomp);
        circuit_times.push_back(refiltered.time);
        report.stages.push_back(std::move(stage));
    }

    report.final_state = state;
    std::tie(report.t_max, report.t_total) = time_metrics(circuit_times);
    report.gamma =
        report.t_max * config.bounds0.width() /
        (config.degree * std::numbers::pi);
    try {
        const double amp = relative_amplification(initial, state, decomp);
        report.amplification_infinite = std::isinf(amp);
        report.relative_amplification = amp;
    } catch (const ZeroInitialOverlapError&) {
        report.amplification_defined = false;
        report.relative_amplification =
            std::numeric_limits<double>::quiet_NaN();
    }
    return report;
}

RunReport run_static(const AFFConfig& config, long repetitions,
                     const CVector& initial, const HermitianOperator& ham,
                     PhaseCache* cache) {
    config.validate();
    if (repetitions < 0) {
        throw BadParametersError("run_static: repetitions must be >= 0");
    }
    const auto& decomp = ham.decomposition();
    PhaseCache local_cache;
    PhaseCache& phases_for = cache ? *cache : local_cache;

    RunReport report;
    report.config = config;
    report.static_repetitions = repetitions;
    CVector state = initial;
    const double w = config.halfwidth_override > 0.0 ? config.halfwidth_override
                                                     : default_halfwidth(config.mu0);
    const double stage_time =
        config.degree * std::numbers::pi / config.bounds0.width();

    if (repetitions > 0) {
        auto [poly, phases] = phases_for.obtain(config.degree, config.mu0, w);
        (void)poly;
        double prev_overlap = ground_overlap(state, decomp);
        for (long r = 0; r < repetitions; ++r) {
            StageReport stage;
            stage.index = int(r);
            stage.bounds_in = config.bounds0;
            stage.bounds_out = config.bounds0;
            stage.mu = config.mu0;
            const std::uint64_t stage_seed =
                splitmix64(config.shots_filter.rng_seed ^
                           splitmix64(std::uint64_t(r) + 0x57a7)) ^
                splitmix64(config.seed);
            const FilterOutcome filtered = apply_filter(
                config, state, ham, config.bounds0, phases, stage_seed);
            state = filtered.result.state;
            stage.success_probability = filtered.result.success_probability;
            stage.time_filter = filtered.time;
            stage.overlap_ground = ground_overlap(state, decomp);
            if (config.mode == SimMode::Exact &&
                stage.overlap_ground < 0.5 * prev_overlap) {
                throw OverfilteringError(
                    "run_static: ground overlap collapsed at repetition " +
                    std::to_string(r));
            }
            prev_overlap = stage.overlap_ground;
            report.stages.push_back(std::move(stage));
        }
    }

    report.final_state = state;
    // the repetitions chain into a single circuit
    const double chained = double(repetitions) * stage_time;
    std::tie(report.t_max, report.t_total) =
        time_metrics(repetitions > 0 ? std::vector<double>{chained}
                                     : std::vector<double>{0.0});
    report.gamma = double(repetitions);
    try {
        const double amp = relative_amplification(initial, state, decomp);
        report.amplification_infinite = std::isinf(amp);
        report.relative_amplification = amp;
    } catch (const ZeroInitialOverlapError&) {
        report.amplification_defined = false;
        report.relative_amplification =
            std::numeric_limits<double>::quiet_NaN();
    }
    return report;
}

double relative_amplification(const CVector& initial, const CVector& final_state,
                              const SpectralDecomposition& decomp) {
    const double lambda0 = decomp.eigenvalues(0);
    double wi0 = 0.0, wf0 = 0.0, wi1 = 0.0, wf1 = 0.0;
    Eigen::Index j = 0;
    for (; j < decomp.dim(); ++j) {
        if (decomp.eigenvalues(j) - lambda0 > kDegeneracyTol) break;
        wi0 += std::norm(decomp.eigenvectors.col(j).dot(initial));
        wf0 += std::norm(decomp.eigenvectors.col(j).dot(final_state));
    }
    if (j >= decomp.dim()) {
        throw FullyDegenerateError("relative_amplification: single level");
    }
    const double lambda1 = decomp.eigenvalues(j);
    for (; j < decomp.dim(); ++j) {
        if (decomp.eigenvalues(j) - lambda1 > kDegeneracyTol) break;
        wi1 += std::norm(decomp.eigenvectors.col(j).dot(initial));
        wf1 += std::norm(decomp.eigenvectors.col(j).dot(final_state));
    }
    if (wi0 < 1e-14 || wi1 < 1e-14) {
        throw ZeroInitialOverlapError(
            "relative_amplification: initial state misses the ground or first "
            "excited subspace");
    }
    if (wf1 < 1e-14) {
        return std::numeric_limits<double>::infinity();
    }
    return std::sqrt((wf0 / wi0) / (wf1 / wi1));
}

std::pair<double, double> time_metrics(const std::vector<double>& circuit_times) {
    double t_max = 0.0, t_total = 0.0;
    for (double t : circuit_times) {
        t_max = std::max(t_max, t);
        t_total += t;
    }
    return {t_max, t_total};
}

double gamma_static_prediction(double a0, double delta_a, double eps) {
    if (!(delta_a > 0.0) || !(delta_a < a0) || !(a0 <= 1.0) || !(eps > 0.0) ||
        !(eps < 1.0)) {
        throw BadParametersError("gamma_static_prediction: need 0 < da < a0 <= 1 "
                                 "and eps in (0, 1)");
    }
    return (a0 / delta_a) * std::log(a0 / (delta_a * eps));
}

double stretch_relation(double gamma, double lt0, double lt1) {
    if (!(lt0 > 0.0) || !(lt1 > lt0)) {
        throw BadParametersError("stretch_relation: need 0 < lt0 < lt1");
    }
    static std::once_flag warned;
    if (gamma * lt1 >= std::numbers::pi) {
        std::call_once(warned, [] {
            std::clog << "stretch_relation: gamma beyond the monotone window "
                         "(gamma*lt1 >= pi); values wrap\n";
        });
    }
    return std::cos(gamma * lt0 / 2.0) - std::cos(gamma * lt1 / 2.0);
}

double gamma_aff_prediction(double a0, double delta_a, double eps) {
    if (!(delta_a > 0.0) || !(delta_a < a0) || !(a0 <= 1.0) || !(eps > 0.0) ||
        !(eps < 1.0)) {
        throw BadParametersError("gamma_aff_prediction: need 0 < da < a0 <= 1 "
                                 "and eps in (0, 1)");
    }
    return a0 / delta_a - eps;
}

long worst_case_stages(std::uint64_t n, double ell) {
    if (n < 2 || !(ell >= 2.0)) {
        throw BadParametersError("worst_case_stages: need N >= 2 and ell >= 2");
    }
    long m = 0;
    double p = 1.0;
    while (p < double(n) * (1.0 - 1e-12)) {
        p *= ell;
        ++m;
    }
    return m;
}

} // namespace aff
