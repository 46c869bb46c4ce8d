#pragma once

#include <string>
#include <vector>

#include "affqetu/phase_cache.hpp"
#include "affqetu/profiling.hpp"

// Adaptive finer filtering: interleave the post-selected filter with spectrum
// profiling, shrinking the bounds and recomputing the cutoff every stage;
// plus the static-repetition baseline and the closed-form depth predictions.

namespace aff {

struct AFFConfig {
    TFIMParams tfim;
    int stages = 3;                  ///< M
    int degree = 14;                 ///< eta, even
    double mu0 = 0.95;               ///< first cutoff
    std::vector<double> divisions;   ///< m_i, length M, each >= 2
    double xi1 = 0.03;
    double xi2 = 0.02;
    int fourier_d = 7;
    double fourier_beta = 5.0;
    SpectrumBounds bounds0;          ///< default: operator-norm window
    NoiseModel noise;
    ShotBudget shots_filter{10000, 0};
    ShotBudget shots_profile{1000, 0}; ///< per Hadamard estimate
    SimMode mode = SimMode::Exact;
    std::uint64_t seed = 1;
    bool final_refilter = false;
    double halfwidth_override = 0.0; ///< 0: derive from the cutoff
    int grid_size = 1001;
    int threads = 1;
    /// Strang steps per unit physical time for the trotterized filter and
    /// profiling circuits. 1 reproduces the one-step-per-unit splitting
    /// rule; the stretched late stages need finer steps for the filter
    /// cutoff to stay coherent.
    int trotter_steps_per_unit = 1;

    void validate() const;
    /// m_i defaults: {4, 5, 2, 2, ...} — small low-energy slices while the
    /// window is wide, bisection once it is tight.
    static std::vector<double> default_divisions(int stages);
};

struct StageReport {
    int index = 0;
    SpectrumBounds bounds_in;
    SpectrumBounds bounds_out;
    double mu = 0.0;
    double success_probability = 0.0;
    double overlap_ground = 0.0;  ///< diagnostic |<psi_0|state>|
    double time_filter = 0.0;     ///< evolution time of the filter circuit
    double time_profile = 0.0;    ///< summed moment evolution times
    int relaxations = 0;
    bool profiled = false;
    CDFProfile profile;
};

struct EstimateRecord {
    std::string method;
    double value = 0.0;
    long shots = 0;
    double t_max_contribution = 0.0;
};

struct RunReport {
    AFFConfig config;
    std::vector<StageReport> stages;
    CVector final_state;
    double t_max = 0.0;
    double t_total = 0.0;
    double gamma = 0.0;
    double relative_amplification = 0.0;
    bool amplification_infinite = false;
    bool amplification_defined = true; ///< false when the input misses a subspace
    long static_repetitions = 0;       ///< 0 for adaptive runs
    std::vector<EstimateRecord> estimates;
};

/// The adaptive loop: M rounds of filter + profile, with the cutoff division
/// rule mu <- cos(c1*(lower + width/m_i) + c2) after each profiling pass.
/// Profiling retries with doubled xi2 (at most 3 times) when no interval
/// qualifies.
RunReport run_aff(const AFFConfig& config, const CVector& initial,
                  const HermitianOperator& ham, PhaseCache* cache = nullptr);

/// Repeat the first filter `repetitions` times with fixed bounds and cutoff.
/// The repetitions chain into one circuit (nothing is measured in between),
/// so T_max grows linearly with the count.
RunReport run_static(const AFFConfig& config, long repetitions,
                     const CVector& initial, const HermitianOperator& ham,
                     PhaseCache* cache = nullptr);

/// Ratio-of-ratios of ground and first-excited subspace weights between two
/// states; +inf when the final first-excited weight underflows (1e-14).
double relative_amplification(const CVector& initial, const CVector& final_state,
                              const SpectralDecomposition& decomp);

/// max / sum of per-circuit evolution times.
std::pair<double, double> time_metrics(const std::vector<double>& circuit_times);

/// Repetition count (a0/da) * ln(a0 / (da * eps)) reaching relative
/// amplification a0/(da*eps) with a fixed filter.
double gamma_static_prediction(double a0, double delta_a, double eps);

/// Stretched-gap relation cos(gamma*lt0/2) - cos(gamma*lt1/2).
double stretch_relation(double gamma, double lt0, double lt1);

/// Cosine-space stretch a0/da - eps achieving the same amplification in one
/// stretched stage.
double gamma_aff_prediction(double a0, double delta_a, double eps);

/// ceil(log_ell(N)) filter stages in the worst case.
long worst_case_stages(std::uint64_t n, double ell);

} // namespace aff
