#pragma once

#include "affqetu/qetu.hpp"

// Ground-state energy estimators operating on a prepared state and the
// untransformed Hamiltonian (energies in physical units).

namespace aff {

/// <H> term by term: bond correlators from computational-basis samples, field
/// terms from Hadamard-rotated samples; the budget is split evenly between
/// the two bases. Depolarizing noise (p1 per gate) acts on the basis-change
/// layer.
double dem_energy(const CVector& state, const TFIMParams& params,
                  const ShotBudget& shots, const NoiseModel& noise);

/// Infinite-shot limit of dem_energy.
double dem_energy_exact(const CVector& state, const TFIMParams& params);

struct RPEConfig {
    double theta_prev = 0.0; ///< rough estimate, e.g. from dem_energy
    int depth = 8;           ///< stages j = 0..depth-1, times 2^j
    long shots = 10000;      ///< per targeted phase, split evenly Re/Im
    NoiseModel noise;
    SimMode mode = SimMode::Exact;
    std::uint64_t seed = 1;
    int threads = 1;
    /// Strang steps per unit time for the evolution blocks. The splitting
    /// shifts the measured ground phase by ~1.8/steps^2 at L = 6, so
    /// estimator circuits split much finer than the filter's
    /// one-step-per-unit rule.
    int steps_per_unit = 24;
};

/// Digit-by-digit phase estimation from Z_j ~ <psi| e^{+i 2^j H} |psi>
/// (conjugated Hadamard moments); each stage picks the phase-lattice point
/// nearest the previous estimate in wrap distance. shots == 0 uses exact
/// moments. Assumes the state is dominated by one eigenvector; degradation
/// under noise shows up as estimation error, not as an exception.
double rpe_estimate(const CVector& state, const HermitianOperator& h,
                    const TFIMParams& params, const RPEConfig& config);

struct QCELSConfig {
    double lambda_lb = 0.0;
    double lambda_ub = 0.0;
    int stages = 9;     ///< J
    long shots = 10000; ///< per moment, split evenly Re/Im
    int samples = 5;    ///< N time points per stage
    double tau = 0.2;
    NoiseModel noise;
    SimMode mode = SimMode::Exact;
    std::uint64_t seed = 1;
    int threads = 1;
    int steps_per_unit = 24; ///< see RPEConfig
};

/// Complex-exponential least squares: per stage fit r*exp(-i*theta*n*tau_j)
/// to the moments Z_n ~ <psi| e^{-i n tau_j H} |psi> over theta in the
/// current bounds (grid scan + golden-section refinement using the
/// closed-form optimal r), then shrink the bounds to theta* +- pi/(2 tau_j).
double qcels_estimate(const CVector& state, const HermitianOperator& h,
                      const TFIMParams& params, const QCELSConfig& config);

} // namespace aff
