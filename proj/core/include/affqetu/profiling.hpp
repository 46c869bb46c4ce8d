#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "affqetu/qetu.hpp"

// Spectrum profiling: reconstruct the cumulative spectral weight of a state
// from a handful of Hadamard-test moments of the rescaled Hamiltonian,
// differentiate it, and pick out the window where the weight accumulates.

namespace aff {

/// Fourier coefficients of the smoothed periodic step with sharpness beta,
/// truncated at odd cutoff D. Even-k coefficients vanish (k != 0), F_0 = 1/2
/// and F_{-k} = conj(F_k).
struct FourierCoefficients {
    int cutoff = 0;   ///< D, odd
    double beta = 0.0;
    std::vector<Complex> values; ///< index k = 0..D

    Complex at(int k) const; ///< any k in [-D, D]
};

FourierCoefficients fourier_coefficients(int d, double beta);

/// Modified Bessel function of the first kind by its power series,
/// truncated when a term drops below 1e-16 of the partial sum.
double bessel_i(int n, double x);

/// H_r = (2/width) * (H - lower*I) - I; maps (lower, upper) to (-1, 1).
HermitianOperator rescale_for_profiling(const HermitianOperator& h,
                                        const SpectrumBounds& bounds);

struct CDFProfile {
    std::vector<double> x;    ///< uniform grid on [-1, 1]
    std::vector<double> cdf;
    std::vector<double> d1;   ///< filled by differentiate()
    std::vector<double> d2;
    std::optional<std::pair<double, double>> bounds_x;
    double max_imag_residual = 0.0;
    bool has_derivatives = false;
};

/// C(x_m) = Re sum_{|k| <= D} F_k e^{ikx_m} M_k with M_{-k} = conj(M_k).
/// `moments` holds M_k for k = 0..D (even k > 0 entries are ignored since
/// their coefficients vanish).
CDFProfile build_cdf(const std::vector<Complex>& moments,
                     const FourierCoefficients& coeffs, int grid_size = 1001);

/// Central differences (one-sided at the ends) into d1/d2.
void differentiate(CDFProfile& profile);

/// Term-wise analytic derivatives, for cross-validation of differentiate().
void differentiate_analytic(CDFProfile& profile,
                            const std::vector<Complex>& moments,
                            const FourierCoefficients& coeffs);

/// Window where the reconstructed weight accumulates. Thresholds apply to
/// the energy-unit derivatives: the window is the contiguous dC/dlambda >
/// xi1 run through the global maximum of C', with the lower edge tightened
/// to where |d2C/dlambda2| first exceeds xi2 walking down from the peak
/// (the accumulation onset). The x interval is mapped back to energy units
/// under `bounds`. Throws NoQualifyingIntervalError when no point clears
/// the growth threshold.
SpectrumBounds extract_bounds(CDFProfile& profile, double xi1, double xi2,
                              const SpectrumBounds& bounds);

/// CSV with header x,C,C1,C2 and 17-significant-digit decimals.
void write_cdf_csv(const CDFProfile& profile, std::ostream& out);

/// Moments M_k = <psi| e^{-ik H_r} |psi> of the rescaled Hamiltonian for
/// k = 0..D. Only odd k are measured (plus the trivial M_0 = 1); even
/// entries are zero-filled. `shots` is the budget per Hadamard estimate.
struct MomentAcquisition {
    std::vector<Complex> moments;
    std::vector<int> sampled_k;
    double evolution_time = 0.0; ///< physical time, one entry of 2k/width per moment
};

MomentAcquisition acquire_moments(const CVector& state,
                                  const HermitianOperator& h,
                                  const SpectrumBounds& bounds, int d,
                                  const ShotBudget& shots,
                                  const NoiseModel& noise, SimMode mode,
                                  const TFIMParams* params = nullptr,
                                  int threads = 1, int steps_per_unit = 1);

} // namespace aff
