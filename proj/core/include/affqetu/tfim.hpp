#pragma once

#include "affqetu/linalg.hpp"

// Transverse-field Ising chain H = -J sum_j Z_j Z_{j+1} - g sum_j X_j on a
// ring (wrap-around bond for L >= 3, a single bond at L = 2), plus the
// affine spectrum transform and its cosine map.

namespace aff {

struct TFIMParams {
    int sites = 2;         ///< L >= 2
    double coupling = 1.0; ///< J
    double field = 1.0;    ///< g
    bool ring = true;      ///< fixed: only the ring coupling is supported

    void validate() const;
};

/// Estimated spectrum window [lower, upper].
struct SpectrumBounds {
    double lower = 0.0;
    double upper = 0.0;

    double width() const { return upper - lower; }
    void validate() const;
};

/// Coefficients of the half-angle map lambda -> c1*lambda + c2, chosen so
/// that cos(c1*lambda + c2) = cos(lambda_t / 2) with lambda_t the transformed
/// eigenvalue: c1 = pi / (2*width), c2 = -c1 * lower.
struct TransformCoefficients {
    double c1 = 0.0;
    double c2 = 0.0;

    static TransformCoefficients from_bounds(const SpectrumBounds& bounds);
};

struct SpectralGaps {
    double delta;    ///< lambda_1 - lambda_0 after degeneracy grouping
    double delta_a;  ///< a_0 - a_1 in cosine space
    double a0;
    double a1;
};

/// Dense TFIM Hamiltonian; rejects sites > 12.
HermitianOperator build_tfim(const TFIMParams& params);

/// H_t = pi * (H - lower*I) / (upper - lower); maps (lower, upper) to (0, pi).
HermitianOperator linear_transform(const HermitianOperator& h,
                                   const SpectrumBounds& bounds);

/// a = cos(lambda_t / 2) for lambda_t in (0, pi). Out-of-range inputs are
/// clamped and logged to std::clog; the filtering circuits never clamp, this
/// helper is for diagnostics such as cutoff placement.
double cosine_map(double lambda_t);

/// Gaps of the spectrum under the given bounds. Eigenvalues within 1e-9 are
/// grouped as one degenerate level.
SpectralGaps spectral_gaps(const SpectralDecomposition& decomp,
                           const SpectrumBounds& bounds);

/// Rigorous operator-norm window +-(J*(L-1) + g*L) * margin.
SpectrumBounds default_bounds(const TFIMParams& params, double margin = 1.05);

/// Eigenvalue grouping tolerance shared by degeneracy-aware routines.
inline constexpr double kDegeneracyTol = 1e-9;

} // namespace aff
