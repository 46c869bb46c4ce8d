#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "affqetu/step_poly.hpp"

// Symmetric phase factors for the eigenvalue-transform circuit. The circuit
// alternates ancilla rotations exp(i*phi_k*X) with controlled time evolution
// and its inverse; on an eigenstate the controlled evolution reduces to
// V = diag(1, exp(-i*lambda_t)) with a = cos(lambda_t / 2).

namespace aff {

struct QSPPhases {
    std::vector<double> phases; ///< length degree+1, phases[k] == phases[n-k]

    int degree() const { return static_cast<int>(phases.size()) - 1; }
    void validate() const;
};

/// (0,0) element of the alternating product
/// exp(i*phi_0*X) V^dag exp(i*phi_1*X) V ... exp(i*phi_1*X) V exp(i*phi_0*X)
/// at a in [-1, 1]. The real part is the realized polynomial.
std::complex<double> qsp_response_full(const QSPPhases& phases, double a);
double qsp_response(const QSPPhases& phases, double a);

/// Optimize symmetric phases reproducing the polynomial to 1e-6 on a dense
/// grid. Quasi-Newton descent on Chebyshev-node residuals from the
/// (pi/4, 0, ..., 0, pi/4) start, with seeded random restarts on failure.
QSPPhases find_phases(const StepPolynomial& poly, std::uint64_t seed = 0x51b7);

/// Max |response - polynomial| over an n-point uniform grid on [0, 1].
double phase_residual(const QSPPhases& phases, const StepPolynomial& poly,
                      int grid_points = 500);

} // namespace aff
