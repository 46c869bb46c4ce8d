#pragma once

#include <vector>

#include "affqetu/errors.hpp"

// Even step-approximating polynomials in the Chebyshev basis. F(a) is stored
// as coefficients of T_0, T_2, ..., T_degree and transitions from ~0 below
// cutoff - halfwidth to ~1 above cutoff + halfwidth on a in [0, 1].

namespace aff {

struct StepPolynomial {
    int degree = 0;                  ///< eta, even
    double cutoff = 0.0;             ///< mu in (0, 1)
    double band_halfwidth = 0.0;     ///< transition half-width w
    std::vector<double> cheb_coeffs; ///< c_k multiplies T_{2k}(a)
    double residual = 0.0;           ///< achieved band error eps_out
};

/// Synthesize the minimax step approximation of degree eta at cutoff mu.
/// Solved as a linear program on a 1001-point Chebyshev grid: minimize eps
/// subject to |F| <= eps on [0, mu-w], 1-eps <= F <= 1 on [mu+w, 1],
/// |F| <= 1 everywhere and F nondecreasing across the transition band.
/// Throws InfeasibleBandError when the achieved eps exceeds 0.2.
StepPolynomial approximate_step(int eta, double mu, double halfwidth);

/// Clenshaw evaluation of the even Chebyshev series at a in [-1, 1].
double evaluate(const StepPolynomial& poly, double a);

/// Transition half-width that keeps the band inside (0, 1) for the given
/// cutoff; when the cosine-space gap is known, at least half of it.
double default_halfwidth(double mu);
double default_halfwidth(double mu, double delta_a);

} // namespace aff
