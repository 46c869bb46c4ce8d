#include "affqetu/step_poly.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace aff {

namespace {

// Inequality-form LP, minimize c'z subject to G z <= h, solved with a
// log-barrier interior point method. Problem sizes here are a few thousand
// rows by at most ~33 columns, so Newton steps on the dense normal matrix
// are cheap.
struct BarrierLP {
    Eigen::MatrixXd G;
    Eigen::VectorXd h;
    Eigen::VectorXd c;

    Eigen::VectorXd solve(Eigen::VectorXd z) const {
        const auto m = static_cast<double>(G.rows());
        const Eigen::Index n = G.cols();
        double t = 1.0;
        const double mu = 20.0;
        const double gap_tol = 1e-10;

        Eigen::VectorXd slack = h - G * z;
        if (slack.minCoeff() <= 0.0) {
            throw InfeasibleBandError("step polynomial LP: infeasible start");
        }
        while (m / t > gap_tol) {
            for (int newton = 0; newton < 80; ++newton) {
                slack = h - G * z;
                Eigen::VectorXd inv_s = slack.cwiseInverse();
                Eigen::VectorXd grad = t * c + G.transpose() * inv_s;
                Eigen::MatrixXd hess = G.transpose() *
                                       inv_s.cwiseAbs2().asDiagonal() * G;
                hess.diagonal().array() += 1e-13 * hess.trace();
                Eigen::VectorXd step = hess.ldlt().solve(-grad);
                const double decrement = -grad.dot(step);
                if (!(decrement > 2e-11)) break;

                // largest feasible step, then Armijo backtracking
                double alpha = 1.0;
                Eigen::VectorXd gstep = G * step;
                for (Eigen::Index i = 0; i < G.rows(); ++i) {
                    if (gstep(i) > 0.0) {
                        alpha = std::min(alpha, 0.99 * slack(i) / gstep(i));
                    }
                }
                auto merit = [&](const Eigen::VectorXd& zz) {
                    Eigen::VectorXd s = h - G * zz;
                    if (s.minCoeff() <= 0.0) {
                        return std::numeric_limits<double>::infinity();
                    }
                    return t * c.dot(zz) - s.array().log().sum();
                };
                const double f0 = merit(z);
                const double slope = grad.dot(step);
                int backtracks = 0;
                while (backtracks < 60 &&
                       merit(z + alpha * step) > f0 + 0.25 * alpha * slope) {
                    alpha *= 0.5;
                    ++backtracks;
                }
                if (backtracks >= 60) break;
                z += alpha * step;
            }
            t *= mu;
        }
        return z;
    }
};

double cheb_even(int k2, double a) {
    // T_{k2}(a) via cos, stable on [-1, 1]
    return std::cos(k2 * std::acos(std::clamp(a, -1.0, 1.0)));
}

} // namespace

double evaluate(const StepPolynomial& poly, double a) {
    if (std::abs(a) > 1.0 + 1e-12) {
        throw OutOfDomainError("evaluate: |a| > 1");
    }
    a = std::clamp(a, -1.0, 1.0);
    // even series: F(a) = sum_k c_k T_{2k}(a) = sum_k c_k T_k(2a^2 - 1)
    const double y = 2.0 * a * a - 1.0;
    double b1 = 0.0, b2 = 0.0;
    for (auto k = static_cast<int>(poly.cheb_coeffs.size()) - 1; k >= 1; --k) {
        const double b = poly.cheb_coeffs[std::size_t(k)] + 2.0 * y * b1 - b2;
        b2 = b1;
        b1 = b;
    }
    return poly.cheb_coeffs.at(0) + y * b1 - b2;
}

StepPolynomial approximate_step(int eta, double mu, double halfwidth) {
    if (eta < 4 || eta > 60 || eta % 2 != 0) {
        throw BadParametersError("approximate_step: eta must be even in [4, 60]");
    }
    if (!(halfwidth > 0.0) || !(mu - halfwidth > 0.0) ||
        !(mu + halfwidth < 1.0)) {
        throw BadParametersError(
            "approximate_step: band [mu-w, mu+w] must lie inside (0, 1)");
    }

    const int ncoef = eta / 2 + 1;
    const int nvar = ncoef + 1; // coefficients + eps
    const int grid_n = 1001;
    const double cap = 1.0 - 1e-4;

    std::vector<double> grid(grid_n);
    for (int k = 0; k < grid_n; ++k) {
        grid[std::size_t(k)] =
            std::cos(0.5 * std::numbers::pi * k / (grid_n - 1));
    }

    std::vector<Eigen::VectorXd> rows;
    std::vector<double> rhs;
    auto basis_row = [&](double a) {
        Eigen::VectorXd r = Eigen::VectorXd::Zero(nvar);
        for (int k = 0; k < ncoef; ++k) r(k) = cheb_even(2 * k, a);
        return r;
    };
    auto add_row = [&](const Eigen::VectorXd& r, double b) {
        rows.push_back(r);
        rhs.push_back(b);
    };

    std::vector<double> transition;
    for (double a : grid) {
        const Eigen::VectorXd f = basis_row(a);
        add_row(f, cap);
        add_row(-f, cap);
        if (a <= mu - halfwidth) {
            Eigen::VectorXd r = f;
            r(ncoef) = -1.0;
            add_row(r, 0.0);
            r = -f;
            r(ncoef) = -1.0;
            add_row(r, 0.0);
        } else if (a >= mu + halfwidth) {
            Eigen::VectorXd r = -f;
            r(ncoef) = -1.0;
            add_row(r, -1.0);
        } else {
            transition.push_back(a);
        }
    }
    std::sort(transition.begin(), transition.end());
    for (std::size_t i = 0; i + 1 < transition.size(); ++i) {
        add_row(basis_row(transition[i]) - basis_row(transition[i + 1]), 0.0);
    }
    {
        Eigen::VectorXd r = Eigen::VectorXd::Zero(nvar);
        r(ncoef) = -1.0;
        add_row(r, 0.0); // eps >= 0
        r(ncoef) = 1.0;
        add_row(r, 1.0); // eps <= 1
    }

    BarrierLP lp;
    lp.G.resize(Eigen::Index(rows.size()), nvar);
    lp.h.resize(Eigen::Index(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        lp.G.row(Eigen::Index(i)) = rows[i];
        lp.h(Eigen::Index(i)) = rhs[i];
    }
    lp.c = Eigen::VectorXd::Zero(nvar);
    lp.c(ncoef) = 1.0;

    Eigen::VectorXd start = Eigen::VectorXd::Zero(nvar);
    start(0) = 0.5;
    start(1) = 0.05; // slight increasing tilt keeps monotonicity rows strict
    start(ncoef) = 0.8;
    const Eigen::VectorXd sol = lp.solve(start);

    StepPolynomial poly;
    poly.degree = eta;
    poly.cutoff = mu;
    poly.band_halfwidth = halfwidth;
    poly.cheb_coeffs.assign(sol.data(), sol.data() + ncoef);

    // achieved residual from a finer check grid
    double eps_out = 0.0;
    const int check_n = 2001;
    for (int k = 0; k < check_n; ++k) {
        const double a = std::cos(0.5 * std::numbers::pi * k / (check_n - 1));
        const double f = evaluate(poly, a);
        if (a <= mu - halfwidth) {
            eps_out = std::max(eps_out, std::abs(f));
        } else if (a >= mu + halfwidth) {
            eps_out = std::max(eps_out, 1.0 - f);
        }
    }
    poly.residual = eps_out;
    if (!(eps_out <= 0.2)) {
        throw InfeasibleBandError(
            "approximate_step: achieved band error " + std::to_string(eps_out) +
            " exceeds 0.2 (degree too low for the requested band)");
    }
    return poly;
}

double default_halfwidth(double mu) {
    return std::min({0.05, 0.6 * (1.0 - mu), 0.6 * mu});
}

double default_halfwidth(double mu, double delta_a) {
    return std::min({std::max(delta_a / 2.0, 0.02), 0.6 * (1.0 - mu),
                     0.6 * mu});
}

} // namespace aff
