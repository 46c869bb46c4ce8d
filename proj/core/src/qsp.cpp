#include "affqetu/qsp.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "affqetu/rng.hpp"

namespace aff {

namespace {

using Matrix2 = Eigen::Matrix2cd;
using Complex = std::complex<double>;

Matrix2 x_rotation(double phi) {
    Matrix2 m;
    const Complex is(0.0, std::sin(phi));
    m << std::cos(phi), is, is, std::cos(phi);
    return m;
}

Matrix2 signal(double lambda_t, bool dagger) {
    Matrix2 m = Matrix2::Zero();
    m(0, 0) = 1.0;
    m(1, 1) = std::exp(Complex(0.0, dagger ? lambda_t : -lambda_t));
    return m;
}

// Applied operator sequence, first element acts first:
// X(phi_0), V, X(phi_1), V^dag, X(phi_2), ..., X(phi_eta).
std::vector<Matrix2> build_sequence(const std::vector<double>& phases,
                                    double lambda_t) {
    const int eta = static_cast<int>(phases.size()) - 1;
    std::vector<Matrix2> ops;
    ops.reserve(2 * std::size_t(eta) + 1);
    ops.push_back(x_rotation(phases[0]));
    for (int k = 1; k <= eta; ++k) {
        ops.push_back(signal(lambda_t, k % 2 == 0));
        ops.push_back(x_rotation(phases[std::size_t(k)]));
    }
    return ops;
}

struct ResponseGradient {
    double value;                     // Re of the (0,0) element
    std::vector<double> d_phase;      // derivative w.r.t. each phi_k
};

ResponseGradient response_with_gradient(const std::vector<double>& phases,
                                        double lambda_t) {
    const auto ops = build_sequence(phases, lambda_t);
    const auto n = ops.size();
    std::vector<Matrix2> prefix(n), suffix(n);
    prefix[0] = ops[0];
    for (std::size_t j = 1; j < n; ++j) prefix[j] = ops[j] * prefix[j - 1];
    suffix[n - 1] = ops[n - 1];
    for (std::size_t j = n - 1; j-- > 0;) suffix[j] = suffix[j + 1] * ops[j];

    Matrix2 ix;
    ix << 0.0, Complex(0, 1), Complex(0, 1), 0.0;

    ResponseGradient out;
    out.value = prefix[n - 1](0, 0).real();
    const int eta = static_cast<int>(phases.size()) - 1;
    out.d_phase.resize(phases.size());
    for (int m = 0; m <= eta; ++m) {
        const std::size_t pos = 2 * std::size_t(m);
        Matrix2 mid = ix * ops[pos];
        if (pos > 0) mid = mid * prefix[pos - 1];
        if (pos + 1 < n) mid = suffix[pos + 1] * mid;
        out.d_phase[std::size_t(m)] = mid(0, 0).real();
    }
    return out;
}

std::vector<double> expand_symmetric(const std::vector<double>& free,
                                     int eta) {
    std::vector<double> phases(std::size_t(eta) + 1);
    for (int k = 0; k <= eta; ++k) {
        phases[std::size_t(k)] = free[std::size_t(std::min(k, eta - k))];
    }
    return phases;
}

struct Objective {
    const StepPolynomial* poly;
    std::vector<double> nodes;
    std::vector<double> targets;
    int eta;

    double eval(const std::vector<double>& free,
                std::vector<double>* grad) const {
        const auto phases = expand_symmetric(free, eta);
        if (grad) std::fill(grad->begin(), grad->end(), 0.0);
        double f = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const double lambda_t = 2.0 * std::acos(nodes[i]);
            if (!grad) {
                double r = 0.0;
                {
                    QSPPhases p{phases};
                    r = qsp_response(p, nodes[i]);
                }
                const double e = r - targets[i];
                f += e * e;
                continue;
            }
            const auto rg = response_with_gradient(phases, lambda_t);
            const double e = rg.value - targets[i];
            f += e * e;
            for (int k = 0; k <= eta; ++k) {
                (*grad)[std::size_t(std::min(k, eta - k))] +=
                    2.0 * e * rg.d_phase[std::size_t(k)];
            }
        }
        return f;
    }
};

// Dense BFGS with Armijo backtracking; dimensions here are <= 31.
bool bfgs_minimize(const Objective& obj, std::vector<double>& p) {
    const auto n = p.size();
    Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(Eigen::Index(n),
                                                     Eigen::Index(n));
    std::vector<double> grad(n), grad_new(n);
    double f = obj.eval(p, &grad);
    for (int iter = 0; iter < 800; ++iter) {
        Eigen::Map<Eigen::VectorXd> g(grad.data(), Eigen::Index(n));
        if (g.lpNorm<Eigen::Infinity>() < 1e-13 || f < 1e-22) return true;
        Eigen::VectorXd dir = -hinv * g;
        double slope = g.dot(dir);
        if (slope > 0) { // reset on loss of descent direction
            hinv.setIdentity();
            dir = -g;
            slope = g.dot(dir);
        }
        double alpha = 1.0;
        std::vector<double> trial(n);
        double f_new = f;
        bool moved = false;
        for (int bt = 0; bt < 50; ++bt) {
            for (std::size_t i = 0; i < n; ++i) {
                trial[i] = p[i] + alpha * dir(Eigen::Index(i));
            }
            f_new = obj.eval(trial, nullptr);
            if (f_new <= f + 1e-4 * alpha * slope) {
                moved = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!moved) return f < 1e-16;
        f_new = obj.eval(trial, &grad_new);
        Eigen::VectorXd s = Eigen::VectorXd::Zero(Eigen::Index(n));
        Eigen::VectorXd y = Eigen::VectorXd::Zero(Eigen::Index(n));
        for (std::size_t i = 0; i < n; ++i) {
            s(Eigen::Index(i)) = trial[i] - p[i];
            y(Eigen::Index(i)) = grad_new[i] - grad[i];
        }
        const double sy = s.dot(y);
        if (sy > 1e-14) {
            const Eigen::VectorXd hy = hinv * y;
            const double yhy = y.dot(hy);
            hinv += ((sy + yhy) / (sy * sy)) * (s * s.transpose()) -
                    (hy * s.transpose() + s * hy.transpose()) / sy;
        }
        p = trial;
        grad = grad_new;
        f = f_new;
    }
    return f < 1e-16;
}

} // namespace

void QSPPhases::validate() const {
    if (phases.empty()) {
        throw BadParametersError("QSPPhases: empty phase vector");
    }
    const auto n = phases.size();
    for (std::size_t k = 0; k < n / 2; ++k) {
        if (std::abs(phases[k] - phases[n - 1 - k]) > 1e-9) {
            throw BadParametersError("QSPPhases: phases are not symmetric");
        }
    }
}

Complex qsp_response_full(const QSPPhases& phases, double a) {
    if (std::abs(a) > 1.0 + 1e-12) {
        throw OutOfDomainError("qsp_response: |a| > 1");
    }
    const double lambda_t = 2.0 * std::acos(std::clamp(a, -1.0, 1.0));
    const auto ops = build_sequence(phases.phases, lambda_t);
    Matrix2 m = ops[0];
    for (std::size_t j = 1; j < ops.size(); ++j) m = ops[j] * m;
    return m(0, 0);
}

double qsp_response(const QSPPhases& phases, double a) {
    return qsp_response_full(phases, a).real();
}

double phase_residual(const QSPPhases& phases, const StepPolynomial& poly,
                      int grid_points) {
    double worst = 0.0;
    for (int i = 0; i < grid_points; ++i) {
        const double a = double(i) / (grid_points - 1);
        worst = std::max(worst,
                         std::abs(qsp_response(phases, a) - evaluate(poly, a)));
    }
    return worst;
}

QSPPhases find_phases(const StepPolynomial& poly, std::uint64_t seed) {
    const int eta = poly.degree;
    const int nfree = eta / 2 + 1;

    Objective obj;
    obj.poly = &poly;
    obj.eta = eta;
    obj.nodes.resize(std::size_t(nfree));
    obj.targets.resize(std::size_t(nfree));
    for (int i = 1; i <= nfree; ++i) {
        const double x = std::cos((2.0 * i - 1.0) * std::numbers::pi /
                                  (4.0 * nfree));
        obj.nodes[std::size_t(i - 1)] = x;
        obj.targets[std::size_t(i - 1)] = evaluate(poly, x);
    }

    RngStream rng(seed);
    for (int restart = 0; restart <= 50; ++restart) {
        std::vector<double> p(std::size_t(nfree), 0.0);
        p[0] = std::numbers::pi / 4.0;
        if (restart > 0) {
            auto r = rng.split(std::uint64_t(restart));
            const double scale = 0.05 * restart;
            for (auto& v : p) v += scale * r.normal();
        }
        bfgs_minimize(obj, p);
        QSPPhases candidate{expand_symmetric(p, eta)};
        if (phase_residual(candidate, poly) <= 1e-6) {
            return candidate;
        }
    }
    throw PhaseOptimizationError(
        "find_phases: residual above 1e-6 after 50 restarts (degree " +
        std::to_string(eta) + ")");
}

} // namespace aff
