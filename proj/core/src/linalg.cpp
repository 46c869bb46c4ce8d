#include "affqetu/linalg.hpp"

#include <cmath>

namespace aff {

namespace {

double max_abs(const CMatrix& m) {
    return m.cwiseAbs().maxCoeff();
}

} // namespace

SpectralDecomposition eigh(const CMatrix& h) {
    if (h.rows() != h.cols()) {
        throw NonHermitianError("eigh: matrix is not square");
    }
    const double asym = max_abs(h - h.adjoint());
    if (asym > 1e-10) {
        throw NonHermitianError("eigh: max|H - H^dag| = " + std::to_string(asym));
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
    if (solver.info() != Eigen::Success) {
        throw NoConvergenceError("eigh: eigensolver did not converge");
    }
    return SpectralDecomposition{solver.eigenvalues(), solver.eigenvectors()};
}

CVector evolve_exact(const SpectralDecomposition& decomp, double t,
                     const CVector& state) {
    if (state.size() != decomp.dim()) {
        throw DimensionMismatchError("evolve_exact: state dim " +
                                     std::to_string(state.size()) +
                                     " != operator dim " +
                                     std::to_string(decomp.dim()));
    }
    CVector coeffs = decomp.eigenvectors.adjoint() * state;
    for (Eigen::Index j = 0; j < coeffs.size(); ++j) {
        coeffs(j) *= std::exp(Complex(0.0, -decomp.eigenvalues(j) * t));
    }
    return decomp.eigenvectors * coeffs;
}

namespace {

void check_gate(const CVector& state, const CMatrix& gate,
                std::span<const int> targets) {
    const Eigen::Index g = gate.rows();
    if (gate.cols() != g || (g != 2 && g != 4)) {
        throw BadTargetsError("apply_gate: gate must be 2x2 or 4x4");
    }
    const std::size_t arity = (g == 2) ? 1 : 2;
    if (targets.size() != arity) {
        throw BadTargetsError("apply_gate: target count does not match gate size");
    }
    Eigen::Index dim = state.size();
    int qubits = 0;
    while ((Eigen::Index(1) << qubits) < dim) ++qubits;
    if ((Eigen::Index(1) << qubits) != dim) {
        throw BadTargetsError("apply_gate: state dimension is not a power of two");
    }
    for (int t : targets) {
        if (t < 0 || t >= qubits) {
            throw BadTargetsError("apply_gate: target " + std::to_string(t) +
                                  " out of range");
        }
    }
    if (arity == 2 && targets[0] == targets[1]) {
        throw BadTargetsError("apply_gate: duplicate targets");
    }
    const double dev = max_abs(gate.adjoint() * gate -
                               CMatrix::Identity(g, g));
    if (dev > 1e-10) {
        throw NotUnitaryError("apply_gate: max|G^dag G - I| = " +
                              std::to_string(dev));
    }
}

} // namespace

void apply_gate_in_place(CVector& state, const CMatrix& gate,
                         std::span<const int> targets) {
    check_gate(state, gate, targets);
    const Eigen::Index dim = state.size();
    Complex* s = state.data();
    if (targets.size() == 1) {
        const Eigen::Index bit = Eigen::Index(1) << targets[0];
        const Complex g00 = gate(0, 0), g01 = gate(0, 1);
        const Complex g10 = gate(1, 0), g11 = gate(1, 1);
        for (Eigen::Index i = 0; i < dim; ++i) {
            if (i & bit) continue;
            const Complex a0 = s[i];
            const Complex a1 = s[i | bit];
            s[i] = g00 * a0 + g01 * a1;
            s[i | bit] = g10 * a0 + g11 * a1;
        }
        return;
    }
    const Eigen::Index lo = Eigen::Index(1) << targets[0];
    const Eigen::Index hi = Eigen::Index(1) << targets[1];
    const Complex* g = gate.data(); // column-major 4x4
    for (Eigen::Index i = 0; i < dim; ++i) {
        if (i & (lo | hi)) continue;
        const Complex a0 = s[i];
        const Complex a1 = s[i | lo];
        const Complex a2 = s[i | hi];
        const Complex a3 = s[i | lo | hi];
        s[i]           = g[0] * a0 + g[4] * a1 + g[8] * a2 + g[12] * a3;
        s[i | lo]      = g[1] * a0 + g[5] * a1 + g[9] * a2 + g[13] * a3;
        s[i | hi]      = g[2] * a0 + g[6] * a1 + g[10] * a2 + g[14] * a3;
        s[i | lo | hi] = g[3] * a0 + g[7] * a1 + g[11] * a2 + g[15] * a3;
    }
}

CVector apply_gate(const CVector& state, const CMatrix& gate,
                   std::span<const int> targets) {
    CVector out = state;
    apply_gate_in_place(out, gate, targets);
    return out;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
                a(i, j) * b;
        }
    }
    return out;
}

HermitianOperator::HermitianOperator(CMatrix matrix)
    : impl_(std::make_shared<Impl>()) {
    impl_->matrix = std::move(matrix);
    if (impl_->matrix.rows() != impl_->matrix.cols()) {
        throw NonHermitianError("HermitianOperator: matrix is not square");
    }
}

int HermitianOperator::qubits() const {
    int q = 0;
    while ((Eigen::Index(1) << q) < dim()) ++q;
    return q;
}

const SpectralDecomposition& HermitianOperator::decomposition() const {
    std::call_once(impl_->once, [this] {
        impl_->decomp =
            std::make_unique<SpectralDecomposition>(eigh(impl_->matrix));
    });
    return *impl_->decomp;
}

const CMatrix& pauli_x() {
    static const CMatrix m = [] {
        CMatrix x(2, 2);
        x << 0, 1, 1, 0;
        return x;
    }();
    return m;
}

const CMatrix& pauli_y() {
    static const CMatrix m = [] {
        CMatrix y(2, 2);
        y << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
        return y;
    }();
    return m;
}

const CMatrix& pauli_z() {
    static const CMatrix m = [] {
        CMatrix z(2, 2);
        z << 1, 0, 0, -1;
        return z;
    }();
    return m;
}

const CMatrix& hadamard_matrix() {
    static const CMatrix m = [] {
        const double s = 1.0 / std::sqrt(2.0);
        CMatrix h(2, 2);
        h << s, s, s, -s;
        return h;
    }();
    return m;
}

CMatrix identity_matrix(Eigen::Index n) { return CMatrix::Identity(n, n); }

CVector basis_state(int qubits, std::uint64_t index) {
    CVector v = CVector::Zero(Eigen::Index(1) << qubits);
    v(Eigen::Index(index)) = 1.0;
    return v;
}

CVector haar_random_state(Eigen::Index dim, RngStream& rng) {
    CVector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        v(i) = Complex(rng.normal(), rng.normal());
    }
    v.normalize();
    return v;
}

double state_overlap(const CVector& a, const CVector& b) {
    return std::abs(a.dot(b));
}

} // namespace aff
