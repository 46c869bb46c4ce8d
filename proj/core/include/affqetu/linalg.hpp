#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <mutex>
#include <span>

#include "affqetu/errors.hpp"
#include "affqetu/rng.hpp"

// Dense complex linear algebra for statevector simulation.
//
// Qubit convention used throughout the library: qubit 0 is the least
// significant bit of the amplitude index. kron(A, B) therefore places A on
// the high qubit(s) and B on the low qubit(s).

namespace aff {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

/// Eigensystem of a Hermitian matrix: ascending eigenvalues, orthonormal
/// eigenvector columns (column k pairs with eigenvalues[k]).
struct SpectralDecomposition {
    RVector eigenvalues;
    CMatrix eigenvectors;

    Eigen::Index dim() const { return eigenvalues.size(); }
};

/// Hermitian eigendecomposition. Requires max|H - H^dag| <= 1e-10.
SpectralDecomposition eigh(const CMatrix& h);

/// exp(-i H t) |state> through the eigendecomposition of H. Linear in the
/// input, so unnormalized blocks may be passed.
CVector evolve_exact(const SpectralDecomposition& decomp, double t,
                     const CVector& state);

/// Apply a 1- or 2-qubit unitary to the statevector. targets[0] addresses
/// the low bit of the gate's internal index, targets[1] the high bit.
void apply_gate_in_place(CVector& state, const CMatrix& gate,
                         std::span<const int> targets);
CVector apply_gate(const CVector& state, const CMatrix& gate,
                   std::span<const int> targets);

/// Kronecker product, (A kron B)[i*rB+k, j*cB+l] = A[i,j] * B[k,l].
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Dense Hermitian operator with a lazily computed, cached eigensystem.
/// Immutable after construction; copies share the cache.
class HermitianOperator {
public:
    explicit HermitianOperator(CMatrix matrix);

    const CMatrix& matrix() const { return impl_->matrix; }
    Eigen::Index dim() const { return impl_->matrix.rows(); }
    int qubits() const;
    const SpectralDecomposition& decomposition() const;
    double ground_energy() const { return decomposition().eigenvalues(0); }

private:
    struct Impl {
        CMatrix matrix;
        std::once_flag once;
        std::unique_ptr<SpectralDecomposition> decomp;
    };
    std::shared_ptr<Impl> impl_;
};

const CMatrix& pauli_x();
const CMatrix& pauli_y();
const CMatrix& pauli_z();
const CMatrix& hadamard_matrix();
CMatrix identity_matrix(Eigen::Index n);

/// |index> on `qubits` qubits.
CVector basis_state(int qubits, std::uint64_t index);

/// Normalized vector of iid complex Gaussian amplitudes.
CVector haar_random_state(Eigen::Index dim, RngStream& rng);

/// |<a|b>|.
double state_overlap(const CVector& a, const CVector& b);

} // namespace aff
