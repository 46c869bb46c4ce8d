#pragma once

#include <complex>

#include "affqetu/circuit.hpp"
#include "affqetu/qsp.hpp"

// The eigenvalue-transform filter circuit: ancilla X rotations alternating
// with controlled time evolution, post-selected on the ancilla reading 0.
// The ancilla is the qubit directly above the system register.

namespace aff {

struct PostSelectionResult {
    CVector state;               ///< renormalized post-selected state
    double success_probability;  ///< ancilla-0 probability (exact) or ratio
    long accepted_shots = 0;
    long attempted_shots = 0;
};

/// Noiseless, deterministic execution: the full (ancilla + system) circuit
/// with the controlled evolution applied through the eigendecomposition of
/// the transformed Hamiltonian, then exact projection on ancilla 0.
PostSelectionResult qetu_execute_exact(const CVector& state,
                                       const QSPPhases& phases,
                                       const HermitianOperator& h_transformed);

/// Shot-sampled execution on the Trotterized controlled evolution `cu`.
/// Every shot simulates one noisy trajectory and samples the ancilla; the
/// returned state is one accepted trajectory chosen uniformly (via a
/// deterministic per-shot score, so the choice is thread-count independent).
PostSelectionResult qetu_execute_sampled(const CVector& state,
                                         const QSPPhases& phases,
                                         const GateList& cu,
                                         const NoiseModel& noise,
                                         const ShotBudget& shots,
                                         int threads = 1);

/// Mode dispatch; Exact requires zero noise and ignores `cu` and `shots`.
PostSelectionResult qetu_execute(const CVector& state, const QSPPhases& phases,
                                 const HermitianOperator& h_transformed,
                                 const GateList& cu, const NoiseModel& noise,
                                 const ShotBudget& shots, SimMode mode,
                                 int threads = 1);

enum class MomentPart { Real, Imag };

/// <state| exp(-i H t) |state> from the eigendecomposition.
Complex moment_exact(const CVector& state, const HermitianOperator& h,
                     double t);

/// Hadamard-test estimate of Re or Im <state| exp(-i H t) |state>.
/// shots.total_shots == 0 returns the exact value (Exact mode only);
/// otherwise ancilla outcomes are sampled, either from the exact outcome
/// distribution (Exact) or from per-shot noisy trajectories over the
/// controlled circuit `cu` (Trotter).
double hadamard_test(const CVector& state, const HermitianOperator& h,
                     double t, MomentPart part, const ShotBudget& shots,
                     const NoiseModel& noise, SimMode mode,
                     const GateList* cu = nullptr, int threads = 1);

/// Re + i Im via two hadamard_test calls with split seeds.
Complex estimate_moment(const CVector& state, const HermitianOperator& h,
                        double t, const ShotBudget& shots,
                        const NoiseModel& noise, SimMode mode,
                        const GateList* cu = nullptr, int threads = 1);

/// Hadamard test over a repeated-step controlled evolution. Trajectories
/// skip error-free stretches by applying cached dense powers of the step
/// unitary; the sampled distribution is identical to the per-gate path.
double hadamard_test_repeated(const CVector& state, MomentPart part,
                              const RepeatedEvolution& evo,
                              const ShotBudget& shots, const NoiseModel& noise,
                              int threads = 1);

Complex estimate_moment_repeated(const CVector& state,
                                 const RepeatedEvolution& evo,
                                 const ShotBudget& shots,
                                 const NoiseModel& noise, int threads = 1);

} // namespace aff
