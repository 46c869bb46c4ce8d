#pragma once

#include <vector>

#include "affqetu/linalg.hpp"
#include "affqetu/tfim.hpp"

// Gate-level circuits: Strang-split time evolution of the TFIM (optionally
// promoted to its ancilla-controlled version) and Monte-Carlo depolarizing
// trajectories.

namespace aff {

enum class SimMode { Exact, Trotter };

/// Per-gate depolarizing probabilities; p1 defaults to p2 / 10. Experiments
/// use the small-p regime; validation accepts the full probability range so
/// channel-average checks can pin p = 1.
struct NoiseModel {
    double p2 = 0.0;
    double p1 = 0.0;

    static NoiseModel none() { return {}; }
    static NoiseModel depolarizing(double p2);
    static NoiseModel depolarizing(double p2, double p1);
    bool is_zero() const { return p2 == 0.0 && p1 == 0.0; }
    void validate() const;
};

struct ShotBudget {
    long total_shots = 0;
    std::uint64_t rng_seed = 0;
};

struct Gate {
    CMatrix matrix;              ///< 2x2 or 4x4 unitary
    std::array<int, 2> targets;  ///< targets[0] = low gate bit
    int arity;
};

struct GateList {
    int qubits = 0;
    std::vector<Gate> gates;
    double evolution_time = 0.0; ///< accumulated Hamiltonian time (physical units)

    void add(const CMatrix& u, int target);
    void add(const CMatrix& u, int target_low, int target_high);
    GateList dagger() const;
    CMatrix to_dense() const; ///< small registers only, for cross-checks
    std::size_t two_qubit_count() const;
    std::size_t single_qubit_count() const;
};

/// Second-order Strang circuit for exp(-i*H_t*t) with H_t the linear
/// transform of the TFIM under `bounds`. The physical evolution time
/// tau = t*pi/width is split into n = ceil(tau) steps so each step stays
/// below unit time; per step: half X layer, ZZ layer (even bonds then odd),
/// half X layer. When controlled, rotations become ancilla-controlled and
/// the bounds offset appears as an ancilla phase gate.
GateList trotter_circuit(const TFIMParams& params, const SpectrumBounds& bounds,
                         double t, bool controlled, int ancilla,
                         int steps_per_unit = 1);

/// Strang circuit for exp(-i*(scale*H + shift*I)*t); the shift only emits a
/// gate (an ancilla phase) in the controlled case.
GateList evolution_circuit(const TFIMParams& params, double scale, double shift,
                           double t, bool controlled, int ancilla,
                           int steps_per_unit = 1);

void apply_circuit(CVector& state, const GateList& circuit);

/// One Monte-Carlo trajectory: after every two-qubit gate a uniformly random
/// non-identity two-qubit Pauli with probability p2, after every single-qubit
/// gate one of X/Y/Z with probability p1. Zero noise applies no randomness
/// and is bit-identical to apply_circuit.
void apply_noisy(CVector& state, const GateList& circuit,
                 const NoiseModel& noise, RngStream& rng);

/// One uniformly random non-identity Pauli on the gate's target qubits.
void apply_random_pauli(CVector& state, const Gate& gate, RngStream& rng);

/// Controlled evolution written as `steps` repetitions of one identical
/// Strang step, for trajectory sampling that can skip error-free stretches
/// with cached dense powers of the system-register step unitary.
struct RepeatedEvolution {
    GateList step;         ///< one controlled step on (system + ancilla)
    CMatrix system_step;   ///< the same step as a dense system unitary
    long steps = 0;
    double ancilla_phase = 0.0; ///< scalar-shift phase, applied once on the ancilla
    int qubits = 0;             ///< system + ancilla register width
    double evolution_time = 0.0;

    /// Lazily built system_step powers: [U, U^2, U^4, ...].
    const std::vector<CMatrix>& power_cache() const;

private:
    mutable std::vector<CMatrix> powers_;
};

/// exp(-i(scale*H + shift)t) as a controlled repeated-step evolution with
/// about `steps_per_unit` Strang steps per unit of physical time.
RepeatedEvolution repeated_evolution(const TFIMParams& params, double scale,
                                     double shift, double t,
                                     int steps_per_unit);

} // namespace aff
