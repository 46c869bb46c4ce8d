#include "affqetu/circuit.hpp"

#include <cmath>
#include <numbers>

namespace aff {

NoiseModel NoiseModel::depolarizing(double p2) {
    return depolarizing(p2, p2 / 10.0);
}

NoiseModel NoiseModel::depolarizing(double p2, double p1) {
    NoiseModel n{p2, p1};
    n.validate();
    return n;
}

void NoiseModel::validate() const {
    if (p2 < 0.0 || p2 > 1.0 || p1 < 0.0 || p1 > 1.0) {
        throw BadParametersError("NoiseModel: probabilities must be in [0, 1]");
    }
}

void GateList::add(const CMatrix& u, int target) {
    gates.push_back(Gate{u, {target, -1}, 1});
}

void GateList::add(const CMatrix& u, int target_low, int target_high) {
    gates.push_back(Gate{u, {target_low, target_high}, 2});
}

GateList GateList::dagger() const {
    GateList out;
    out.qubits = qubits;
    out.evolution_time = evolution_time;
    out.gates.reserve(gates.size());
    for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
        out.gates.push_back(Gate{it->matrix.adjoint(), it->targets, it->arity});
    }
    return out;
}

CMatrix GateList::to_dense() const {
    const Eigen::Index dim = Eigen::Index(1) << qubits;
    CMatrix u = CMatrix::Identity(dim, dim);
    for (Eigen::Index col = 0; col < dim; ++col) {
        CVector v = u.col(col);
        apply_circuit(v, *this);
        u.col(col) = v;
    }
    return u;

}

std::size_t GateList::two_qubit_count() const {
    std::size_t n = 0;
    for (const auto& g : gates) n += (g.arity == 2);
    return n;
}

std::size_t GateList::single_qubit_count() const {
    return gates.size() - two_qubit_count();
}

namespace {

CMatrix x_rotation(double phi) {
    CMatrix m(2, 2);
    const Complex is(0.0, std::sin(phi));
    m << std::cos(phi), is, is, std::cos(phi);
    return m;
}

/// diag(1, e^{i phi}) on one qubit.
CMatrix phase_gate(double phi) {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = std::exp(Complex(0.0, phi));
    return m;
}

/// Controlled single-qubit gate; control on the high gate bit.
CMatrix controlled(const CMatrix& u) {
    CMatrix m = CMatrix::Identity(4, 4);
    m.block(2, 2, 2, 2) = u;
    return m;
}

/// CNOT with control on the high gate bit.
const CMatrix& cnot_matrix() {
    static const CMatrix m = [] {
        CMatrix c = CMatrix::Zero(4, 4);
        c(0, 0) = c(1, 1) = c(2, 3) = c(3, 2) = 1.0;
        return c;
    }();
    return m;
}

/// exp(i theta Z x Z) as a diagonal 4x4.
CMatrix zz_rotation(double theta) {
    CMatrix m = CMatrix::Zero(4, 4);
    const Complex plus = std::exp(Complex(0.0, theta));
    const Complex minus = std::exp(Complex(0.0, -theta));
    m(0, 0) = plus;
    m(1, 1) = minus;
    m(2, 2) = minus;
    m(3, 3) = plus;
    return m;
}

void add_x_half_layer(GateList& list, const TFIMParams& params, double dt,
                      bool controlled_mode, int ancilla) {
    // exp(+i g dt/2 X_j) on every site
    const double theta = params.field * dt / 2.0;
    const CMatrix rot = x_rotation(theta);
    for (int j = 0; j < params.sites; ++j) {
        if (controlled_mode) {
            list.add(controlled(rot), j, ancilla);
        } else {
            list.add(rot, j);
        }
    }
}

void add_zz_layer(GateList& list, const TFIMParams& params, double dt,
                  bool controlled_mode, int ancilla) {
    // exp(+i J dt Z_j Z_k) over the ring bonds, even bonds then odd bonds
    const double theta = params.coupling * dt;
    const CMatrix zz = zz_rotation(theta);
    CMatrix zrot = CMatrix::Zero(2, 2);
    zrot(0, 0) = std::exp(Complex(0.0, theta));
    zrot(1, 1) = std::exp(Complex(0.0, -theta));
    const CMatrix czrot = controlled(zrot);
    const int bonds = (params.sites >= 3) ? params.sites : 1;
    for (int parity = 0; parity < 2; ++parity) {
        for (int b = parity; b < bonds; b += 2) {
            const int j = b;
            const int k = (b + 1) % params.sites;
            if (!controlled_mode) {
                list.add(zz, j, k);
                continue;
            }
            // c-exp(i theta Z_j Z_k) = CNOT(j -> k) . c-exp(i theta Z_k) . CNOT
            list.add(cnot_matrix(), k, j);
            list.add(czrot, k, ancilla);
            list.add(cnot_matrix(), k, j);
        }
    }
}

} // namespace

GateList evolution_circuit(const TFIMParams& params, double scale, double shift,
                           double t, bool controlled_mode, int ancilla,
                           int steps_per_unit) {
    params.validate();
    if (!(t > 0.0) || steps_per_unit < 1) {
        throw BadParametersError("evolution_circuit: bad time or splitting");
    }
    GateList list;
    list.qubits = params.sites + (controlled_mode ? 1 : 0);
    if (controlled_mode && ancilla != params.sites) {
        throw BadTargetsError("evolution_circuit: ancilla must be the qubit "
                              "above the system register");
    }

    const double tau = scale * t; // physical evolution time
    const int steps = std::max(
        1, static_cast<int>(std::ceil(tau * steps_per_unit - 1e-12)));
    const double dt = tau / steps;
    for (int s = 0; s < steps; ++s) {
        add_x_half_layer(list, params, dt, controlled_mode, ancilla);
        add_zz_layer(list, params, dt, controlled_mode, ancilla);
        add_x_half_layer(list, params, dt, controlled_mode, ancilla);
    }
    if (controlled_mode && shift != 0.0) {
        // exp(-i(scale*H + shift)t) = e^{-i shift t} exp(-i scale H t); the
        // scalar phase must ride on the ancilla when controlled.
        list.add(phase_gate(-shift * t), ancilla);
    }
    list.evolution_time = tau;
    return list;
}

GateList trotter_circuit(const TFIMParams& params, const SpectrumBounds& bounds,
                         double t, bool controlled_mode, int ancilla,
                         int steps_per_unit) {
    bounds.validate();
    const double scale = std::numbers::pi / bounds.width();
    return evolution_circuit(params, scale, -scale * bounds.lower, t,
                             controlled_mode, ancilla, steps_per_unit);
}

void apply_circuit(CVector& state, const GateList& circuit) {
    for (const auto& g : circuit.gates) {
        apply_gate_in_place(state, g.matrix,
                            std::span<const int>(g.targets.data(),
                                                 std::size_t(g.arity)));
    }
}

namespace {

void apply_pauli(CVector& state, int which, int qubit) {
    // which: 0 = X, 1 = Y, 2 = Z
    const Eigen::Index bit = Eigen::Index(1) << qubit;
    const Eigen::Index dim = state.size();
    Complex* s = state.data();
    switch (which) {
    case 0:
        for (Eigen::Index i = 0; i < dim; ++i) {
            if (i & bit) continue;
            std::swap(s[i], s[i | bit]);
        }
        break;
    case 1:
        for (Eigen::Index i = 0; i < dim; ++i) {
            if (i & bit) continue;
            const Complex a0 = s[i];
            s[i] = Complex(0, -1) * s[i | bit];
            s[i | bit] = Complex(0, 1) * a0;
        }
        break;
    default:
        for (Eigen::Index i = 0; i < dim; ++i) {
            if (i & bit) s[i] = -s[i];
        }
        break;
    }
}

} // namespace

void apply_random_pauli(CVector& state, const Gate& g, RngStream& rng) {
    if (g.arity == 2) {
        // uniformly one of the 15 non-identity two-qubit Paulis
        const auto idx = rng.uniform_int(15) + 1;
        const int low = int(idx % 4), high = int(idx / 4);
        if (low != 0) apply_pauli(state, low - 1, g.targets[0]);
        if (high != 0) apply_pauli(state, high - 1, g.targets[1]);
    } else {
        apply_pauli(state, int(rng.uniform_int(3)), g.targets[0]);
    }
}

void apply_noisy(CVector& state, const GateList& circuit,
                 const NoiseModel& noise, RngStream& rng) {
    noise.validate();
    if (noise.is_zero()) {
        apply_circuit(state, circuit);
        return;
    }
    for (const auto& g : circuit.gates) {
        apply_gate_in_place(state, g.matrix,
                            std::span<const int>(g.targets.data(),
                                                 std::size_t(g.arity)));
        const double p = (g.arity == 2) ? noise.p2 : noise.p1;
        if (p > 0.0 && rng.bernoulli(p)) {
            apply_random_pauli(state, g, rng);
        }
    }
}

const std::vector<CMatrix>& RepeatedEvolution::power_cache() const {
    if (powers_.empty() && steps > 0) {
        powers_.push_back(system_step);
        long span = 1;
        while (span * 2 <= steps) {
            powers_.push_back(powers_.back() * powers_.back());
            span *= 2;
        }
    }
    return powers_;
}

RepeatedEvolution repeated_evolution(const TFIMParams& params, double scale,
                                     double shift, double t,
                                     int steps_per_unit) {
    params.validate();
    if (!(t > 0.0) || steps_per_unit < 1) {
        throw BadParametersError("repeated_evolution: bad time or splitting");
    }
    const double tau = scale * t;
    const long steps =
        std::max<long>(1, long(std::llround(std::ceil(tau * steps_per_unit -
                                                      1e-12))));
    const double dt = tau / double(steps);

    RepeatedEvolution evo;
    evo.qubits = params.sites + 1;
    evo.steps = steps;
    evo.ancilla_phase = -shift * t;
    evo.evolution_time = tau;

    evo.step.qubits = evo.qubits;
    add_x_half_layer(evo.step, params, dt, true, params.sites);
    add_zz_layer(evo.step, params, dt, true, params.sites);
    add_x_half_layer(evo.step, params, dt, true, params.sites);

    GateList plain;
    plain.qubits = params.sites;
    add_x_half_layer(plain, params, dt, false, -1);
    add_zz_layer(plain, params, dt, false, -1);
    add_x_half_layer(plain, params, dt, false, -1);
    evo.system_step = plain.to_dense();
    return evo;
}

} // namespace aff
