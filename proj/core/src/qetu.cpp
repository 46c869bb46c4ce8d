#include "affqetu/qetu.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

namespace aff {

namespace {

/// Split a shot range over up to `threads` workers; worker results must be
/// order-independent (counts, min-score reductions).
template <typename Fn>
void parallel_shots(long total, int threads, Fn&& worker) {
    const int n = std::max(1, std::min<int>(threads,
        int(std::thread::hardware_concurrency() ?
            std::thread::hardware_concurrency() : 1)));
    if (n == 1 || total < 2 * n) {
        worker(0L, total);
        return;
    }
    std::vector<std::thread> pool;
    const long chunk = (total + n - 1) / n;
    for (int w = 0; w < n; ++w) {
        const long lo = w * chunk;
        const long hi = std::min<long>(total, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&worker, lo, hi] { worker(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

} // namespace

PostSelectionResult qetu_execute_exact(const CVector& state,
                                       const QSPPhases& phases,
                                       const HermitianOperator& h_t) {
    phases.validate();
    if (state.size() != h_t.dim()) {
        throw DimensionMismatchError("qetu_execute: state/operator mismatch");
    }
    const auto& decomp = h_t.decomposition();
    const Eigen::Index dim = state.size();
    CMatrix u(dim, dim);
    {
        CVector phase_vec(dim);
        for (Eigen::Index j = 0; j < dim; ++j) {
            phase_vec(j) = std::exp(Complex(0.0, -decomp.eigenvalues(j)));
        }
        u = decomp.eigenvectors * phase_vec.asDiagonal() *
            decomp.eigenvectors.adjoint();
    }

    // register split into ancilla-0 / ancilla-1 blocks
    CVector block0 = state;
    CVector block1 = CVector::Zero(dim);
    const int eta = phases.degree();
    auto ancilla_rotation = [&](double phi) {
        const double c = std::cos(phi);
        const Complex is(0.0, std::sin(phi));
        CVector new0 = c * block0 + is * block1;
        CVector new1 = is * block0 + c * block1;
        block0.swap(new0);
        block1.swap(new1);
    };
    ancilla_rotation(phases.phases[0]);
    for (int k = 1; k <= eta; ++k) {
        if (k % 2 == 1) {
            block1 = u * block1;
        } else {
            block1 = u.adjoint() * block1;
        }
        ancilla_rotation(phases.phases[std::size_t(k)]);
    }
    const double p = block0.squaredNorm();
    if (p < 1e-280) {
        throw NoAcceptedShotsError(
            "qetu_execute: post-selection probability underflow");
    }
    return PostSelectionResult{block0 / std::sqrt(p), p, 0, 0};
}

namespace {

/// Full flattened filter circuit on (system + ancilla).
GateList assemble_qetu_circuit(const QSPPhases& phases, const GateList& cu) {
    const int eta = phases.degree();
    const int ancilla = cu.qubits - 1;
    const GateList cu_dag = cu.dagger();
    GateList full;
    full.qubits = cu.qubits;
    auto add_rotation = [&](double phi) {
        CMatrix m(2, 2);
        const Complex is(0.0, std::sin(phi));
        m << std::cos(phi), is, is, std::cos(phi);
        full.add(m, ancilla);
    };
    add_rotation(phases.phases[0]);
    for (int k = 1; k <= eta; ++k) {
        const GateList& block = (k % 2 == 1) ? cu : cu_dag;
        full.gates.insert(full.gates.end(), block.gates.begin(),
                          block.gates.end());
        full.evolution_time += block.evolution_time;
        add_rotation(phases.phases[std::size_t(k)]);
    }
    return full;
}

} // namespace

PostSelectionResult qetu_execute_sampled(const CVector& state,
                                         const QSPPhases& phases,
                                         const GateList& cu,
                                         const NoiseModel& noise,
                                         const ShotBudget& shots,
                                         int threads) {
    phases.validate();
    noise.validate();
    if (shots.total_shots < 1) {
        throw BadParametersError("qetu_execute_sampled: needs >= 1 shot");
    }
    const Eigen::Index dim = state.size();
    if ((Eigen::Index(1) << (cu.qubits - 1)) != dim) {
        throw DimensionMismatchError("qetu_execute_sampled: register mismatch");
    }
    const GateList full = assemble_qetu_circuit(phases, cu);
    const RngStream base(shots.rng_seed);

    std::mutex merge_mutex;
    long accepted = 0;
    std::uint64_t best_score = ~std::uint64_t(0);
    CVector chosen;

    parallel_shots(shots.total_shots, threads, [&](long lo, long hi) {
        long local_accepted = 0;
        std::uint64_t local_best = ~std::uint64_t(0);
        CVector local_state;
        CVector work(2 * dim);
        for (long s = lo; s < hi; ++s) {
            RngStream rng = base.split(std::uint64_t(s));
            work.head(dim) = state;
            work.tail(dim).setZero();
            apply_noisy(work, full, noise, rng);
            const double p0 = work.head(dim).squaredNorm();
            if (rng.uniform() < p0) {
                ++local_accepted;
                // uniform choice among accepted shots via deterministic score
                const std::uint64_t score =
                    splitmix64(shots.rng_seed ^ splitmix64(std::uint64_t(s)));
                if (score < local_best) {
                    local_best = score;
                    local_state = work.head(dim) / std::sqrt(p0);
                }
            }
        }
        std::lock_guard<std::mutex> lock(merge_mutex);
        accepted += local_accepted;
        if (local_accepted > 0 && local_best < best_score) {
            best_score = local_best;
            chosen = std::move(local_state);
        }
    });

    if (accepted == 0) {
        throw NoAcceptedShotsError(
            "qetu_execute_sampled: all " + std::to_string(shots.total_shots) +
            " shots measured ancilla 1 (overlap with the kept band too small)");
    }
    return PostSelectionResult{std::move(chosen),
                               double(accepted) / double(shots.total_shots),
                               accepted, shots.total_shots};
}

PostSelectionResult qetu_execute(const CVector& state, const QSPPhases& phases,
                                 const HermitianOperator& h_transformed,
                                 const GateList& cu, const NoiseModel& noise,
                                 const ShotBudget& shots, SimMode mode,
                                 int threads) {
    if (mode == SimMode::Exact) {
        if (!noise.is_zero()) {
            throw BadParametersError("qetu_execute: exact mode requires zero noise");
        }
        return qetu_execute_exact(state, phases, h_transformed);
    }
    return qetu_execute_sampled(state, phases, cu, noise, shots, threads);
}

Complex moment_exact(const CVector& state, const HermitianOperator& h,
                     double t) {
    const auto& decomp = h.decomposition();
    if (state.size() != decomp.dim()) {
        throw DimensionMismatchError("moment_exact: state/operator mismatch");
    }
    const CVector coeffs = decomp.eigenvectors.adjoint() * state;
    Complex m(0.0, 0.0);
    for (Eigen::Index j = 0; j < coeffs.size(); ++j) {
        m += std::norm(coeffs(j)) *
             std::exp(Complex(0.0, -decomp.eigenvalues(j) * t));
    }
    return m;
}

namespace {

long sample_binomial(long shots, double p, RngStream& rng) {
    long hits = 0;
    for (long s = 0; s < shots; ++s) {
        if (rng.uniform() < p) ++hits;
    }
    return hits;
}

GateList assemble_hadamard_circuit(const GateList& cu, MomentPart part) {
    const int ancilla = cu.qubits - 1;
    GateList full;
    full.qubits = cu.qubits;
    const CMatrix h = hadamard_matrix();
    full.add(h, ancilla);
    if (part == MomentPart::Imag) {
        CMatrix sdag = CMatrix::Zero(2, 2);
        sdag(0, 0) = 1.0;
        sdag(1, 1) = Complex(0.0, -1.0);
        full.add(sdag, ancilla);
    }
    full.gates.insert(full.gates.end(), cu.gates.begin(), cu.gates.end());
    full.evolution_time += cu.evolution_time;
    full.add(h, ancilla);
    return full;
}

} // namespace

double hadamard_test(const CVector& state, const HermitianOperator& h,
                     double t, MomentPart part, const ShotBudget& shots,
                     const NoiseModel& noise, SimMode mode, const GateList* cu,
                     int threads) {
    if (mode == SimMode::Exact) {
        if (!noise.is_zero()) {
            throw BadParametersError("hadamard_test: exact mode requires zero noise");
        }
        const Complex m = moment_exact(state, h, t);
        const double x = (part == MomentPart::Real) ? m.real() : m.imag();
        if (shots.total_shots == 0) return x;
        RngStream rng(shots.rng_seed);
        const long n0 = sample_binomial(shots.total_shots, (1.0 + x) / 2.0, rng);
        return 2.0 * double(n0) / double(shots.total_shots) - 1.0;
    }
    if (cu == nullptr) {
        throw BadParametersError("hadamard_test: trotter mode needs a circuit");
    }
    if (shots.total_shots < 1) {
        throw BadParametersError("hadamard_test: trotter mode needs >= 1 shot");
    }
    const GateList full = assemble_hadamard_circuit(*cu, part);
    const Eigen::Index dim = state.size();
    const RngStream base(shots.rng_seed);
    std::atomic<long> zeros{0};
    parallel_shots(shots.total_shots, threads, [&](long lo, long hi) {
        long local = 0;
        CVector work(2 * dim);
        for (long s = lo; s < hi; ++s) {
            RngStream rng = base.split(std::uint64_t(s));
            work.head(dim) = state;
            work.tail(dim).setZero();
            apply_noisy(work, full, noise, rng);
            const double p0 = work.head(dim).squaredNorm();
            if (rng.uniform() < p0) ++local;
        }
        zeros += local;
    });
    return 2.0 * double(zeros.load()) / double(shots.total_shots) - 1.0;
}

Complex estimate_moment(const CVector& state, const HermitianOperator& h,
                        double t, const ShotBudget& shots,
                        const NoiseModel& noise, SimMode mode,
                        const GateList* cu, int threads) {
    ShotBudget re_shots{shots.total_shots, splitmix64(shots.rng_seed ^ 0x5ea1)};
    ShotBudget im_shots{shots.total_shots, splitmix64(shots.rng_seed ^ 0x1a6e)};
    const double re = hadamard_test(state, h, t, MomentPart::Real, re_shots,
                                    noise, mode, cu, threads);
    const double im = hadamard_test(state, h, t, MomentPart::Imag, im_shots,
                                    noise, mode, cu, threads);
    return Complex(re, im);
}

namespace {

/// Per-gate survive probabilities of one step, plus their running products.
struct StepNoiseProfile {
    std::vector<double> survive;
    std::vector<double> prefix; ///< prefix[i] = prod_{j<i} survive[j]
    double step_survive = 1.0;

    StepNoiseProfile(const GateList& step, const NoiseModel& noise) {
        survive.reserve(step.gates.size());
        prefix.reserve(step.gates.size());
        double acc = 1.0;
        for (const auto& g : step.gates) {
            const double p = (g.arity == 2) ? noise.p2 : noise.p1;
            prefix.push_back(acc);
            survive.push_back(1.0 - p);
            acc *= 1.0 - p;
        }
        step_survive = acc;
    }
};

/// Apply `count` clean steps to the ancilla-one block via binary powers;
/// short runs go through the single-step matrix directly.
void apply_clean_steps(CVector& work, Eigen::Index dim,
                       const std::vector<CMatrix>& powers, long count) {
    if (count <= 4) {
        for (long s = 0; s < count; ++s) {
            work.tail(dim) = powers[0] * work.tail(dim);
        }
        return;
    }
    int bit = 0;
    while (count > 0) {
        if (count & 1) {
            work.tail(dim) = powers[std::size_t(bit)] * work.tail(dim);
        }
        count >>= 1;
        ++bit;
    }
}

/// One step with at least one error event; `first_error_u` is uniform on
/// (0, 1 - step_survive) and selects the first failing gate.
void apply_erroring_step(CVector& work, const GateList& step,
                         const StepNoiseProfile& profile, double first_error_u,
                         const NoiseModel& noise, RngStream& rng) {
    const auto n = step.gates.size();
    std::size_t fail_at = n - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double weight = profile.prefix[i] * (1.0 - profile.survive[i]);
        if (first_error_u < acc + weight) {
            fail_at = i;
            break;
        }
        acc += weight;
    }
    for (std::size_t i = 0; i <= fail_at; ++i) {
        const auto& g = step.gates[i];
        apply_gate_in_place(work, g.matrix,
                            std::span<const int>(g.targets.data(),
                                                 std::size_t(g.arity)));
    }
    apply_random_pauli(work, step.gates[fail_at], rng);
    for (std::size_t i = fail_at + 1; i < n; ++i) {
        const auto& g = step.gates[i];
        apply_gate_in_place(work, g.matrix,
                            std::span<const int>(g.targets.data(),
                                                 std::size_t(g.arity)));
        const double p = (g.arity == 2) ? noise.p2 : noise.p1;
        if (p > 0.0 && rng.bernoulli(p)) {
            apply_random_pauli(work, g, rng);
        }
    }
}

/// Single-qubit gate on the ancilla plus its depolarizing site.
void ancilla_gate(CVector& work, int ancilla, const CMatrix& gate,
                  const NoiseModel& noise, RngStream& rng) {
    const int t[] = {ancilla};
    apply_gate_in_place(work, gate, t);
    if (noise.p1 > 0.0 && rng.bernoulli(noise.p1)) {
        const Gate g{gate, {ancilla, -1}, 1};
        apply_random_pauli(work, g, rng);
    }
}

double repeated_trajectory_p0(const CVector& state,
                              const RepeatedEvolution& evo, MomentPart part,
                              const StepNoiseProfile& profile,
                              const NoiseModel& noise,
                              const std::vector<CMatrix>& powers,
                              RngStream& rng, CVector& work) {
    const Eigen::Index dim = state.size();
    const int ancilla = evo.qubits - 1;
    work.head(dim) = state;
    work.tail(dim).setZero();

    ancilla_gate(work, ancilla, hadamard_matrix(), noise, rng);
    if (part == MomentPart::Imag) {
        CMatrix sdag = CMatrix::Zero(2, 2);
        sdag(0, 0) = 1.0;
        sdag(1, 1) = Complex(0.0, -1.0);
        ancilla_gate(work, ancilla, sdag, noise, rng);
    }

    long remaining = evo.steps;
    const double s = profile.step_survive;
    while (remaining > 0) {
        if (noise.is_zero() || s >= 1.0) {
            apply_clean_steps(work, dim, powers, remaining);
            remaining = 0;
            break;
        }
        const double u = std::max(rng.uniform(), 1e-300);
        const long clean = long(std::floor(std::log(u) / std::log(s)));
        if (clean >= remaining) {
            apply_clean_steps(work, dim, powers, remaining);
            remaining = 0;
            break;
        }
        apply_clean_steps(work, dim, powers, clean);
        remaining -= clean;
        const double v = rng.uniform() * (1.0 - s);
        apply_erroring_step(work, evo.step, profile, v, noise, rng);
        remaining -= 1;
    }

    if (evo.ancilla_phase != 0.0) {
        CMatrix ph = CMatrix::Zero(2, 2);
        ph(0, 0) = 1.0;
        ph(1, 1) = std::exp(Complex(0.0, evo.ancilla_phase));
        ancilla_gate(work, ancilla, ph, noise, rng);
    }
    ancilla_gate(work, ancilla, hadamard_matrix(), noise, rng);
    return work.head(dim).squaredNorm();
}

} // namespace

double hadamard_test_repeated(const CVector& state, MomentPart part,
                              const RepeatedEvolution& evo,
                              const ShotBudget& shots, const NoiseModel& noise,
                              int threads) {
    noise.validate();
    if (shots.total_shots < 1) {
        throw BadParametersError("hadamard_test_repeated: needs >= 1 shot");
    }
    const Eigen::Index dim = state.size();
    if ((Eigen::Index(1) << (evo.qubits - 1)) != dim) {
        throw DimensionMismatchError("hadamard_test_repeated: register mismatch");
    }
    const StepNoiseProfile profile(evo.step, noise);
    const auto& powers = evo.power_cache(); // built before threads share it
    const RngStream base(shots.rng_seed);
    std::atomic<long> zeros{0};
    parallel_shots(shots.total_shots, threads, [&](long lo, long hi) {
        long local = 0;
        CVector work(2 * dim);
        for (long sidx = lo; sidx < hi; ++sidx) {
            RngStream rng = base.split(std::uint64_t(sidx));
            const double p0 = repeated_trajectory_p0(state, evo, part, profile,
                                                     noise, powers, rng, work);
            if (rng.uniform() < p0) ++local;
        }
        zeros += local;
    });
    return 2.0 * double(zeros.load()) / double(shots.total_shots) - 1.0;
}

Complex estimate_moment_repeated(const CVector& state,
                                 const RepeatedEvolution& evo,
                                 const ShotBudget& shots,
                                 const NoiseModel& noise, int threads) {
    ShotBudget re{shots.total_shots, splitmix64(shots.rng_seed ^ 0x5ea1)};
    ShotBudget im{shots.total_shots, splitmix64(shots.rng_seed ^ 0x1a6e)};
    return Complex(
        hadamard_test_repeated(state, MomentPart::Real, evo, re, noise, threads),
        hadamard_test_repeated(state, MomentPart::Imag, evo, im, noise, threads));
}

} // namespace aff
