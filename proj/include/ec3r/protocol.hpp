#pragma once

// Multi-round driver: round preparation, resonance evolution, the
// measure-until-decay loop, success-conditioned purification, zero-p_k
// detection and final solution extraction. A single run is sequential by
// nature (each round feeds the next); independent runs share nothing.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "ec3r/evolve.hpp"
#include "ec3r/hamiltonian.hpp"
#include "ec3r/instance.hpp"
#include "ec3r/oracle.hpp"
#include "ec3r/rational.hpp"
#include "ec3r/reduced.hpp"
#include "ec3r/rng.hpp"
#include "ec3r/statevector.hpp"

namespace ec3r {

// Smallest nonzero p_k under the clause-overlap analysis; drives the
// zero-p_k stopping rule.
inline constexpr double kPMinNonzero = 1.0 / 27.0;

enum class TimeMode { oracle_informed, time_scan };
enum class RoundVerdict { projected, zero_pk, budget_exhausted };
enum class RunStatus { sat, unsat_detected, inconclusive };

struct ProtocolParams {
    double omega = 1.0;
    double c = 0.02;
    TimeMode t_mode = TimeMode::time_scan;
    int purify_successes = -1; // -1: default to the clause count M
    int max_trials_per_round = 10000;
    std::uint64_t seed = 0;
    int scan_points = 240;
    double scan_t_max = -1.0; // -1: auto-bracket the slowest nonzero resonance
    double extract_threshold = 0.5;
    bool relax_coupling_guard = false;
    EvolveOptions evolve;

    void validate() const {
        if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
        if (!(c > 0.0)) throw std::invalid_argument("coupling c must be positive");
        if (!relax_coupling_guard && c > omega / 10.0)
            throw std::invalid_argument("weak-coupling guard: c <= omega/10");
        if (max_trials_per_round < 1) throw std::invalid_argument("max_trials_per_round must be >= 1");
        if (purify_successes < -1) throw std::invalid_argument("purify_successes must be >= 0 (or -1 for default)");
        if (scan_points < 2) throw std::invalid_argument("scan_points must be >= 2");
        if (scan_t_max != -1.0 && !(scan_t_max > 0.0))
            throw std::invalid_argument("scan_t_max must be positive (or -1 for auto)");
        if (!(extract_threshold > 0.0 && extract_threshold < 1.0))
            throw std::invalid_argument("extract_threshold must lie in (0, 1)");
    }

    double resolved_scan_t_max() const {
        return scan_t_max > 0.0 ? scan_t_max
                                : 1.05 * std::numbers::pi / (2.0 * c * std::sqrt(kPMinNonzero));
    }
};

// |1> probe, |0> ancilla, problem register as given.
inline StateVector prepare_round_input(const Eigen::VectorXcd& problem_state) {
    if (std::abs(problem_state.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("problem state must be normalized");
    Eigen::Index size = problem_state.size();
    StateVector v = StateVector::Zero(4 * size);
    v.segment(2 * size, size) = problem_state;
    return v;
}

inline double resonance_evolution_time(double p_k, double c) {
    if (!(c > 0.0)) throw std::invalid_argument("resonance time requires c > 0");
    if (!(p_k > 0.0))
        throw std::domain_error("resonance time undefined for p_k = 0: use the time-scan path");
    if (p_k > 1.0) throw std::invalid_argument("p_k must lie in (0, 1]");
    return std::numbers::pi / (2.0 * c * std::sqrt(p_k));
}

inline double resonance_evolution_time(const Rational& p_k, double c) {
    return resonance_evolution_time(p_k.to_double(), c);
}

// Probe decay probability after evolving a fresh copy of `state` to each grid
// time. Grid points are independent, so they are parallelized over workers;
// storage by index keeps the result deterministic.
struct DecayProfile {
    std::vector<std::pair<double, double>> points;
    double t_best = 0.0;
    double max_decay = 0.0;
};

inline DecayProfile time_scan(const StateVector& state, const ExactPropagator& prop,
                              std::span<const double> t_grid) {
    if (t_grid.empty()) throw std::invalid_argument("time_scan requires a non-empty grid");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1])) throw std::invalid_argument("time_scan grid must ascend");

    std::vector<double> decay(t_grid.size());
    unsigned workers = std::min<std::size_t>(worker_count(), t_grid.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < t_grid.size(); ++i)
            decay[i] = probe_ground_population(prop.evolve(state, t_grid[i]));
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (t_grid.size() + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            std::size_t lo = w * chunk, hi = std::min(t_grid.size(), lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back([&, lo, hi] {
                for (std::size_t i = lo; i < hi; ++i)
                    decay[i] = probe_ground_population(prop.evolve(state, t_grid[i]));
            });
        }
        for (auto& t : pool) t.join();
    }

    DecayProfile profile;
    profile.points.reserve(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        profile.points.emplace_back(t_grid[i], decay[i]);
        if (decay[i] > profile.max_decay) {
            profile.max_decay = decay[i];
            profile.t_best = t_grid[i];
        }
    }
    return profile;
}

// One measurement draw per (master seed, round, trial); outcomes are
// independent of how many draws any other trial consumed.
struct TrialRng {
    std::uint64_t master = 0;
    std::uint64_t round = 0;
    std::uint64_t next_trial = 1;

    CounterRng next() { return CounterRng::derive(master, {round, next_trial++}); }
};

// Oracle-built reference data for one round (simulator-only diagnostics).
struct RoundContext {
    Eigen::VectorXcd phi_prev;    // actual round input
    Eigen::VectorXcd phi_sol;     // uniform over assignments satisfying clauses 1..k (empty if none)
    Eigen::VectorXcd phi_nonsol;  // uniform over the prefix survivors violating clause k (empty if none)
    std::optional<Rational> p_k;
    long long n_prev = 0;
    long long n_k = 0;
};

inline RoundContext make_round_context(const Ec3Instance& inst, int k,
                                       const Eigen::VectorXcd& problem_state,
                                       std::span<const std::uint32_t> prev_indices) {
    const Clause& clause = inst.clauses[static_cast<std::size_t>(k - 1)];
    const std::uint32_t mask = detail::clause_mask(clause, inst.n);
    std::vector<std::uint32_t> sol, nonsol;
    for (std::uint32_t j : prev_indices)
        (std::popcount(j & mask) == 1 ? sol : nonsol).push_back(j);

    RoundContext ctx;
    ctx.phi_prev = problem_state;
    ctx.n_prev = static_cast<long long>(prev_indices.size());
    ctx.n_k = static_cast<long long>(sol.size());
    if (!sol.empty()) ctx.phi_sol = uniform_superposition(sol, inst.n);
    if (!nonsol.empty()) ctx.phi_nonsol = uniform_superposition(nonsol, inst.n);
    if (ctx.n_prev > 0) ctx.p_k = Rational(ctx.n_k, ctx.n_prev);
    return ctx;
}

struct ScanSummary {
    double t_best = 0.0;
    double max_decay = 0.0;
    int points = 0;
    double t_max = 0.0;
};

struct PurifyIteration {
    bool success = false;
    double c1_sq = 0.0;
    double c2_sq = 0.0;
};

struct RoundRecord {
    int k = 0;
    Clause clause;
    std::optional<Rational> p_k; // oracle value
    long long n_prev = 0, n_k = 0;
    int trials_to_first_decay = 0; // 0 when the round never projected
    int spurious_decays = 0;       // decays observed while confirming p_k = 0
    double t_evolve = 0.0;
    std::optional<ScanSummary> scan;
    std::vector<PurifyIteration> purification;
    bool purify_exhausted = false;
    SubspaceDecomposition final_decomposition{};
    double fidelity_vs_oracle = -1.0; // |<phi_sol | next state>|^2, -1 when undefined
    RoundVerdict verdict = RoundVerdict::budget_exhausted;
    double round_ms = 0.0;
};

struct PurifyResult {
    StateVector state;
    std::vector<PurifyIteration> iterations;
    bool exhausted = false;
};

// Success-conditioned purification. Re-prepares |1>|0>|phi'> from the current
// post-decay register, evolves for t0, measures; a ground-state outcome
// advances the state, any other outcome leaves the register unchanged and the
// iteration is retried.
inline PurifyResult purify(const StateVector& post_decay_state, const ExactPropagator& prop,
                           double t0, int successes_target, int max_trials, TrialRng& trials,
                           const RoundContext& ctx) {
    if (successes_target < 0) throw std::invalid_argument("purify: successes target must be >= 0");
    if (!(t0 > 0.0)) throw std::invalid_argument("purify: t0 must be positive");
    PurifyResult result{post_decay_state, {}, false};
    int successes = 0;
    int used = 0;
    while (successes < successes_target) {
        if (used >= max_trials) {
            result.exhausted = true;
            break;
        }
        ++used;
        Eigen::VectorXcd phi = register_state(result.state, 0, 1);
        StateVector evolved = prop.evolve(prepare_round_input(phi), t0);
        CounterRng rng = trials.next();
        MeasurementResult m = measure_probe(evolved, rng);
        PurifyIteration it;
        it.success = m.outcome == 0;
        if (it.success) {
            result.state = std::move(m.collapsed);
            ++successes;
        }
        SubspaceDecomposition d =
            subspace_decompose(result.state, ctx.phi_prev, ctx.phi_sol, ctx.phi_nonsol);
        it.c1_sq = d.c1_sq();
        it.c2_sq = d.c2_sq();
        result.iterations.push_back(it);
    }
    return result;
}

struct RoundOutcome {
    RoundRecord record;
    Eigen::VectorXcd next_problem_state;
    StateVector full_state;
};

namespace detail {

inline std::vector<double> scan_grid(const ProtocolParams& params) {
    std::vector<double> grid(static_cast<std::size_t>(params.scan_points));
    double t_max = params.resolved_scan_t_max();
    for (int i = 0; i < params.scan_points; ++i)
        grid[static_cast<std::size_t>(i)] = t_max * i / (params.scan_points - 1);
    return grid;
}

} // namespace detail

inline RoundOutcome run_round(const Ec3Instance& inst, int k, const Eigen::VectorXcd& problem_state,
                              const ProtocolParams& params, const RoundContext& ctx) {
    params.validate();
    auto started = std::chrono::steady_clock::now();

    StructuredHamiltonian h =
        hamiltonian_for_clause(inst, k, params.omega, params.c, params.relax_coupling_guard);
    ExactPropagator prop(h, params.evolve);
    StateVector prepared = prepare_round_input(problem_state);

    RoundOutcome out;
    RoundRecord& rec = out.record;
    rec.k = k;
    rec.clause = inst.clauses[static_cast<std::size_t>(k - 1)];
    rec.p_k = ctx.p_k;
    rec.n_prev = ctx.n_prev;
    rec.n_k = ctx.n_k;
    out.next_problem_state = problem_state;
    out.full_state = prepared;

    const double ceiling = offres_decay_ceiling(params.c) + 1e-6;
    bool zero_candidate = false;
    double t_evolve = 0.0;

    if (params.t_mode == TimeMode::time_scan) {
        std::vector<double> grid = detail::scan_grid(params);
        DecayProfile profile = time_scan(prepared, prop, grid);
        rec.scan = ScanSummary{profile.t_best, profile.max_decay, params.scan_points,
                               params.resolved_scan_t_max()};
        zero_candidate = profile.max_decay <= ceiling;
        t_evolve = profile.t_best;
    } else {
        if (ctx.p_k.has_value() && ctx.p_k->num() > 0) {
            t_evolve = resonance_evolution_time(*ctx.p_k, params.c);
        } else {
            // oracle says p_k = 0; confirm in-model at the detuned oscillation peak
            t_evolve = std::numbers::pi / (2.0 * std::sqrt(0.25 + params.c * params.c));
            zero_candidate =
                probe_ground_population(prop.evolve(prepared, t_evolve)) <= ceiling;
        }
    }
    rec.t_evolve = t_evolve;

    TrialRng trials{params.seed, static_cast<std::uint64_t>(k)};

    if (zero_candidate) {
        // The ceiling test says the decay stays in the detuned band; confirm
        // with ceil(3 / p_min) consecutive quiet trials at the scanned optimum.
        const int needed = static_cast<int>(std::ceil(3.0 / kPMinNonzero));
        int consecutive = 0;
        int used = 0;
        StateVector evolved = prop.evolve(prepared, t_evolve);
        while (used < params.max_trials_per_round && consecutive < needed) {
            ++used;
            CounterRng rng = trials.next();
            MeasurementResult m = measure_probe(evolved, rng);
            if (m.outcome == 1) {
                ++consecutive;
            } else {
                consecutive = 0;
                ++rec.spurious_decays;
            }
        }
        rec.verdict = consecutive >= needed ? RoundVerdict::zero_pk : RoundVerdict::budget_exhausted;
        rec.final_decomposition =
            subspace_decompose(evolved, ctx.phi_prev, ctx.phi_sol, ctx.phi_nonsol);
        rec.round_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
        return out;
    }

    // resonant path: repeat prepare-evolve-measure until the probe decays
    StateVector evolved = prop.evolve(prepared, t_evolve);
    std::optional<StateVector> post_decay;
    int trial = 0;
    while (trial < params.max_trials_per_round) {
        ++trial;
        CounterRng rng = trials.next();
        MeasurementResult m = measure_probe(evolved, rng);
        if (m.outcome == 0) {
            post_decay = std::move(m.collapsed);
            break;
        }
    }
    if (!post_decay.has_value()) {
        rec.verdict = RoundVerdict::budget_exhausted;
        rec.final_decomposition =
            subspace_decompose(evolved, ctx.phi_prev, ctx.phi_sol, ctx.phi_nonsol);
        rec.round_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
        return out;
    }
    rec.trials_to_first_decay = trial;

    int target = params.purify_successes >= 0 ? params.purify_successes : inst.clause_count();
    double t0 = std::numbers::pi / (2.0 * params.c);
    int purify_budget = params.max_trials_per_round - trial;
    PurifyResult pur = purify(*post_decay, prop, t0, target, std::max(purify_budget, 0), trials, ctx);
    rec.purification = pur.iterations;
    rec.purify_exhausted = pur.exhausted;

    out.full_state = pur.state;
    out.next_problem_state = register_state(pur.state, 0, 1);
    rec.final_decomposition =
        subspace_decompose(pur.state, ctx.phi_prev, ctx.phi_sol, ctx.phi_nonsol);
    rec.verdict = RoundVerdict::projected;
    if (ctx.phi_sol.size() != 0)
        rec.fidelity_vs_oracle = std::norm(ctx.phi_sol.dot(out.next_problem_state));
    rec.round_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    return out;
}

inline RoundOutcome run_round(const Ec3Instance& inst, int k, const Eigen::VectorXcd& problem_state,
                              const ProtocolParams& params) {
    auto prev = satisfying_prefix_indices(inst, k - 1);
    return run_round(inst, k, problem_state, params, make_round_context(inst, k, problem_state, prev));
}

// Analytic last-n-qubit marginal; entries at or above threshold * max weight,
// sorted by weight descending (index ascending on ties).
inline std::vector<std::pair<Assignment, double>> extract_assignments(const StateVector& full_state,
                                                                      int n, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw std::invalid_argument("extraction threshold must lie in (0, 1)");
    Eigen::Index size = Eigen::Index{1} << n;
    if (full_state.size() != 4 * size) throw std::invalid_argument("extract: dimension mismatch");
    Eigen::VectorXd weights = Eigen::VectorXd::Zero(size);
    for (int sector = 0; sector < 4; ++sector)
        for (Eigen::Index j = 0; j < size; ++j)
            weights[j] += std::norm(full_state[sector * size + j]);
    double cutoff = weights.maxCoeff() * threshold;
    std::vector<std::pair<Assignment, double>> out;
    for (Eigen::Index j = 0; j < size; ++j)
        if (weights[j] >= cutoff && weights[j] > 0.0)
            out.emplace_back(Assignment(n, static_cast<std::uint32_t>(j)), weights[j]);
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
}

struct SolutionEntry {
    Assignment assignment;
    double weight;
};

struct RunResult {
    std::vector<RoundRecord> records;
    StateVector final_state;
    std::vector<SolutionEntry> solutions; // classically verified
    int rejected_extractions = 0;
    RunStatus status = RunStatus::inconclusive;
    int stopped_at_round = 0; // k of the zero_pk / exhausted round, 0 otherwise
    double total_ms = 0.0;
};

inline RunResult run_full(const Ec3Instance& inst, const ProtocolParams& params) {
    inst.validate();
    params.validate();
    auto started = std::chrono::steady_clock::now();

    RunResult result;
    Eigen::VectorXcd phi = uniform_register_state(inst.n);
    result.final_state = prepare_round_input(phi);

    std::vector<std::uint32_t> prev_indices(1u << inst.n);
    for (std::uint32_t j = 0; j < prev_indices.size(); ++j) prev_indices[j] = j;

    bool completed = true;
    for (int k = 1; k <= inst.clause_count(); ++k) {
        RoundContext ctx = make_round_context(inst, k, phi, prev_indices);
        RoundOutcome out = run_round(inst, k, phi, params, ctx);
        result.records.push_back(out.record);
        result.final_state = out.full_state;
        if (out.record.verdict == RoundVerdict::zero_pk) {
            result.status = RunStatus::unsat_detected;
            result.stopped_at_round = k;
            completed = false;
            break;
        }
        if (out.record.verdict == RoundVerdict::budget_exhausted) {
            result.status = RunStatus::inconclusive;
            result.stopped_at_round = k;
            completed = false;
            break;
        }
        phi = out.next_problem_state;
        // shrink the oracle index set to the survivors of clause k
        const std::uint32_t mask = detail::clause_mask(inst.clauses[static_cast<std::size_t>(k - 1)], inst.n);
        std::vector<std::uint32_t> next;
        next.reserve(prev_indices.size());
        for (std::uint32_t j : prev_indices)
            if (std::popcount(j & mask) == 1) next.push_back(j);
        prev_indices = std::move(next);
    }

    if (completed) {
        auto extracted = extract_assignments(result.final_state, inst.n, params.extract_threshold);
        for (auto& [assignment, weight] : extracted) {
            bool ok = true;
            for (const Clause& cl : inst.clauses)
                if (!eval_clause(cl, assignment).satisfied) { ok = false; break; }
            if (ok)
                result.solutions.push_back({assignment, weight});
            else
                ++result.rejected_extractions;
        }
        result.status = result.solutions.empty() ? RunStatus::inconclusive : RunStatus::sat;
    }
    result.total_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    return result;
}

} // namespace ec3r
