#pragma once

// Versioned JSON run report. Embeds the fully resolved configuration so a
// report is re-runnable from itself. Amplitude-level fields (oracle blocks,
// decompositions, solution weights) are simulator diagnostics a physical
// device could not produce; they are labelled as such in the document.

#include <string>

#include <json.hpp>

#include "ec3r/instance.hpp"
#include "ec3r/protocol.hpp"

namespace ec3r {

inline const char* to_string(RunStatus s) {
    switch (s) {
        case RunStatus::sat: return "sat";
        case RunStatus::unsat_detected: return "unsat_detected";
        case RunStatus::inconclusive: return "inconclusive";
    }
    return "?";
}

inline const char* to_string(RoundVerdict v) {
    switch (v) {
        case RoundVerdict::projected: return "projected";
        case RoundVerdict::zero_pk: return "zero_pk";
        case RoundVerdict::budget_exhausted: return "budget_exhausted";
    }
    return "?";
}

inline const char* to_string(TimeMode m) {
    return m == TimeMode::oracle_informed ? "oracle_informed" : "time_scan";
}

inline nlohmann::json params_to_json(const Ec3Instance& inst, const ProtocolParams& p) {
    return {
        {"omega", p.omega},
        {"c", p.c},
        {"seed", p.seed},
        {"t_mode", to_string(p.t_mode)},
        {"purify_successes", p.purify_successes >= 0 ? p.purify_successes : inst.clause_count()},
        {"max_trials_per_round", p.max_trials_per_round},
        {"scan_points", p.scan_points},
        {"scan_t_max", p.resolved_scan_t_max()},
        {"extract_threshold", p.extract_threshold},
        {"relax_coupling_guard", p.relax_coupling_guard},
        {"evolve",
         {{"dense_dim_limit", p.evolve.dense_dim_limit},
          {"krylov_tol", p.evolve.krylov_tol},
          {"krylov_max_dim", p.evolve.krylov_max_dim}}},
    };
}

inline nlohmann::json instance_to_json(const Ec3Instance& inst) {
    nlohmann::json clauses = nlohmann::json::array();
    for (const Clause& c : inst.clauses) clauses.push_back({c.i, c.j, c.k});
    return {{"n", inst.n}, {"m", inst.clause_count()}, {"clauses", clauses},
            {"text", serialize_instance(inst)}};
}

inline nlohmann::json round_to_json(const RoundRecord& r) {
    nlohmann::json purification = nlohmann::json::array();
    for (const PurifyIteration& it : r.purification)
        purification.push_back({{"success", it.success}, {"c1_sq", it.c1_sq}, {"c2_sq", it.c2_sq}});

    nlohmann::json j{
        {"k", r.k},
        {"clause", {r.clause.i, r.clause.j, r.clause.k}},
        {"verdict", to_string(r.verdict)},
        {"trials_to_first_decay", r.trials_to_first_decay},
        {"spurious_decays", r.spurious_decays},
        {"t_evolve", r.t_evolve},
        {"purification", purification},
        {"purify_exhausted", r.purify_exhausted},
        {"final_decomposition",
         {{"c0_sq", r.final_decomposition.c0_sq()},
          {"c1_sq", r.final_decomposition.c1_sq()},
          {"c2_sq", r.final_decomposition.c2_sq()},
          {"leakage", r.final_decomposition.leakage}}},
        {"oracle",
         {{"p_k", r.p_k.has_value() ? nlohmann::json(r.p_k->str()) : nlohmann::json()},
          {"n_prev", r.n_prev},
          {"n_k", r.n_k},
          {"fidelity", r.fidelity_vs_oracle}}},
        {"round_ms", r.round_ms},
    };
    if (r.scan.has_value())
        j["scan"] = {{"t_best", r.scan->t_best},
                     {"max_decay", r.scan->max_decay},
                     {"points", r.scan->points},
                     {"t_max", r.scan->t_max}};
    else
        j["scan"] = nullptr;
    return j;
}

inline nlohmann::json run_report(const Ec3Instance& inst, const ProtocolParams& params,
                                 const RunResult& result) {
    nlohmann::json rounds = nlohmann::json::array();
    for (const RoundRecord& r : result.records) rounds.push_back(round_to_json(r));
    nlohmann::json solutions = nlohmann::json::array();
    for (const SolutionEntry& s : result.solutions)
        solutions.push_back({{"assignment", s.assignment.str()}, {"weight", s.weight}});

    return {
        {"report_version", 1},
        {"instance", instance_to_json(inst)},
        {"params", params_to_json(inst, params)},
        {"status", to_string(result.status)},
        {"stopped_at_round", result.stopped_at_round},
        {"solutions", solutions},
        {"rejected_extractions", result.rejected_extractions},
        {"rounds", rounds},
        {"timing", {{"total_ms", result.total_ms}}},
        {"notes",
         "rounds[].oracle, rounds[].final_decomposition and solution weights are "
         "simulator-only diagnostics; a physical device cannot inspect amplitudes"},
    };
}

} // namespace ec3r
