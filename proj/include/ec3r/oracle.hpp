#pragma once

// Classical side of the simulator: exhaustive satisfying counts, probability
// sequences and the clause-overlap bounds every quantum result is checked
// against.

#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "ec3r/instance.hpp"
#include "ec3r/io_util.hpp"
#include "ec3r/rational.hpp"

namespace ec3r {

struct ClauseEval {
    bool satisfied;
    int h; // Boolean penalty, 1 - satisfied
};

inline ClauseEval eval_clause(const Clause& clause, const Assignment& a) {
    if (clause.k > a.n()) throw std::invalid_argument("clause index exceeds assignment length");
    int ones = a.bit(clause.i) + a.bit(clause.j) + a.bit(clause.k);
    bool sat = ones == 1;
    return {sat, sat ? 0 : 1};
}

namespace detail {

// Mask with bits of the clause set; a basis index satisfies the clause iff
// exactly one masked bit is set.
inline std::uint32_t clause_mask(const Clause& c, int n) {
    std::uint32_t m = 0;
    for (int idx : c.indices()) m |= 1u << (n - idx);
    return m;
}

inline std::vector<std::uint32_t> clause_masks(const Ec3Instance& inst) {
    std::vector<std::uint32_t> masks;
    masks.reserve(inst.clauses.size());
    for (const Clause& c : inst.clauses) masks.push_back(clause_mask(c, inst.n));
    return masks;
}

// Partition [0, 2^n) across workers, collect per-worker results, merge in
// worker order so the outcome does not depend on scheduling.
template <typename PerItem>
void enumerate_assignments(int n, PerItem&& per_item) {
    const std::uint64_t total = 1ull << n;
    unsigned workers = worker_count();
    if (workers <= 1 || total < (1u << 16)) {
        for (std::uint64_t z = 0; z < total; ++z) per_item(static_cast<std::uint32_t>(z), 0u);
        return;
    }
    std::vector<std::thread> pool;
    std::uint64_t chunk = (total + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        std::uint64_t lo = w * chunk, hi = std::min(total, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi, w] {
            for (std::uint64_t z = lo; z < hi; ++z) per_item(static_cast<std::uint32_t>(z), w);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace detail

inline void check_enumeration_guard(const Ec3Instance& inst) {
    inst.validate();
    if (inst.n > kMaxBits)
        throw std::invalid_argument("exhaustive enumeration refused for n > 30 (exponential oracle)");
}

// All assignments satisfying every clause, ascending by basis index.
inline std::vector<Assignment> brute_force_solutions(const Ec3Instance& inst) {
    check_enumeration_guard(inst);
    auto masks = detail::clause_masks(inst);
    unsigned workers = worker_count();
    std::vector<std::vector<std::uint32_t>> found(std::max(1u, workers));
    detail::enumerate_assignments(inst.n, [&](std::uint32_t z, unsigned w) {
        for (std::uint32_t m : masks)
            if (std::popcount(z & m) != 1) return;
        found[w].push_back(z);
    });
    std::vector<Assignment> out;
    for (auto& part : found)
        for (std::uint32_t z : part) out.emplace_back(inst.n, z);
    std::sort(out.begin(), out.end(),
              [](const Assignment& a, const Assignment& b) { return a.index() < b.index(); });
    return out;
}

// N_k: assignments satisfying the first k clauses; N_0 = 2^n.
inline long long count_satisfying_prefix(const Ec3Instance& inst, int k) {
    check_enumeration_guard(inst);
    if (k < 0 || k > inst.clause_count()) throw std::invalid_argument("prefix length out of range");
    if (k == 0) return 1ll << inst.n;
    auto masks = detail::clause_masks(inst);
    std::vector<long long> partial(64, 0);
    detail::enumerate_assignments(inst.n, [&](std::uint32_t z, unsigned w) {
        for (int c = 0; c < k; ++c)
            if (std::popcount(z & masks[static_cast<std::size_t>(c)]) != 1) return;
        ++partial[w];
    });
    long long total = 0;
    for (long long p : partial) total += p;
    return total;
}

// Exact p_k = N_k / N_{k-1}. Once some N_k hits zero the later ratios are
// undefined, mirroring the protocol's stopping logic, and stay nullopt.
struct ProbabilitySequence {
    std::vector<long long> counts;                 // N_0 .. N_M
    std::vector<std::optional<Rational>> values;   // p_1 .. p_M
};

inline ProbabilitySequence p_sequence(const Ec3Instance& inst) {
    check_enumeration_guard(inst);
    const int m = inst.clause_count();
    auto masks = detail::clause_masks(inst);
    // single sweep: an assignment satisfying exactly the first f clauses
    // contributes to N_0..N_f
    std::vector<std::vector<long long>> partial(64, std::vector<long long>(static_cast<std::size_t>(m) + 1, 0));
    detail::enumerate_assignments(inst.n, [&](std::uint32_t z, unsigned w) {
        int f = 0;
        while (f < m && std::popcount(z & masks[static_cast<std::size_t>(f)]) == 1) ++f;
        ++partial[w][static_cast<std::size_t>(f)];
    });

    ProbabilitySequence seq;
    seq.counts.assign(static_cast<std::size_t>(m) + 1, 0);
    std::vector<long long> exact(static_cast<std::size_t>(m) + 1, 0);
    for (auto& p : partial)
        for (int f = 0; f <= m; ++f) exact[static_cast<std::size_t>(f)] += p[static_cast<std::size_t>(f)];
    long long acc = 0;
    for (int k = m; k >= 0; --k) {
        acc += exact[static_cast<std::size_t>(k)];
        seq.counts[static_cast<std::size_t>(k)] = acc;
    }
    for (int k = 1; k <= m; ++k) {
        long long prev = seq.counts[static_cast<std::size_t>(k - 1)];
        if (prev == 0)
            seq.values.push_back(std::nullopt);
        else
            seq.values.push_back(Rational(seq.counts[static_cast<std::size_t>(k)], prev));
    }
    return seq;
}

// Number of the clause's indices appearing anywhere in the prior clauses.
inline int shared_bits_S(const Clause& clause, std::span<const Clause> priors) {
    if (priors.empty()) throw std::invalid_argument("shared_bits_S requires non-empty priors");
    int s = 0;
    for (int idx : clause.indices())
        for (const Clause& p : priors)
            if (p.contains(idx)) { ++s; break; }
    return s;
}

// Worst-case nonzero p_k by clause overlap S.
struct PBound {
    bool exact;          // the value is forced, not merely bounded
    bool zero_possible;  // p_k = 0 is reachable
    Rational bound;      // 3/8, 1/4, 1/18 or 1/27
};

inline PBound p_lower_bound(int s) {
    switch (s) {
        case 0: return {true, false, Rational(3, 8)};
        case 1: return {false, false, Rational(1, 4)};
        case 2: return {false, true, Rational(1, 18)};
        case 3: return {false, true, Rational(1, 27)};
        default: throw std::invalid_argument("S must be in {0,1,2,3}");
    }
}

// Basis indices satisfying the first k clauses, ascending. The protocol uses
// these to build the round's reference states.
inline std::vector<std::uint32_t> satisfying_prefix_indices(const Ec3Instance& inst, int k) {
    check_enumeration_guard(inst);
    if (k < 0 || k > inst.clause_count()) throw std::invalid_argument("prefix length out of range");
    auto masks = detail::clause_masks(inst);
    std::vector<std::uint32_t> out;
    for (std::uint64_t z = 0; z < (1ull << inst.n); ++z) {
        bool ok = true;
        for (int c = 0; c < k && ok; ++c)
            ok = std::popcount(static_cast<std::uint32_t>(z) & masks[static_cast<std::size_t>(c)]) == 1;
        if (ok) out.push_back(static_cast<std::uint32_t>(z));
    }
    return out;
}

} // namespace ec3r
