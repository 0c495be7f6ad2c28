#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ec3r/errors.hpp"
#include "ec3r/rng.hpp"

namespace ec3r {

// Simulator bound: state vectors and exhaustive counts both live in 2^n.
inline constexpr int kMaxBits = 30;

// Three distinct 1-based bit indices, stored ascending.
struct Clause {
    int i = 0, j = 0, k = 0;

    static Clause of(int a, int b, int c) {
        std::array<int, 3> v{a, b, c};
        std::sort(v.begin(), v.end());
        if (v[0] < 1) throw std::invalid_argument("clause index must be >= 1");
        if (v[0] == v[1] || v[1] == v[2])
            throw std::invalid_argument("repeated index within clause");
        return Clause{v[0], v[1], v[2]};
    }

    std::array<int, 3> indices() const { return {i, j, k}; }
    bool contains(int idx) const { return idx == i || idx == j || idx == k; }
    bool operator==(const Clause& o) const = default;
    auto operator<=>(const Clause& o) const = default;

    std::string str() const {
        return "(" + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(k) + ")";
    }
};

// A full assignment of the n bits. z1 is the leftmost character of the
// string form and the most significant bit of the basis index, so the
// basis index of "00010111" is 0b00010111 = 23.
class Assignment {
public:
    Assignment(int n, std::uint32_t index) : n_(n), bits_(index) {
        if (n < 1 || n > kMaxBits) throw std::invalid_argument("assignment width out of range");
        if (n < 32 && (index >> n) != 0) throw std::invalid_argument("assignment index exceeds width");
    }

    static Assignment from_string(std::string_view s) {
        if (s.empty() || s.size() > kMaxBits)
            throw std::invalid_argument("assignment string length out of range");
        std::uint32_t v = 0;
        for (char ch : s) {
            if (ch != '0' && ch != '1') throw std::invalid_argument("assignment must be over {0,1}");
            v = (v << 1) | static_cast<std::uint32_t>(ch - '0');
        }
        return Assignment(static_cast<int>(s.size()), v);
    }

    int n() const { return n_; }
    std::uint32_t index() const { return bits_; }

    // 1-based position, z1 first
    int bit(int pos) const { return static_cast<int>((bits_ >> (n_ - pos)) & 1u); }

    std::string str() const {
        std::string s(static_cast<std::size_t>(n_), '0');
        for (int p = 1; p <= n_; ++p) s[static_cast<std::size_t>(p - 1)] = char('0' + bit(p));
        return s;
    }

    bool operator==(const Assignment& o) const = default;

private:
    int n_;
    std::uint32_t bits_;
};

struct Ec3Instance {
    int n = 0;
    std::vector<Clause> clauses;

    int clause_count() const { return static_cast<int>(clauses.size()); }

    void validate() const {
        if (n < 3 || n > kMaxBits) throw std::invalid_argument("instance requires 3 <= n <= 30");
        for (const Clause& c : clauses)
            if (c.k > n) throw std::invalid_argument("clause index exceeds n");
    }

    bool has_duplicate_clauses() const {
        std::set<Clause> seen;
        for (const Clause& c : clauses)
            if (!seen.insert(c).second) return true;
        return false;
    }
};

// --- instance text format ---------------------------------------------------
// comment lines start with "c ", one "p ec3 <n> <m>" header, then m lines of
// three 1-based indices.

inline Ec3Instance parse_instance(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    bool have_header = false;
    Ec3Instance inst;
    long long m_declared = 0;

    auto numeric = [](const std::string& tok) {
        std::size_t start = !tok.empty() && tok[0] == '-' ? 1 : 0;
        return tok.size() > start && tok.find_first_not_of("0123456789", start) == std::string::npos;
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line == "c" || line.rfind("c ", 0) == 0) continue;

        std::istringstream ls(line);
        if (line.rfind("p", 0) == 0) {
            if (have_header) throw ParseError(lineno, "duplicate header");
            std::string p, fmt, ntok, mtok;
            ls >> p >> fmt >> ntok >> mtok;
            std::string extra;
            if (p != "p" || fmt != "ec3" || !numeric(ntok) || !numeric(mtok) || (ls >> extra))
                throw ParseError(lineno, "malformed header, expected 'p ec3 <n> <m>'");
            try {
                inst.n = std::stoi(ntok);
                m_declared = std::stoll(mtok);
            } catch (const std::logic_error&) {
                throw ParseError(lineno, "header values out of range");
            }
            if (inst.n < 3 || inst.n > kMaxBits) throw ParseError(lineno, "n out of range [3, 30]");
            if (m_declared < 0) throw ParseError(lineno, "negative clause count");
            have_header = true;
            continue;
        }

        if (!have_header) throw ParseError(lineno, "clause line before header");
        std::string t1, t2, t3, extra;
        ls >> t1 >> t2 >> t3;
        if (!numeric(t1) || !numeric(t2) || !numeric(t3))
            throw ParseError(lineno, "expected three integers");
        if (ls >> extra) throw ParseError(lineno, "trailing tokens after clause");
        int a, b, c;
        try {
            a = std::stoi(t1); b = std::stoi(t2); c = std::stoi(t3);
        } catch (const std::logic_error&) {
            throw ParseError(lineno, "clause index out of range");
        }
        if (a < 1 || b < 1 || c < 1) throw ParseError(lineno, "clause index must be >= 1");
        if (a > inst.n || b > inst.n || c > inst.n) throw ParseError(lineno, "clause index exceeds n");
        if (a == b || b == c || a == c) throw ParseError(lineno, "repeated index within clause");
        inst.clauses.push_back(Clause::of(a, b, c));
    }

    if (!have_header) throw ParseError(lineno, "missing 'p ec3' header");
    if (inst.clause_count() != m_declared)
        throw ParseError(lineno, "clause count mismatch: header says " + std::to_string(m_declared) +
                                     ", found " + std::to_string(inst.clause_count()));
    return inst;
}

inline std::string serialize_instance(const Ec3Instance& inst) {
    std::string out = "p ec3 " + std::to_string(inst.n) + " " + std::to_string(inst.clause_count()) + "\n";
    for (const Clause& c : inst.clauses)
        out += std::to_string(c.i) + " " + std::to_string(c.j) + " " + std::to_string(c.k) + "\n";
    return out;
}

// --- seeded random instances -------------------------------------------------

inline long long clause_space_size(int n) {
    return static_cast<long long>(n) * (n - 1) * (n - 2) / 6;
}

// m distinct clauses drawn uniformly. With require_satisfiable, clauses are
// rejection-sampled against a planted assignment that satisfies each kept
// clause with exactly one 1-bit.
inline Ec3Instance random_instance(int n, int m, std::uint64_t seed, bool require_satisfiable) {
    if (n < 3 || n > kMaxBits) throw std::invalid_argument("random_instance: n out of range");
    if (m < 1) throw std::invalid_argument("random_instance: m must be >= 1");
    if (m > clause_space_size(n))
        throw std::invalid_argument("random_instance: m exceeds binom(n,3)");

    CounterRng rng = CounterRng::derive(seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(m),
                                               require_satisfiable ? 1ull : 0ull});

    std::uint32_t planted = 0;
    if (require_satisfiable) {
        // a clause satisfied by `planted` needs one 1-bit and two 0-bits, so
        // w ones leave w * binom(n-w, 2) usable clauses
        const int budget = 4096;
        int tries = 0;
        for (;; ++tries) {
            if (tries >= budget)
                throw std::runtime_error("random_instance: no viable planted assignment found");
            planted = static_cast<std::uint32_t>(rng.next_below(1ull << n));
            int w = std::popcount(planted);
            if (w < 1 || n - w < 2) continue;
            long long avail = static_cast<long long>(w) * (n - w) * (n - w - 1) / 2;
            if (avail >= m) break;
        }
    }

    auto planted_satisfies = [&](const Clause& c) {
        int ones = 0;
        for (int idx : c.indices()) ones += static_cast<int>((planted >> (n - idx)) & 1u);
        return ones == 1;
    };

    std::set<Clause> chosen;
    const long long budget = 200000 + 2000ll * m;
    long long tries = 0;
    while (static_cast<int>(chosen.size()) < m) {
        if (++tries > budget)
            throw std::runtime_error("random_instance: rejection budget exhausted");
        int a = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n))) + 1;
        int b = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n))) + 1;
        int c = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n))) + 1;
        if (a == b || b == c || a == c) continue;
        Clause cl = Clause::of(a, b, c);
        if (require_satisfiable && !planted_satisfies(cl)) continue;
        chosen.insert(cl);
    }

    Ec3Instance inst;
    inst.n = n;
    // order deterministic per seed: re-draw order from the chosen set
    std::vector<Clause> pool(chosen.begin(), chosen.end());
    while (!pool.empty()) {
        std::size_t pick = rng.next_below(pool.size());
        inst.clauses.push_back(pool[pick]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    inst.validate();
    return inst;
}

} // namespace ec3r
