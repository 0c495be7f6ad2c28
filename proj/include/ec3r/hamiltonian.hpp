#pragma once

// Operator construction. The full operator is
//   H = -(omega/2) sz (x) I (x) I_N  +  I (x) H_R  +  c sx (x) sx (x) I_N
// and is kept structural: a real diagonal plus one coupling scalar. The
// off-diagonal part connects each basis index with exactly one partner
// (probe and ancilla both flipped), so matvec is a single fused pass and the
// diagonal/coupling split used by the Trotter evolver is exact.

#include <Eigen/Dense>
#include <cstdint>
#include <ostream>

#include "ec3r/instance.hpp"
#include "ec3r/oracle.hpp"
#include "ec3r/statevector.hpp"

namespace ec3r {

// h_C over the 2^n register basis: 0 on satisfying assignments, 1 elsewhere.
inline Eigen::VectorXd clause_diagonal(const Clause& clause, int n) {
    if (n < 3 || n > kMaxBits) throw std::invalid_argument("clause_diagonal: n out of range");
    if (clause.k > n) throw std::invalid_argument("clause index exceeds n");
    const std::uint32_t mask = detail::clause_mask(clause, n);
    Eigen::VectorXd diag(Eigen::Index{1} << n);
    for (Eigen::Index z = 0; z < diag.size(); ++z)
        diag[z] = std::popcount(static_cast<std::uint32_t>(z) & mask) == 1 ? 0.0 : 1.0;
    return diag;
}

// H_R = -1 |0><0| (x) I_N + |1><1| (x) H_C : ancilla-0 block pinned at -1.
inline Eigen::VectorXd register_diagonal(const Eigen::VectorXd& clause_diag) {
    Eigen::Index n_dim = clause_diag.size();
    if (n_dim < 1 || (n_dim & (n_dim - 1)) != 0)
        throw std::invalid_argument("register_diagonal: length must be a power of two");
    Eigen::VectorXd out(2 * n_dim);
    out.head(n_dim).setConstant(-1.0);
    out.tail(n_dim) = clause_diag;
    return out;
}

struct StructuredHamiltonian {
    double omega = 1.0;
    double c = 0.02;
    int n = 0;
    Eigen::VectorXd register_diag; // length 2^(n+1)

    Eigen::Index dim() const { return Eigen::Index{4} << n; }

    Eigen::Index partner(Eigen::Index idx) const { return idx ^ (Eigen::Index{3} << n); }

    double diagonal(Eigen::Index idx) const {
        int probe = static_cast<int>(idx >> (n + 1));
        return (probe ? omega : -omega) * 0.5 + register_diag[idx & ((Eigen::Index{2} << n) - 1)];
    }

    Eigen::VectorXd full_diagonal() const {
        Eigen::VectorXd d(dim());
        for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = diagonal(i);
        return d;
    }
};

// Guard: the analysis assumes weak coupling, enforced as c <= omega/10 unless
// explicitly relaxed.
inline StructuredHamiltonian full_hamiltonian(const Eigen::VectorXd& register_diag, double omega,
                                              double c, bool relax_coupling_guard = false) {
    if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
    if (!(c > 0.0)) throw std::invalid_argument("coupling c must be positive");
    if (!relax_coupling_guard && c > omega / 10.0)
        throw std::invalid_argument("weak-coupling guard: c <= omega/10 (pass relax flag to override)");
    Eigen::Index len = register_diag.size();
    if (len < 16 || (len & (len - 1)) != 0)
        throw std::invalid_argument("register diagonal must have length 2^(n+1), n >= 3");
    int n = 0;
    while ((Eigen::Index{2} << n) != len) ++n;
    return StructuredHamiltonian{omega, c, n, register_diag};
}

inline StructuredHamiltonian hamiltonian_for_clause(const Ec3Instance& inst, int k, double omega,
                                                    double c, bool relax_guard = false) {
    if (k < 1 || k > inst.clause_count()) throw std::invalid_argument("round index out of range");
    return full_hamiltonian(register_diagonal(clause_diagonal(inst.clauses[static_cast<std::size_t>(k - 1)], inst.n)),
                            omega, c, relax_guard);
}

// H*v (not evolution; not normalized).
inline StateVector apply_hamiltonian(const StructuredHamiltonian& h, const StateVector& v) {
    if (v.size() != h.dim()) throw std::invalid_argument("apply_hamiltonian: dimension mismatch");
    StateVector out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out[i] = h.diagonal(i) * v[i] + h.c * v[h.partner(i)];
    return out;
}

// Dense materialization from the structure. Diagnostic path, n <= 4.
inline Eigen::MatrixXd dense_hamiltonian(const StructuredHamiltonian& h) {
    if (h.n > 4) throw std::invalid_argument("dense materialization restricted to n <= 4");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(h.dim(), h.dim());
    for (Eigen::Index i = 0; i < h.dim(); ++i) {
        m(i, i) = h.diagonal(i);
        m(i, h.partner(i)) = h.c;
    }
    return m;
}

// Row-major complex pairs, little-endian 64-bit floats.
inline void write_dense_dump(const StructuredHamiltonian& h, std::ostream& out) {
    Eigen::MatrixXd m = dense_hamiltonian(h);
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c2 = 0; c2 < m.cols(); ++c2) {
            double re = m(r, c2), im = 0.0;
            out.write(reinterpret_cast<const char*>(&re), sizeof re);
            out.write(reinterpret_cast<const char*>(&im), sizeof im);
        }
}

} // namespace ec3r
