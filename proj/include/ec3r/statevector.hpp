#pragma once

// State layout: basis index = probe * 2^(n+1) + ancilla * 2^n + j, with z1 the
// most significant bit of the register index j. Probe and ancilla are the two
// leftmost tensor factors, matching the operator ordering.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "ec3r/errors.hpp"
#include "ec3r/io_util.hpp"
#include "ec3r/rng.hpp"

namespace ec3r {

using StateVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

inline int bits_for_dim(Eigen::Index dim) {
    int n = 0;
    while ((Eigen::Index{4} << n) < dim) ++n;
    if ((Eigen::Index{4} << n) != dim) throw std::invalid_argument("state dimension is not 4*2^n");
    return n;
}

inline StateVector uniform_register_state(int n) {
    Eigen::Index size = Eigen::Index{1} << n;
    return StateVector::Constant(size, Complex(1.0 / std::sqrt(static_cast<double>(size)), 0.0));
}

inline StateVector uniform_superposition(std::span<const std::uint32_t> indices, int n) {
    if (indices.empty()) throw std::invalid_argument("uniform superposition over empty set");
    StateVector v = StateVector::Zero(Eigen::Index{1} << n);
    double amp = 1.0 / std::sqrt(static_cast<double>(indices.size()));
    for (std::uint32_t j : indices) v[static_cast<Eigen::Index>(j)] = amp;
    return v;
}

inline double probe_ground_population(const StateVector& v) {
    Eigen::Index half = v.size() / 2;
    return v.head(half).squaredNorm();
}

inline double sector_population(const StateVector& v, int probe_bit, int ancilla_bit) {
    Eigen::Index quarter = v.size() / 4;
    return v.segment(quarter * (2 * probe_bit + ancilla_bit), quarter).squaredNorm();
}

// Conditional register state given fixed probe/ancilla values.
inline Eigen::VectorXcd register_state(const StateVector& v, int probe_bit, int ancilla_bit) {
    Eigen::Index quarter = v.size() / 4;
    Eigen::VectorXcd block = v.segment(quarter * (2 * probe_bit + ancilla_bit), quarter);
    double w = block.squaredNorm();
    if (w < 1e-15) throw NumericalError("register extraction from a near-empty sector");
    return block / std::sqrt(w);
}

struct MeasurementResult {
    int outcome;             // 0 = probe decayed to ground
    StateVector collapsed;   // renormalized projection onto the outcome
    double prob_of_outcome;
};

inline MeasurementResult measure_probe(const StateVector& v, CounterRng& rng) {
    double p0 = probe_ground_population(v);
    int outcome = rng.next_double() < p0 ? 0 : 1;
    double p = outcome == 0 ? p0 : 1.0 - p0;
    if (p < 1e-15) throw NumericalError("degenerate collapse: outcome probability below 1e-15");
    StateVector collapsed = StateVector::Zero(v.size());
    Eigen::Index half = v.size() / 2;
    if (outcome == 0)
        collapsed.head(half) = v.head(half) / std::sqrt(p);
    else
        collapsed.tail(half) = v.tail(half) / std::sqrt(p);
    return {outcome, std::move(collapsed), p};
}

// Amplitudes of the state on |1>|0>|phi_prev>, |0>|1>|phi_sol>, |0>|1>|phi_nonsol>.
// phi_sol / phi_nonsol may be empty (rounds where one class has no members);
// the corresponding amplitude is zero.
struct SubspaceDecomposition {
    Complex c0, c1, c2;
    double leakage; // population outside the 3-dimensional span, >= 0

    double c0_sq() const { return std::norm(c0); }
    double c1_sq() const { return std::norm(c1); }
    double c2_sq() const { return std::norm(c2); }
};

inline SubspaceDecomposition subspace_decompose(const StateVector& v,
                                                const Eigen::VectorXcd& phi_prev,
                                                const Eigen::VectorXcd& phi_sol,
                                                const Eigen::VectorXcd& phi_nonsol) {
    Eigen::Index quarter = v.size() / 4;
    if (phi_prev.size() != quarter) throw std::invalid_argument("phi_prev dimension mismatch");
    if (phi_sol.size() != 0 && phi_sol.size() != quarter)
        throw std::invalid_argument("phi_sol dimension mismatch");
    if (phi_nonsol.size() != 0 && phi_nonsol.size() != quarter)
        throw std::invalid_argument("phi_nonsol dimension mismatch");
    if (phi_sol.size() != 0 && phi_nonsol.size() != 0 &&
        std::abs(phi_sol.dot(phi_nonsol)) > 1e-9)
        throw std::invalid_argument("subspace basis not orthogonal");

    auto block10 = v.segment(quarter * 2, quarter); // probe 1, ancilla 0
    auto block01 = v.segment(quarter * 1, quarter); // probe 0, ancilla 1
    SubspaceDecomposition d;
    d.c0 = phi_prev.dot(block10);
    d.c1 = phi_sol.size() != 0 ? Complex(phi_sol.dot(block01)) : Complex(0, 0);
    d.c2 = phi_nonsol.size() != 0 ? Complex(phi_nonsol.dot(block01)) : Complex(0, 0);
    d.leakage = std::max(0.0, v.squaredNorm() - std::norm(d.c0) - std::norm(d.c1) - std::norm(d.c2));
    return d;
}

struct TimePoint {
    double t, c0_sq, c1_sq, c2_sq, leakage, probe_ground;
};

inline void write_timeseries_csv(std::ostream& out, std::span<const TimePoint> rows) {
    out << "t,c0_sq,c1_sq,c2_sq,leakage,probe_ground\n";
    for (const TimePoint& r : rows)
        out << fmt_double(r.t) << ',' << fmt_double(r.c0_sq) << ',' << fmt_double(r.c1_sq) << ','
            << fmt_double(r.c2_sq) << ',' << fmt_double(r.leakage) << ',' << fmt_double(r.probe_ground)
            << '\n';
}

} // namespace ec3r
