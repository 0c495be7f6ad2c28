#pragma once

// Test-only reference routes, kept independent of the library's evolution
// paths. The operator couples each basis index to exactly one partner, so
// exp(-iHt) decomposes into closed-form 2x2 rotations; that closed form is
// the oracle the eigendecomposition, Krylov and Trotter routes are checked
// against. The dense Kronecker build below is the oracle for the operator
// itself.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "ec3r/hamiltonian.hpp"
#include "ec3r/statevector.hpp"

namespace ec3r::testing {

using Complex = std::complex<double>;

// exp(-i [[d1, c],[c, d2]] t) in closed form.
inline Eigen::Matrix2cd pair_propagator(double d1, double d2, double c, double t) {
    const double s = 0.5 * (d1 + d2);
    const double delta = 0.5 * (d1 - d2);
    const double omega = std::sqrt(delta * delta + c * c);
    const Complex phase = std::polar(1.0, -s * t);
    const double co = std::cos(omega * t);
    const double si = omega > 0.0 ? std::sin(omega * t) / omega : t;
    Eigen::Matrix2cd u;
    u(0, 0) = phase * Complex(co, -delta * si);
    u(0, 1) = phase * Complex(0.0, -c * si);
    u(1, 0) = u(0, 1);
    u(1, 1) = phase * Complex(co, delta * si);
    return u;
}

// Full-state evolution through the pairwise closed form.
inline StateVector evolve_pairwise(const StructuredHamiltonian& h, const StateVector& v, double t) {
    StateVector out = StateVector::Zero(v.size());
    std::vector<bool> done(static_cast<std::size_t>(v.size()), false);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (done[static_cast<std::size_t>(i)]) continue;
        Eigen::Index p = h.partner(i);
        Eigen::Matrix2cd u = pair_propagator(h.diagonal(i), h.diagonal(p), h.c, t);
        out[i] = u(0, 0) * v[i] + u(0, 1) * v[p];
        out[p] = u(1, 0) * v[i] + u(1, 1) * v[p];
        done[static_cast<std::size_t>(i)] = done[static_cast<std::size_t>(p)] = true;
    }
    return out;
}

inline Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Dense operator from the explicit tensor-product formula, built without the
// library's structural representation.
inline Eigen::MatrixXd dense_from_kronecker(const Clause& clause, int n, double omega, double c) {
    const Eigen::Index size = Eigen::Index{1} << n;
    Eigen::MatrixXd sx(2, 2), sz(2, 2), p0(2, 2), p1(2, 2);
    sx << 0, 1, 1, 0;
    sz << 1, 0, 0, -1;
    p0 << 1, 0, 0, 0;
    p1 << 0, 0, 0, 1;
    Eigen::MatrixXd id2 = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd idn = Eigen::MatrixXd::Identity(size, size);

    Eigen::MatrixXd hc = Eigen::MatrixXd::Zero(size, size);
    for (Eigen::Index z = 0; z < size; ++z) {
        int ones = 0;
        for (int idx : clause.indices()) ones += static_cast<int>((z >> (n - idx)) & 1);
        hc(z, z) = ones == 1 ? 0.0 : 1.0;
    }
    Eigen::MatrixXd hr = -1.0 * kron(p0, idn) + kron(p1, hc);
    return -0.5 * omega * kron(sz, Eigen::MatrixXd::Identity(2 * size, 2 * size)) + kron(id2, hr) +
           c * kron(kron(sx, sx), idn);
}

} // namespace ec3r::testing
