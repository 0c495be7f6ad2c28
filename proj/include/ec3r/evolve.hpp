#pragma once

// Time evolution exp(-iHt)|v>. Two exact routes and a Trotter route:
//  - dense Hermitian eigendecomposition up to dim 4096 (desk-scale ground truth)
//  - Lanczos/Krylov expm-multiply with adaptive substeps above that
//  - first/second order splitting into diagonal phases and exact pair rotations
// The eigendecomposition is cached per operator so time sweeps cost two dense
// matvecs per point.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "ec3r/errors.hpp"
#include "ec3r/hamiltonian.hpp"
#include "ec3r/statevector.hpp"

namespace ec3r {

struct EvolveOptions {
    Eigen::Index dense_dim_limit = 4096; // eigendecomposition below, Krylov above
    double krylov_tol = 1e-10;           // two orders under every acceptance tolerance
    int krylov_max_dim = 64;
    long long krylov_max_substeps = 100000;
};

namespace detail {

inline StateVector apply_eigenbasis(const Eigen::MatrixXd& evecs, const Eigen::VectorXd& evals,
                                    const StateVector& v, double t) {
    // V exp(-i L t) V^T v with V real: handle re/im parts separately
    Eigen::VectorXd wr = evecs.transpose() * v.real();
    Eigen::VectorXd wi = evecs.transpose() * v.imag();
    StateVector w(v.size());
    for (Eigen::Index i = 0; i < w.size(); ++i)
        w[i] = Complex(wr[i], wi[i]) * std::polar(1.0, -evals[i] * t);
    Eigen::VectorXd or_ = evecs * w.real();
    Eigen::VectorXd oi = evecs * w.imag();
    StateVector out(v.size());
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = Complex(or_[i], oi[i]);
    return out;
}

// One Lanczos factorization from u. Returns basis, tridiagonal entries and
// the residual norm that would start the next basis vector.
struct LanczosResult {
    std::vector<StateVector> basis;
    Eigen::VectorXd alpha;
    Eigen::VectorXd beta; // beta[j] couples basis j and j+1
    double residual_beta = 0.0;
    bool invariant = false; // happy breakdown: span is H-invariant
};

inline LanczosResult lanczos(const StructuredHamiltonian& h, const StateVector& u, int max_dim) {
    LanczosResult r;
    r.basis.push_back(u);
    std::vector<double> alphas, betas;
    for (int j = 0; j < max_dim; ++j) {
        StateVector w = apply_hamiltonian(h, r.basis.back());
        Complex a = r.basis.back().dot(w);
        alphas.push_back(a.real());
        w -= a * r.basis.back();
        if (j > 0) w -= Complex(betas.back(), 0.0) * r.basis[r.basis.size() - 2];
        // full reorthogonalization keeps the small spaces seen here exact
        for (const StateVector& b : r.basis) w -= b.dot(w) * b;
        double beta = w.norm();
        if (beta < 1e-13) {
            r.invariant = true;
            break;
        }
        if (j + 1 == max_dim) {
            r.residual_beta = beta;
            break;
        }
        betas.push_back(beta);
        r.basis.push_back(w / beta);
    }
    r.alpha = Eigen::Map<Eigen::VectorXd>(alphas.data(), static_cast<Eigen::Index>(alphas.size()));
    r.beta = Eigen::Map<Eigen::VectorXd>(betas.data(), static_cast<Eigen::Index>(betas.size()));
    return r;
}

} // namespace detail

class ExactPropagator {
public:
    explicit ExactPropagator(StructuredHamiltonian h, EvolveOptions opts = {})
        : h_(std::move(h)), opts_(opts), dense_(h_.dim() <= opts.dense_dim_limit) {
        if (dense_) {
            Eigen::MatrixXd m = Eigen::MatrixXd::Zero(h_.dim(), h_.dim());
            for (Eigen::Index i = 0; i < h_.dim(); ++i) {
                m(i, i) = h_.diagonal(i);
                m(i, h_.partner(i)) = h_.c;
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
            if (es.info() != Eigen::Success) throw NumericalError("dense eigendecomposition failed");
            evecs_ = es.eigenvectors();
            evals_ = es.eigenvalues();
        }
    }

    const StructuredHamiltonian& hamiltonian() const { return h_; }

    StateVector evolve(const StateVector& v, double t) const {
        if (v.size() != h_.dim()) throw std::invalid_argument("evolve: dimension mismatch");
        if (t < 0.0) throw std::invalid_argument("evolve: negative time");
        if (t == 0.0) return v;
        if (dense_) return detail::apply_eigenbasis(evecs_, evals_, v, t);
        return krylov_evolve(v, t);
    }

private:
    StateVector krylov_evolve(const StateVector& v, double t) const {
        StateVector u = v;
        double remaining = t;
        double dt = t;
        long long substeps = 0;
        while (remaining > 0.0) {
            if (++substeps > opts_.krylov_max_substeps)
                throw NumericalError("Krylov evolution exceeded substep budget without converging");
            double unorm = u.norm();
            detail::LanczosResult lz = detail::lanczos(h_, u / unorm, opts_.krylov_max_dim);
            const Eigen::Index m = static_cast<Eigen::Index>(lz.basis.size());
            Eigen::MatrixXd tmat = Eigen::MatrixXd::Zero(m, m);
            for (Eigen::Index i = 0; i < m; ++i) {
                tmat(i, i) = lz.alpha[i];
                if (i + 1 < m) tmat(i, i + 1) = tmat(i + 1, i) = lz.beta[i];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tmat);
            if (es.info() != Eigen::Success) throw NumericalError("Krylov tridiagonal eigensolve failed");

            dt = std::min(dt, remaining);
            Eigen::VectorXcd y;
            if (!lz.invariant) {
                // shrink dt until the residual flowing out of the subspace is
                // within this substep's share of the budget
                for (;;) {
                    y = small_exp(es, m, dt);
                    double err = lz.residual_beta * std::abs(y[m - 1]);
                    if (err <= opts_.krylov_tol * (dt / t)) break;
                    dt *= 0.5;
                    if (dt < t * 1e-14)
                        throw NumericalError("Krylov step size underflow: no convergence at tolerance");
                }
            } else {
                dt = remaining; // invariant subspace: the small exponential is exact
                y = small_exp(es, m, dt);
            }

            StateVector next = StateVector::Zero(u.size());
            for (Eigen::Index i = 0; i < m; ++i) next += y[i] * lz.basis[static_cast<std::size_t>(i)];
            u = unorm * next;
            remaining -= dt;
            dt *= 1.5; // try growing again
        }
        return u;
    }

    static Eigen::VectorXcd small_exp(const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& es,
                                      Eigen::Index m, double dt) {
        Eigen::VectorXcd phases(m);
        for (Eigen::Index i = 0; i < m; ++i)
            phases[i] = std::polar(1.0, -es.eigenvalues()[i] * dt) * es.eigenvectors()(0, i);
        return es.eigenvectors() * phases; // exp(-iT dt) e1
    }

    StructuredHamiltonian h_;
    EvolveOptions opts_;
    bool dense_;
    Eigen::MatrixXd evecs_;
    Eigen::VectorXd evals_;
};

inline StateVector evolve_exact(const StructuredHamiltonian& h, const StateVector& v, double t,
                                const EvolveOptions& opts = {}) {
    return ExactPropagator(h, opts).evolve(v, t);
}

namespace detail {

inline void apply_diagonal_phases(const Eigen::VectorXd& diag, double tau, StateVector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] *= std::polar(1.0, -diag[i] * tau);
}

// exp(-i c tau sx) on every (index, partner) pair: exact 2x2 rotation
inline void apply_coupling(const StructuredHamiltonian& h, double tau, StateVector& v) {
    const double co = std::cos(h.c * tau);
    const Complex msi(0.0, -std::sin(h.c * tau));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        Eigen::Index p = h.partner(i);
        if (p < i) continue;
        Complex a = v[i], b = v[p];
        v[i] = co * a + msi * b;
        v[p] = msi * a + co * b;
    }
}

} // namespace detail

// Splits H = D + C with D the full diagonal and C the pair coupling; both
// factors are applied exactly, so c = 0 (or commuting limits) reproduce the
// exact evolution at any step count. Order 2 is symmetric Strang D/2-C-D/2.
inline StateVector evolve_trotter(const StructuredHamiltonian& h, const StateVector& v, double t,
                                  int steps, int order) {
    if (v.size() != h.dim()) throw std::invalid_argument("evolve_trotter: dimension mismatch");
    if (steps < 1) throw std::invalid_argument("evolve_trotter: steps must be >= 1");
    if (order != 1 && order != 2) throw std::invalid_argument("evolve_trotter: order must be 1 or 2");
    if (t < 0.0) throw std::invalid_argument("evolve_trotter: negative time");

    const double dt = t / steps;
    const Eigen::VectorXd diag = h.full_diagonal();
    StateVector u = v;
    if (order == 1) {
        for (int s = 0; s < steps; ++s) {
            detail::apply_diagonal_phases(diag, dt, u);
            detail::apply_coupling(h, dt, u);
        }
    } else {
        detail::apply_diagonal_phases(diag, dt / 2, u);
        for (int s = 0; s < steps; ++s) {
            detail::apply_coupling(h, dt, u);
            detail::apply_diagonal_phases(diag, s + 1 < steps ? dt : dt / 2, u);
        }
    }
    return u;
}

} // namespace ec3r
