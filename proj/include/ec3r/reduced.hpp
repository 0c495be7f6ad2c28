#pragma once

// Closed-form 3-level companion model: the effective Hamiltonian over
// {|1,0,phi_prev>, |0,1,phi_sol>, |0,1,phi_nonsol>}, its exact propagation,
// the printed amplitude formula, the detuned 2-level decay law, and the
// success-conditioned purification map. All 3x3 eigensolves; propagate3 is
// this module's ground truth and the printed formula is cross-checked
// against it.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>
#include <vector>

#include "ec3r/errors.hpp"
#include "ec3r/io_util.hpp"

namespace ec3r {

struct ReducedParams {
    double c = 0.02;
    double p = 1.0; // transition weight p_k in [0, 1]; omega fixed at 1

    void validate() const {
        if (!(c > 0.0)) throw std::invalid_argument("reduced model requires c > 0");
        if (p < 0.0 || p > 1.0) throw std::invalid_argument("p must lie in [0, 1]");
    }
};

struct ReducedState {
    std::complex<double> c0, c1, c2;

    double c0_sq() const { return std::norm(c0); }
    double c1_sq() const { return std::norm(c1); }
    double c2_sq() const { return std::norm(c2); }
};

inline Eigen::Matrix3d h3(const ReducedParams& params) {
    params.validate();
    const double a = params.c * std::sqrt(params.p);
    const double b = params.c * std::sqrt(1.0 - params.p);
    Eigen::Matrix3d m;
    m << -0.5, a, b,
          a, -0.5, 0.0,
          b, 0.0, 0.5;
    return m;
}

// Success-conditioned generalization: couplings carry the current normalized
// (c1, c2) pair instead of (sqrt(p), sqrt(1-p)).
inline Eigen::Matrix3cd h3_purify(double c, std::complex<double> c1_prev,
                                  std::complex<double> c2_prev) {
    if (!(c > 0.0)) throw std::invalid_argument("h3_purify requires c > 0");
    double norm = std::norm(c1_prev) + std::norm(c2_prev);
    if (std::abs(norm - 1.0) > 1e-9)
        throw std::invalid_argument("h3_purify requires |c1|^2 + |c2|^2 = 1");
    Eigen::Matrix3cd m;
    m << std::complex<double>(-0.5, 0.0), c * c1_prev, c * c2_prev,
         c * std::conj(c1_prev), std::complex<double>(-0.5, 0.0), std::complex<double>(0.0, 0.0),
         c * std::conj(c2_prev), std::complex<double>(0.0, 0.0), std::complex<double>(0.5, 0.0);
    return m;
}

namespace detail {

inline Eigen::Vector3cd propagate_from_first(const Eigen::Matrix3cd& h, double t) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(h);
    if (es.info() != Eigen::Success) throw NumericalError("3x3 eigensolve failed");
    Eigen::Vector3cd w = es.eigenvectors().adjoint().col(0);
    for (int i = 0; i < 3; ++i) w[i] *= std::polar(1.0, -es.eigenvalues()[i] * t);
    return es.eigenvectors() * w;
}

} // namespace detail

// exp(-i h3 t) applied to (1, 0, 0).
inline ReducedState propagate3(const ReducedParams& params, double t) {
    if (t < 0.0) throw std::invalid_argument("propagate3: negative time");
    Eigen::Vector3cd v = detail::propagate_from_first(h3(params).cast<std::complex<double>>(), t);
    return {v[0], v[1], v[2]};
}

// The printed closed form
//   c1(t) = 2 c sqrt(p) sum_x (e^{-ixt} - 2x e^{-ixt}) / (-12x^2 - 4x + 4c^2 + 1)
// over the three eigenvalues x of h3.
inline std::complex<double> c1_analytic(const ReducedParams& params, double t) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(h3(params));
    if (es.info() != Eigen::Success) throw NumericalError("3x3 eigensolve failed");
    const Eigen::Vector3d x = es.eigenvalues();
    double gap = std::min({std::abs(x[1] - x[0]), std::abs(x[2] - x[1]), std::abs(x[2] - x[0])});
    if (gap < 1e-10) throw NumericalError("degenerate 3-level spectrum: closed form undefined");
    std::complex<double> sum(0.0, 0.0);
    for (int i = 0; i < 3; ++i) {
        std::complex<double> ph = std::polar(1.0, -x[i] * t);
        sum += (ph - 2.0 * x[i] * ph) / (-12.0 * x[i] * x[i] - 4.0 * x[i] + 4.0 * params.c * params.c + 1.0);
    }
    return 2.0 * params.c * std::sqrt(params.p) * sum;
}

// Decay probability of the detuned 2-level case (p_k = 0):
//   4c^2 sin^2(sqrt(1/4 + c^2) t) / (1 + 4c^2)
inline double offres_decay(double c, double t) {
    if (!(c > 0.0)) throw std::invalid_argument("offres_decay requires c > 0");
    if (t < 0.0) throw std::invalid_argument("offres_decay: negative time");
    double s = std::sin(std::sqrt(0.25 + c * c) * t);
    return 4.0 * c * c * s * s / (1.0 + 4.0 * c * c);
}

inline double offres_decay_ceiling(double c) { return 4.0 * c * c / (1.0 + 4.0 * c * c); }

// Iterated success-conditioned map. Starts from the post-decay normalized
// (c1, c2) of the round's optimal-time propagation; every iteration evolves
// (1,0,0) under the current h3_purify for t0, conditions on decay and
// renormalizes. eps_m is the non-solution population after m successes;
// eps0 is the pre-purification value.
struct PurificationTrace {
    double eps0;
    std::vector<double> epsilons;
    std::vector<std::complex<double>> c1_track;
};

inline PurificationTrace purification_trace(const ReducedParams& params, double t0, int successes) {
    params.validate();
    if (!(t0 > 0.0)) throw std::invalid_argument("purification_trace requires t0 > 0");
    if (successes < 1) throw std::invalid_argument("purification_trace requires successes >= 1");
    if (!(params.p > 0.0)) throw std::invalid_argument("purification_trace requires p > 0");

    const double t_opt = std::numbers::pi / (2.0 * params.c * std::sqrt(params.p));
    ReducedState s = propagate3(params, t_opt);
    double decay = s.c1_sq() + s.c2_sq();
    if (decay < 1e-12) throw NumericalError("degenerate purification trace: no decay amplitude");
    std::complex<double> c1 = s.c1 / std::sqrt(decay);
    std::complex<double> c2 = s.c2 / std::sqrt(decay);

    PurificationTrace trace;
    trace.eps0 = std::norm(c2);
    for (int m = 0; m < successes; ++m) {
        Eigen::Vector3cd y = detail::propagate_from_first(h3_purify(params.c, c1, c2), t0);
        double d = std::norm(y[1]) + std::norm(y[2]);
        if (d < 1e-12) throw NumericalError("degenerate purification trace: decay probability below 1e-12");
        c1 = y[1] / std::sqrt(d);
        c2 = y[2] / std::sqrt(d);
        trace.epsilons.push_back(std::norm(c2));
        trace.c1_track.push_back(c1);
    }
    return trace;
}

// P_succ = (1 - eps0^M)^M
inline double success_prob(double eps0, int m) {
    if (eps0 < 0.0 || eps0 > 1.0) throw std::invalid_argument("eps0 must lie in [0, 1]");
    if (m < 1) throw std::invalid_argument("success_prob requires M >= 1");
    return std::pow(1.0 - std::pow(eps0, m), m);
}

// Figure data emission. Figures 2 and 3 share columns (t, |c1|^2, |c2|^2);
// figure 4 tabulates (M, P_succ) at fixed eps0.
struct FigureSpec {
    int figure_id = 2;
    double c = 0.02;
    double p = 1.0 / 27.0;
    double t_max = 1200.0;
    int points = 2000;
    double eps0 = 0.1;
    int m_max = 20;
};

inline void emit_figure_data(const FigureSpec& spec, std::ostream& out) {
    if (spec.figure_id == 2 || spec.figure_id == 3) {
        if (spec.points < 2) throw std::invalid_argument("figure sweep needs at least 2 points");
        ReducedParams params{spec.c, spec.p};
        params.validate();
        out << "t,c1_sq,c2_sq\n";
        for (int i = 0; i < spec.points; ++i) {
            double t = spec.t_max * i / (spec.points - 1);
            ReducedState s = propagate3(params, t);
            out << fmt_double(t) << ',' << fmt_double(s.c1_sq()) << ',' << fmt_double(s.c2_sq()) << '\n';
        }
    } else if (spec.figure_id == 4) {
        out << "M,p_succ\n";
        for (int m = 1; m <= spec.m_max; ++m)
            out << m << ',' << fmt_double(success_prob(spec.eps0, m)) << '\n';
    } else {
        throw std::invalid_argument("figure id must be 2, 3 or 4");
    }
}

} // namespace ec3r
