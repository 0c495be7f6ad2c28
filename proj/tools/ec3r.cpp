// Command-line front end: classical oracle reports, full protocol runs,
// figure data, full-vs-reduced validation, instance generation and a Trotter
// convergence bench.
//
// Exit codes: 0 success, 2 inconclusive run, 64 usage, 65 bad instance data,
// 70 internal numerical failure.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include "ec3r/evolve.hpp"
#include "ec3r/instance.hpp"
#include "ec3r/io_util.hpp"
#include "ec3r/oracle.hpp"
#include "ec3r/protocol.hpp"
#include "ec3r/rational.hpp"
#include "ec3r/reduced.hpp"
#include "ec3r/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInconclusive = 2;
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;
constexpr int kExitNumeric = 70;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ec3r::Ec3Instance load_instance(const std::string& path) {
    ec3r::Ec3Instance inst = ec3r::parse_instance(read_file(path));
    inst.validate();
    if (inst.has_duplicate_clauses())
        std::cerr << "warning: instance contains duplicate clauses (p_k = 1 rounds)\n";
    return inst;
}

void write_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty())
        std::cout << content;
    else
        ec3r::atomic_write_file(out_path, content);
}

int cmd_oracle(const std::string& path) {
    ec3r::Ec3Instance inst = load_instance(path);
    ec3r::ProbabilitySequence seq = ec3r::p_sequence(inst);

    std::cout << "n: " << inst.n << "\n";
    std::cout << "m: " << inst.clause_count() << "\n";
    std::cout << "N:";
    for (long long c : seq.counts) std::cout << ' ' << c;
    std::cout << "\np:";
    for (const auto& p : seq.values) std::cout << ' ' << (p.has_value() ? p->str() : "-");
    std::cout << "\n";

    int m = inst.clause_count();
    if (seq.counts[static_cast<std::size_t>(m)] == 0) {
        int first_zero = 0;
        while (seq.counts[static_cast<std::size_t>(first_zero)] != 0) ++first_zero;
        std::cout << "UNSAT (N_" << first_zero << " = 0)\n";
        return kExitOk;
    }
    auto sols = ec3r::brute_force_solutions(inst);
    std::cout << "solutions: " << sols.size() << "\n";
    for (const auto& a : sols) std::cout << a.str() << "\n";
    return kExitOk;
}

int cmd_solve(const std::string& path, ec3r::ProtocolParams params, const std::string& out_path) {
    ec3r::Ec3Instance inst = load_instance(path);
    params.validate();
    ec3r::RunResult result = ec3r::run_full(inst, params);

    std::cout << "status: " << ec3r::to_string(result.status) << "\n";
    if (result.status == ec3r::RunStatus::unsat_detected)
        std::cout << "zero p_k detected at round " << result.stopped_at_round << "\n";
    std::cout << "solutions: " << result.solutions.size() << "\n";
    for (const auto& s : result.solutions)
        std::cout << s.assignment.str() << "  weight " << ec3r::fmt_double(s.weight) << "\n";
    long long trials = 0;
    for (const auto& r : result.records) trials += r.trials_to_first_decay;
    std::cout << "rounds: " << result.records.size() << ", trials to decay: " << trials << "\n";

    if (!out_path.empty()) {
        ec3r::atomic_write_file(out_path, ec3r::run_report(inst, params, result).dump(2) + "\n");
        std::cout << "report: " << out_path << "\n";
    }
    return result.status == ec3r::RunStatus::inconclusive ? kExitInconclusive : kExitOk;
}

int cmd_figures(int figure_id, const ec3r::FigureSpec& spec, const std::string& out_path) {
    std::ostringstream csv;
    ec3r::FigureSpec s = spec;
    s.figure_id = figure_id;
    ec3r::emit_figure_data(s, csv);
    write_output(out_path, csv.str());
    return kExitOk;
}

int cmd_validate(const std::string& path, int round, double c, double omega, double t_max,
                 int points, double tol_amplitude, double tol_leakage, bool relax_guard,
                 const std::string& out_path) {
    ec3r::Ec3Instance inst = load_instance(path);
    if (inst.n > 12) throw std::invalid_argument("validate: full simulation guard is n <= 12");
    if (round < 1 || round > inst.clause_count()) throw std::invalid_argument("round out of range");

    auto prev = ec3r::satisfying_prefix_indices(inst, round - 1);
    if (prev.empty()) throw std::invalid_argument("validate: no assignments survive the prior rounds");
    Eigen::VectorXcd phi_prev = ec3r::uniform_superposition(prev, inst.n);
    ec3r::RoundContext ctx = ec3r::make_round_context(inst, round, phi_prev, prev);

    ec3r::StructuredHamiltonian h = ec3r::hamiltonian_for_clause(inst, round, omega, c, relax_guard);
    ec3r::ExactPropagator prop(h);
    ec3r::StateVector prepared = ec3r::prepare_round_input(phi_prev);

    double p_k = ctx.p_k.has_value() ? ctx.p_k->to_double() : 0.0;
    ec3r::ReducedParams red{c, p_k};

    double max_dev = 0.0, max_leak = 0.0, max_full_decay = 0.0;
    std::ostringstream csv;
    csv << "t,c0_sq,c1_sq,c2_sq,leakage,probe_ground,reduced_c0_sq,reduced_c1_sq,reduced_c2_sq,deviation\n";
    for (int i = 0; i < points; ++i) {
        double t = t_max * i / (points - 1);
        ec3r::StateVector evolved = prop.evolve(prepared, t);
        ec3r::SubspaceDecomposition d =
            ec3r::subspace_decompose(evolved, ctx.phi_prev, ctx.phi_sol, ctx.phi_nonsol);
        ec3r::ReducedState r = ec3r::propagate3(red, t);
        double dev = std::max({std::abs(d.c0 - r.c0), std::abs(d.c1 - r.c1), std::abs(d.c2 - r.c2)});
        double pg = ec3r::probe_ground_population(evolved);
        max_dev = std::max(max_dev, dev);
        max_leak = std::max(max_leak, d.leakage);
        max_full_decay = std::max(max_full_decay, pg);
        csv << ec3r::fmt_double(t) << ',' << ec3r::fmt_double(d.c0_sq()) << ','
            << ec3r::fmt_double(d.c1_sq()) << ',' << ec3r::fmt_double(d.c2_sq()) << ','
            << ec3r::fmt_double(d.leakage) << ',' << ec3r::fmt_double(pg) << ','
            << ec3r::fmt_double(r.c0_sq()) << ',' << ec3r::fmt_double(r.c1_sq()) << ','
            << ec3r::fmt_double(r.c2_sq()) << ',' << ec3r::fmt_double(dev) << '\n';
    }
    if (!out_path.empty()) ec3r::atomic_write_file(out_path, csv.str());

    std::cout << "round " << round << ": p_k = " << (ctx.p_k.has_value() ? ctx.p_k->str() : "-")
              << ", c = " << ec3r::fmt_double(c) << "\n";
    std::cout << "max amplitude deviation: " << ec3r::fmt_double(max_dev) << "  (tolerance "
              << ec3r::fmt_double(tol_amplitude) << ")\n";
    std::cout << "max leakage: " << ec3r::fmt_double(max_leak) << "  (tolerance "
              << ec3r::fmt_double(tol_leakage) << ")\n";
    if (p_k == 0.0)
        std::cout << "max full decay: " << ec3r::fmt_double(max_full_decay)
                  << "  (detuned ceiling " << ec3r::fmt_double(ec3r::offres_decay_ceiling(c)) << ")\n";
    bool ok = max_dev <= tol_amplitude && max_leak <= tol_leakage;
    std::cout << (ok ? "within tolerance\n" : "OUT OF TOLERANCE\n");
    return ok ? kExitOk : 1;
}

int cmd_gen(int n, int m, std::uint64_t seed, bool satisfiable, const std::string& out_path) {
    ec3r::Ec3Instance inst = ec3r::random_instance(n, m, seed, satisfiable);
    write_output(out_path, ec3r::serialize_instance(inst));
    return kExitOk;
}

int cmd_trotter_bench(const std::string& path, int round, double t, double c, double omega,
                      const std::vector<int>& steps, const std::vector<int>& orders,
                      const std::string& out_path) {
    ec3r::Ec3Instance inst = load_instance(path);
    if (round < 1 || round > inst.clause_count()) throw std::invalid_argument("round out of range");
    auto prev = ec3r::satisfying_prefix_indices(inst, round - 1);
    if (prev.empty()) throw std::invalid_argument("no assignments survive the prior rounds");
    Eigen::VectorXcd phi = ec3r::uniform_superposition(prev, inst.n);
    ec3r::StateVector prepared = ec3r::prepare_round_input(phi);

    ec3r::StructuredHamiltonian h = ec3r::hamiltonian_for_clause(inst, round, omega, c);
    ec3r::ExactPropagator prop(h);
    if (t <= 0.0) {
        long long n_prev = static_cast<long long>(prev.size());
        long long n_k = ec3r::count_satisfying_prefix(inst, round);
        if (n_k == 0) throw std::invalid_argument("round has p_k = 0: pass --t explicitly");
        t = ec3r::resonance_evolution_time(ec3r::Rational(n_k, n_prev), c);
    }
    ec3r::StateVector exact = prop.evolve(prepared, t);

    std::ostringstream csv;
    csv << "order,steps,l2_error,linf_error\n";
    for (int order : orders)
        for (int s : steps) {
            ec3r::StateVector approx = ec3r::evolve_trotter(h, prepared, t, s, order);
            double l2 = (approx - exact).norm();
            double linf = (approx - exact).cwiseAbs().maxCoeff();
            csv << order << ',' << s << ',' << ec3r::fmt_double(l2) << ','
                << ec3r::fmt_double(linf) << '\n';
        }
    write_output(out_path, csv.str());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"desk-scale simulator of the probe-qubit resonance solver for 3-bit exact cover"};
    app.require_subcommand(1);

    std::string instance_path, out_path;
    ec3r::ProtocolParams params;
    std::string t_mode = "time_scan";

    auto* oracle = app.add_subcommand("oracle", "exhaustive counts, exact p sequence and solutions");
    oracle->add_option("instance", instance_path, "instance file")->required();

    auto* solve = app.add_subcommand("solve", "run the full multi-round protocol");
    solve->add_option("instance", instance_path, "instance file")->required();
    solve->add_option("--c", params.c, "probe-register coupling");
    solve->add_option("--omega", params.omega, "probe frequency");
    solve->add_option("--seed", params.seed, "master seed");
    solve->add_option("--t-mode", t_mode, "oracle_informed | time_scan")
        ->check(CLI::IsMember({"oracle_informed", "time_scan"}));
    solve->add_option("--purify-successes", params.purify_successes,
                      "successful measurements per round (-1: clause count)");
    solve->add_option("--max-trials", params.max_trials_per_round, "per-round trial budget");
    solve->add_option("--scan-points", params.scan_points, "time-scan grid points");
    solve->add_option("--scan-tmax", params.scan_t_max, "time-scan upper bound (-1: auto)");
    solve->add_option("--threshold", params.extract_threshold, "extraction weight threshold");
    solve->add_flag("--relax-guard", params.relax_coupling_guard, "allow c > omega/10");
    solve->add_option("--out", out_path, "write JSON run report here");

    int figure_id = 0;
    ec3r::FigureSpec fig;
    std::string fig_p = "1/27";
    auto* figures = app.add_subcommand("figures", "emit closed-form figure data as CSV");
    figures->add_option("id", figure_id, "figure id: 2, 3 or 4")->required();
    figures->add_option("--c", fig.c, "coupling");
    figures->add_option("--p", fig_p, "transition weight, exact rational like 1/27");
    figures->add_option("--tmax", fig.t_max, "sweep end time");
    figures->add_option("--points", fig.points, "sweep points");
    figures->add_option("--eps0", fig.eps0, "per-round error for figure 4");
    figures->add_option("--mmax", fig.m_max, "max successful measurements for figure 4");
    figures->add_option("--out", out_path, "output CSV (stdout when omitted)");

    int round = 1, points = 200;
    double t_max = 1200.0, tol_amplitude = 5e-2, tol_leakage = 5e-3, bench_t = -1.0;
    double val_c = 0.02, val_omega = 1.0;
    bool relax_guard = false;
    auto* validate = app.add_subcommand("validate", "full simulation vs closed-form 3-level model");
    validate->add_option("instance", instance_path, "instance file")->required();
    validate->add_option("--round", round, "round index (1-based)");
    validate->add_option("--c", val_c, "coupling");
    validate->add_option("--omega", val_omega, "probe frequency");
    validate->add_option("--tmax", t_max, "sweep end time");
    validate->add_option("--points", points, "sweep points")->check(CLI::Range(2, 1000000));
    validate->add_option("--tol-amplitude", tol_amplitude, "amplitude deviation tolerance");
    validate->add_option("--tol-leakage", tol_leakage, "leakage tolerance");
    validate->add_flag("--relax-guard", relax_guard, "allow c > omega/10");
    validate->add_option("--out", out_path, "CSV sweep output");

    int gen_n = 8, gen_m = 6;
    std::uint64_t gen_seed = 0;
    bool gen_sat = false;
    auto* gen = app.add_subcommand("gen", "generate a random instance");
    gen->add_option("--n", gen_n, "bit count")->required();
    gen->add_option("--m", gen_m, "clause count")->required();
    gen->add_option("--seed", gen_seed, "seed");
    gen->add_flag("--satisfiable", gen_sat, "plant a satisfying assignment");
    gen->add_option("--out", out_path, "output file (stdout when omitted)");

    std::vector<int> bench_steps{256, 512, 1024, 2048};
    std::vector<int> bench_orders{1, 2};
    auto* bench = app.add_subcommand("trotter-bench", "splitting error vs step count");
    bench->add_option("instance", instance_path, "instance file")->required();
    bench->add_option("--round", round, "round index (1-based)");
    bench->add_option("--t", bench_t, "evolution time (default: round resonance time)");
    bench->add_option("--c", val_c, "coupling");
    bench->add_option("--omega", val_omega, "probe frequency");
    bench->add_option("--trotter-steps", bench_steps, "step counts");
    bench->add_option("--trotter-order", bench_orders, "orders (1 and/or 2)");
    bench->add_option("--out", out_path, "output CSV (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (oracle->parsed()) return cmd_oracle(instance_path);
        if (solve->parsed()) {
            params.t_mode =
                t_mode == "oracle_informed" ? ec3r::TimeMode::oracle_informed : ec3r::TimeMode::time_scan;
            return cmd_solve(instance_path, params, out_path);
        }
        if (figures->parsed()) {
            ec3r::Rational p = ec3r::Rational::parse(fig_p);
            fig.p = p.to_double();
            return cmd_figures(figure_id, fig, out_path);
        }
        if (validate->parsed())
            return cmd_validate(instance_path, round, val_c, val_omega, t_max, points,
                                tol_amplitude, tol_leakage, relax_guard, out_path);
        if (gen->parsed()) return cmd_gen(gen_n, gen_m, gen_seed, gen_sat, out_path);
        if (bench->parsed())
            return cmd_trotter_bench(instance_path, round, bench_t, val_c, val_omega, bench_steps,
                                     bench_orders, out_path);
    } catch (const ec3r::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const ec3r::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitUsage;
}
