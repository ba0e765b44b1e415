#pragma once

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ldlab/cycles.hpp"
#include "ldlab/io.hpp"
#include "ldlab/ising.hpp"
#include "ldlab/measures.hpp"
#include "ldlab/nets.hpp"
#include "ldlab/wigner.hpp"

namespace ldlab::cli {

struct CommonOpts {
    std::uint64_t seed = 0;
    std::string out;
    bool json = false;
    int threads = 0;  // 0: LDP_LAB_THREADS env, then 1
};

namespace detail {

inline void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--seed", c.seed, "master seed; all randomness derives from it")
        ->default_val("0");
    cmd->add_option("--out", c.out, "CSV output path (default <subcommand>.csv)");
    cmd->add_flag("--json", c.json, "also write a JSON report next to the CSV");
    cmd->add_option("--threads", c.threads,
                    "worker threads (default: LDP_LAB_THREADS or 1); never changes results");
}

inline std::string default_out(const std::string& name) { return name + ".csv"; }

inline void finish(ExperimentReport& report, const std::string& name, const CommonOpts& c) {
    report.experiment = name;
    report.seed = c.seed;
    const std::string path = c.out.empty() ? default_out(name) : c.out;
    write_text_file(path, report.csv());
    std::cout << "wrote " << path << " (" << report.rows.size() << " rows)\n";
    if (c.json) {
        std::string jpath = path;
        const auto dot = jpath.find_last_of('.');
        jpath = (dot == std::string::npos ? jpath : jpath.substr(0, dot)) + ".json";
        write_text_file(jpath, report.json().dump(2) + "\n");
        std::cout << "wrote " << jpath << "\n";
    }
}

inline ScalarLaw law_from_name(const std::string& name, double param) {
    if (name == "rademacher") return ScalarLaw::rademacher();
    if (name == "bernoulli") return ScalarLaw::bernoulli(std::isnan(param) ? 0.5 : param);
    if (name == "uniform")
        return ScalarLaw::uniform_sym(std::isnan(param) ? std::sqrt(3.0) : param);
    if (name == "gaussian") return ScalarLaw::gaussian(std::isnan(param) ? 1.0 : param);
    throw argument_error("unknown law '" + name +
                         "' (expected rademacher|bernoulli|uniform|gaussian)");
}

inline std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::string cur;
    for (const char ch : text + ",") {
        if (ch == ',' || ch == ' ') {
            if (!cur.empty()) {
                out.push_back(std::stod(cur));
                cur.clear();
            }
        } else {
            cur.push_back(ch);
        }
    }
    return out;
}

inline std::string num(double v) { return format_number(v); }

}  // namespace detail

// --- subcommand payloads -------------------------------------------------

struct LegendreOpts {
    std::string law = "rademacher";
    double param = std::numeric_limits<double>::quiet_NaN();
    double lo = -3.0, hi = 3.0;
    int points = 61;
};

inline ExperimentReport run_legendre(const LegendreOpts& o, const CommonOpts&) {
    const ScalarLaw law = detail::law_from_name(o.law, o.param);
    if (o.points < 2) throw argument_error("legendre: --points >= 2 required");
    ExperimentReport rep;
    rep.param("law", law.name());
    rep.param("lo", o.lo);
    rep.param("hi", o.hi);
    rep.columns = {"lambda", "Lambda", "x", "Lambda_star", "duality_gap"};
    for (int i = 0; i < o.points; ++i) {
        const double l = o.lo + (o.hi - o.lo) * i / (o.points - 1);
        const double value = log_laplace(law, l);
        const double x = log_laplace_deriv(law, l);
        const double star = legendre(law, x);
        const double gap = star - (l * x - value);
        rep.add_row({detail::num(l), detail::num(value), detail::num(x), detail::num(star),
                     detail::num(gap)});
    }
    return rep;
}

struct IsingCertifyOpts {
    std::size_t n = 6;
    double scale = 0.02;
    double delta = 0.5;
    int instances = 10;
    int starts = 32;
    double tol = 1e-9;
    int mw_trials = 2000;
};

inline SymMatrix random_sparse_coupling(std::size_t n, double scale, Rng& rng) {
    SymMatrix a(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (rng.bernoulli(0.5)) a.set(i, j, scale * rng.uniform(-1.0, 1.0));
    return a;
}

inline ExperimentReport run_ising_certify(const IsingCertifyOpts& o, const CommonOpts& c,
                                          bool* all_ok) {
    ExperimentReport rep;
    rep.param("n", static_cast<std::uint64_t>(o.n));
    rep.param("scale", o.scale);
    rep.param("delta", o.delta);
    rep.param("instances", static_cast<std::uint64_t>(o.instances));
    rep.columns = {"instance", "n",     "sup",      "log_z", "net_log_card",
                   "net_card", "delta", "bound_ok", "slack", "mw_ratio"};
    *all_ok = true;
    for (int inst = 0; inst < o.instances; ++inst) {
        Rng rng = Rng::derive(c.seed, static_cast<std::uint64_t>(inst));
        const IsingProblem problem(random_sparse_coupling(o.n, o.scale, rng));
        const auto cert =
            partition_certificate(problem, o.delta, 0.0, o.starts, rng.next_u64());
        const bool ok = cert.slack >= -o.tol;
        *all_ok = *all_ok && ok;
        Rng mw_rng = Rng::derive(c.seed, 90000 + static_cast<std::uint64_t>(inst));
        const auto mw =
            gaussian_mean_width(problem.coupling.scaled(2.0), o.mw_trials, mw_rng, c.threads);
        const double nn = static_cast<double>(o.n);
        const double ratio = mw.value > 0.0
                                 ? (cert.log_z - cert.sup) /
                                       (std::cbrt(nn) * std::pow(mw.value, 2.0 / 3.0))
                                 : 0.0;
        rep.add_row({std::to_string(inst), std::to_string(o.n), detail::num(cert.sup),
                     detail::num(cert.log_z), detail::num(cert.net_log_cardinality),
                     std::to_string(cert.net_cardinality), detail::num(cert.delta),
                     ok ? "1" : "0", detail::num(cert.slack), detail::num(ratio)});
    }
    return rep;
}

struct IsingSolveOpts {
    std::string graph = "star";
    std::string graph_file;
    std::size_t n = 10;
    double scale = 0.2;
    double p = 0.5;
    int starts = 32;
};

inline ExperimentReport run_ising_solve(const IsingSolveOpts& o, const CommonOpts& c) {
    SymMatrix adj;
    if (o.graph == "star") {
        adj = star_adjacency(o.n);
    } else if (o.graph == "cycle") {
        adj = cycle_adjacency(o.n);
    } else if (o.graph == "complete") {
        adj = complete_adjacency(o.n);
    } else if (o.graph == "er") {
        Rng rng = Rng::derive(c.seed, 1);
        adj = er_sample(o.n, o.p, rng);
    } else if (o.graph == "densefile") {
        if (o.graph_file.empty()) throw argument_error("--graph densefile needs --graph-file");
        adj = read_dense_matrix_file(o.graph_file);
    } else if (o.graph == "edgelist") {
        if (o.graph_file.empty()) throw argument_error("--graph edgelist needs --graph-file");
        adj = read_edge_list_file(o.graph_file);
    } else {
        throw argument_error("unknown graph family '" + o.graph +
                             "' (star|cycle|complete|er|densefile|edgelist)");
    }
    for (std::size_t i = 0; i < adj.size(); ++i) adj.set(i, i, 0.0);
    const IsingProblem problem(adj.scaled(o.scale));

    ExperimentReport rep;
    rep.param("graph", o.graph);
    rep.param("n", static_cast<std::uint64_t>(problem.size()));
    rep.param("scale", o.scale);
    rep.columns = {"n",        "sup",         "exact",     "gap",    "residual",
                   "starts_used", "converged", "op_norm", "hs_norm"};
    Rng rng = Rng::derive(c.seed, 2);
    const auto sol = meanfield_sup(problem, o.starts, rng, c.threads);
    const bool have_exact = problem.size() <= 24;
    const double exact = have_exact ? exact_log_partition(problem)
                                    : std::numeric_limits<double>::quiet_NaN();
    const auto diag = spectral_diagnostics(problem.coupling);
    rep.add_row({std::to_string(problem.size()), detail::num(sol.value), detail::num(exact),
                 detail::num(exact - sol.value), detail::num(sol.residual),
                 std::to_string(sol.starts_used), sol.converged ? "1" : "0",
                 detail::num(diag.op_norm), detail::num(diag.hs_norm)});
    return rep;
}

struct WignerRateOpts {
    unsigned d = 4;
    int beta = 1;
    double t_max = 5.0;
    double step = 0.25;
};

inline ExperimentReport run_wigner_rate(const WignerRateOpts& o, const CommonOpts&) {
    if (!(o.step > 0.0)) throw argument_error("wigner-rate: --step > 0 required");
    ExperimentReport rep;
    rep.param("d", static_cast<std::uint64_t>(o.d));
    rep.param("beta", static_cast<std::uint64_t>(o.beta));
    rep.columns = {"x", "J"};
    RateCurve curve;
    curve.name = "J_" + std::to_string(o.d);
    curve.speed_desc = "n^{1+2/d}";
    for (double x = 0.0; x <= o.t_max + 1e-12; x += o.step)
        curve.points.emplace_back(x, rate_J(o.d, o.beta, x));
    curve.validate();
    for (const auto& [x, j] : curve.points) rep.add_row({detail::num(x), detail::num(j)});
    return rep;
}

struct WignerMcOpts {
    std::size_t n = 50;
    unsigned d = 4;
    double t = 2.5;
    std::size_t trials = 2000;
    int samples = 100;
    std::string law = "rademacher";
};

inline ExperimentReport run_wigner_mc(const WignerMcOpts& o, const CommonOpts& c) {
    const ScalarLaw entry = detail::law_from_name(o.law, std::numeric_limits<double>::quiet_NaN());
    const WignerEnsemble ensemble(o.n, entry, entry);
    ExperimentReport rep;
    rep.param("n", static_cast<std::uint64_t>(o.n));
    rep.param("d", static_cast<std::uint64_t>(o.d));
    rep.param("t", o.t);
    rep.param("law", entry.name());
    rep.columns = {"quantity", "d", "value", "std_err", "reference"};

    // moment rows: mean over samples of (1/n) tr(X/sqrt n)^d for d = 2,3,4
    const std::uint64_t master = Rng::derive(c.seed, 11).next_u64();
    std::vector<double> m2(o.samples), m3(o.samples), m4(o.samples);
    parallel_for(static_cast<std::size_t>(o.samples), c.threads, [&](std::size_t s) {
        Rng stream = Rng::derive(master, s);
        const SymMatrix x = wigner_sample(ensemble, stream);
        const SymMatrix xs = x.scaled(1.0 / std::sqrt(static_cast<double>(o.n)));
        const SymMatrix x2 = sym_multiply(xs, xs);
        m2[s] = xs.frobenius_norm() * xs.frobenius_norm() / static_cast<double>(o.n);
        m3[s] = trace_product(x2, xs) / static_cast<double>(o.n);
        m4[s] = x2.frobenius_norm() * x2.frobenius_norm() / static_cast<double>(o.n);
    });
    const auto emit_moment = [&](unsigned d, const std::vector<double>& vals) {
        const double mean = compensated_sum(vals) / vals.size();
        double ss = 0.0;
        for (const double v : vals) ss += (v - mean) * (v - mean);
        const double se = vals.size() > 1
                              ? std::sqrt(ss / (vals.size() - 1) / double(vals.size()))
                              : 0.0;
        rep.add_row({"moment", std::to_string(d), detail::num(mean), detail::num(se),
                     detail::num(semicircle_moment(d))});
    };
    emit_moment(2, m2);
    emit_moment(3, m3);
    emit_moment(4, m4);

    Rng tail_rng = Rng::derive(c.seed, 12);
    const auto tail = tilted_tail_estimate(ensemble, o.d, o.t, o.trials, tail_rng, c.threads);
    const double jref = (o.d >= 3) ? rate_J(o.d, 1, o.t)
                                   : std::numeric_limits<double>::quiet_NaN();
    rep.add_row({"tail_prob", std::to_string(o.d), detail::num(tail.prob_est),
                 detail::num(tail.std_err), "nan"});
    rep.add_row({"rate_est", std::to_string(o.d), detail::num(tail.rate_est), "nan",
                 detail::num(jref)});
    rep.add_row({"ess", std::to_string(o.d), detail::num(tail.ess), "nan", "nan"});
    return rep;
}

struct WignerShiftOpts {
    unsigned d = 4;
    double x = 1.0;
    int beta = 1;
    std::string law = "rademacher";
    std::string n_list = "10,50,100,200,500";
};

inline ExperimentReport run_wigner_shift(const WignerShiftOpts& o, const CommonOpts&) {
    const ScalarLaw entry = detail::law_from_name(o.law, std::numeric_limits<double>::quiet_NaN());
    ExperimentReport rep;
    rep.param("d", static_cast<std::uint64_t>(o.d));
    rep.param("x", o.x);
    rep.param("law", entry.name());
    rep.columns = {"n", "d", "x", "y", "trace_check", "cost", "limit"};
    const double limit = (o.beta / 4.0) * std::pow(o.x, 2.0 / o.d);
    for (const double nd : detail::parse_list(o.n_list)) {
        const auto n = static_cast<std::size_t>(nd);
        const auto cand = uniform_shift_candidate(entry, n, o.d, o.x);
        rep.add_row({std::to_string(n), std::to_string(o.d), detail::num(o.x),
                     detail::num(cand.offdiag), detail::num(cand.trace_check),
                     detail::num(cand.cost), detail::num(limit)});
    }
    return rep;
}

struct CyclesPhiOpts {
    unsigned d = 3;
    double t = 0.0;  // 0: sweep to t_max
    double t_max = 4.0;
    double step = 0.25;
};

inline ExperimentReport run_cycles_phi(const CyclesPhiOpts& o, const CommonOpts&) {
    ExperimentReport rep;
    rep.param("d", static_cast<std::uint64_t>(o.d));
    rep.columns = {"t", "theta", "phi_dense", "phi_sparse"};
    std::vector<double> ts;
    if (o.t > 0.0) {
        ts.push_back(o.t);
    } else {
        for (double t = 1.0; t <= o.t_max + 1e-12; t += o.step) ts.push_back(t);
    }
    RateCurve dense{"Phi_dense_" + std::to_string(o.d), {}, "v_n = n^2 p^2 log(1/p)"};
    for (const double t : ts)
        dense.points.emplace_back(t, cycle_rate_Phi(o.d, t, SparsityRegime::Dense));
    dense.validate();
    for (std::size_t i = 0; i < ts.size(); ++i) {
        rep.add_row({detail::num(ts[i]), detail::num(theta_t(o.d, ts[i])),
                     detail::num(dense.points[i].second),
                     detail::num(cycle_rate_Phi(o.d, ts[i], SparsityRegime::Sparse))});
    }
    return rep;
}

struct CyclesCandidatesOpts {
    std::size_t n = 3000;
    double p = 0.1;
    unsigned d = 3;
    double t = 2.0;
    std::string export_path;
};

inline ExperimentReport run_cycles_candidates(const CyclesCandidatesOpts& o,
                                              const CommonOpts&) {
    const CycleProblem prob(o.n, o.p, o.d, o.t);
    ExperimentReport rep;
    rep.param("n", static_cast<std::uint64_t>(o.n));
    rep.param("p", o.p);
    rep.param("d", static_cast<std::uint64_t>(o.d));
    rep.param("t", o.t);
    rep.columns = {"kind", "size", "cost", "cost_over_vn", "limit", "trace_ratio"};
    const auto clique = planted_clique(prob);
    rep.add_row({"clique", std::to_string(clique.planted_size), detail::num(clique.cost),
                 detail::num(clique.cost_over_vn),
                 detail::num(0.5 * std::pow(o.t - 1.0, 2.0 / o.d)),
                 detail::num(clique.trace_ratio)});
    const auto hub = planted_hub(prob);
    rep.add_row({"hub", std::to_string(hub.planted_size), detail::num(hub.cost),
                 detail::num(hub.cost_over_vn), detail::num(theta_t(o.d, o.t)),
                 detail::num(hub.trace_ratio)});
    if (!o.export_path.empty()) {
        const auto& best = clique.cost <= hub.cost ? clique : hub;
        write_text_file(o.export_path, to_dense_csv(best.matrix));
    }
    return rep;
}

struct CyclesOptOpts {
    std::size_t n = 40;
    double p = 0.3;
    unsigned d = 3;
    double t = 1.5;
    int rounds = 6;
    int inner = 250;
    double tol = 1e-8;
    std::string export_path;
};

inline ExperimentReport run_cycles_opt(const CyclesOptOpts& o, const CommonOpts& c) {
    const CycleProblem prob(o.n, o.p, o.d, o.t);
    ExperimentReport rep;
    rep.param("n", static_cast<std::uint64_t>(o.n));
    rep.param("p", o.p);
    rep.param("d", static_cast<std::uint64_t>(o.d));
    rep.param("t", o.t);
    rep.columns = {"kind", "cost", "cost_over_vn", "trace_ratio", "feasible"};

    const auto emit = [&](const char* kind, const CandidateMatrix& cand) {
        const bool feasible = cand.trace_ratio >= o.t * (1.0 - o.tol);
        rep.add_row({kind, detail::num(cand.cost), detail::num(cand.cost_over_vn),
                     detail::num(cand.trace_ratio), feasible ? "1" : "0"});
    };
    emit("clique", planted_clique(prob));
    emit("hub", planted_hub(prob));
    PhiConfig config;
    config.outer_rounds = o.rounds;
    config.max_inner = o.inner;
    config.feas_tol = o.tol;
    config.seed = c.seed;
    config.threads = c.threads;
    const auto numeric = numeric_phi(prob, config);
    emit("numeric", numeric);
    if (!o.export_path.empty()) write_text_file(o.export_path, to_dense_csv(numeric.matrix));
    return rep;
}

struct CyclesMcOpts {
    std::size_t n = 40;
    double p = 0.2;
    unsigned d = 3;
    std::size_t trials = 500;
    std::string t_list = "1,1.5,2";
};

inline ExperimentReport run_cycles_mc(const CyclesMcOpts& o, const CommonOpts& c) {
    const CycleProblem prob(o.n, o.p, o.d, 1.0);
    Rng rng = Rng::derive(c.seed, 21);
    const auto res =
        trace_tail_mc(prob, detail::parse_list(o.t_list), o.trials, rng, c.threads);
    ExperimentReport rep;
    rep.param("n", static_cast<std::uint64_t>(o.n));
    rep.param("p", o.p);
    rep.param("d", static_cast<std::uint64_t>(o.d));
    rep.param("trials", static_cast<std::uint64_t>(o.trials));
    rep.columns = {"level", "tail_freq", "mean", "std_err"};
    for (std::size_t k = 0; k < res.levels.size(); ++k) {
        rep.add_row({detail::num(res.levels[k]), detail::num(res.tail_freq[k]),
                     detail::num(res.mean), detail::num(res.std_err)});
    }
    if (res.levels.empty())
        rep.add_row({"nan", "nan", detail::num(res.mean), detail::num(res.std_err)});
    return rep;
}

struct NetsVerifyOpts {
    std::size_t n = 3;
    std::size_t k = 1;
    double eps = 0.6;
};

inline ExperimentReport run_nets_verify(const NetsVerifyOpts& o, const CommonOpts& c,
                                        bool* all_ok) {
    ExperimentReport rep;
    rep.param("n", static_cast<std::uint64_t>(o.n));
    rep.param("k", static_cast<std::uint64_t>(o.k));
    rep.param("eps", o.eps);
    rep.columns = {"construction", "n",     "k",         "eps",     "cardinality",
                   "log_cardinality", "bound", "worst_gap", "samples", "ok"};
    *all_ok = true;
    const auto emit = [&](const char* name, const NetResult& r, std::size_t k) {
        const bool ok = (std::isnan(r.bound) || r.log_cardinality <= r.bound + 1e-12) &&
                        r.worst_gap <= r.mesh;
        *all_ok = *all_ok && ok;
        rep.add_row({name, std::to_string(o.n), std::to_string(k), detail::num(r.mesh),
                     std::to_string(r.cardinality), detail::num(r.log_cardinality),
                     detail::num(r.bound), detail::num(r.worst_gap),
                     std::to_string(r.verification_samples), ok ? "1" : "0"});
    };
    emit("interval", net_interval(-1.0, 1.0, o.eps).summary, 0);
    Rng sphere_rng = Rng::derive(c.seed, 31);
    emit("sphere", net_sphere(o.n, o.eps, sphere_rng).summary, 0);
    Rng lowrank_rng = Rng::derive(c.seed, 32);
    emit("lowrank", net_lowrank(o.n, o.k, o.eps, lowrank_rng).summary, o.k);
    return rep;
}

// --- driver ----------------------------------------------------------------

inline int run(std::vector<std::string> args) {
    CLI::App app{"ldlab: numerical laboratory for nonlinear large deviations"};
    app.require_subcommand(1);

    CommonOpts common;

    LegendreOpts leg;
    auto* cmd_leg = app.add_subcommand(
        "legendre", "Tabulate Lambda and Lambda* on a grid.\n"
                    "CSV schema: lambda,Lambda,x,Lambda_star,duality_gap");
    cmd_leg->add_option("--law", leg.law, "rademacher|bernoulli|uniform|gaussian");
    cmd_leg->add_option("--param", leg.param, "family parameter (p, half-width, or variance)");
    cmd_leg->add_option("--lo", leg.lo, "grid start (lambda)");
    cmd_leg->add_option("--hi", leg.hi, "grid end (lambda)");
    cmd_leg->add_option("--points", leg.points, "grid size");

    IsingCertifyOpts cert;
    auto* cmd_cert = app.add_subcommand(
        "ising-certify",
        "Partition-function certificate sweep over random sparse couplings.\n"
        "CSV schema: instance,n,sup,log_z,net_log_card,net_card,delta,bound_ok,slack,mw_ratio");
    cmd_cert->add_option("--n", cert.n, "spins (<= 10)");
    cmd_cert->add_option("--scale", cert.scale, "coupling scale");
    cmd_cert->add_option("--delta", cert.delta, "net slack delta");
    cmd_cert->add_option("--trials", cert.instances, "number of random instances");
    cmd_cert->add_option("--starts", cert.starts, "mean-field multi-starts");
    cmd_cert->add_option("--tol", cert.tol, "certificate slack tolerance");

    IsingSolveOpts solve;
    auto* cmd_solve = app.add_subcommand(
        "ising-solve", "Mean-field supremum vs exact enumeration on one coupling.\n"
                       "CSV schema: n,sup,exact,gap,residual,starts_used,converged,"
                       "op_norm,hs_norm");
    cmd_solve->add_option("--graph", solve.graph,
                          "star|cycle|complete|er|densefile|edgelist");
    cmd_solve->add_option("--graph-file", solve.graph_file,
                          "matrix file (densefile: whitespace/comma dense text; "
                          "edgelist: 'u v' per line, 0-indexed)");
    cmd_solve->add_option("--n", solve.n, "vertices (generated families)");
    cmd_solve->add_option("--scale", solve.scale, "coupling scale multiplying the adjacency");
    cmd_solve->add_option("--p", solve.p, "edge probability for --graph er");
    cmd_solve->add_option("--starts", solve.starts, "mean-field multi-starts");

    WignerRateOpts wrate;
    auto* cmd_wrate = app.add_subcommand("wigner-rate",
                                         "Tabulate the universal rate function J_d.\n"
                                         "CSV schema: x,J");
    cmd_wrate->add_option("--d", wrate.d, "trace power (>= 3)");
    cmd_wrate->add_option("--beta", wrate.beta, "1 (symmetric) or 2 (Hermitian)");
    cmd_wrate->add_option("--t-max", wrate.t_max, "grid end");
    cmd_wrate->add_option("--step", wrate.step, "grid step");

    WignerMcOpts wmc;
    auto* cmd_wmc = app.add_subcommand(
        "wigner-mc", "Trace moments plus a tilted importance-sampling tail estimate.\n"
                     "CSV schema: quantity,d,value,std_err,reference");
    cmd_wmc->add_option("--n", wmc.n, "matrix size");
    cmd_wmc->add_option("--d", wmc.d, "trace power for the tail estimate");
    cmd_wmc->add_option("--t", wmc.t, "tail level");
    cmd_wmc->add_option("--trials", wmc.trials, "importance-sampling trials (>= 1000)");
    cmd_wmc->add_option("--samples", wmc.samples, "matrix samples for the moment rows");
    cmd_wmc->add_option("--law", wmc.law, "entry law: rademacher|gaussian");

    WignerShiftOpts wshift;
    auto* cmd_wshift = app.add_subcommand(
        "wigner-shift", "Uniform-shift candidate sweep over n.\n"
                        "CSV schema: n,d,x,y,trace_check,cost,limit");
    cmd_wshift->add_option("--d", wshift.d, "trace power");
    cmd_wshift->add_option("--x", wshift.x, "target normalized trace");
    cmd_wshift->add_option("--beta", wshift.beta, "beta in the reference limit");
    cmd_wshift->add_option("--law", wshift.law, "entry law for the cost");
    cmd_wshift->add_option("--n-list", wshift.n_list, "comma-separated sizes");

    CyclesPhiOpts cphi;
    auto* cmd_cphi = app.add_subcommand("cycles-phi",
                                        "Tabulate theta_t and the rate Phi.\n"
                                        "CSV schema: t,theta,phi_dense,phi_sparse");
    cmd_cphi->add_option("--d", cphi.d, "cycle length (>= 3)");
    cmd_cphi->add_option("--t", cphi.t, "single tail level (omit to sweep)");
    cmd_cphi->add_option("--t-max", cphi.t_max, "sweep end");
    cmd_cphi->add_option("--step", cphi.step, "sweep step");

    CyclesCandidatesOpts ccand;
    auto* cmd_ccand = app.add_subcommand(
        "cycles-candidates", "Closed-form clique vs hub candidate costs.\n"
                             "CSV schema: kind,size,cost,cost_over_vn,limit,trace_ratio");
    cmd_ccand->add_option("--n", ccand.n, "vertices");
    cmd_ccand->add_option("--p", ccand.p, "edge probability");
    cmd_ccand->add_option("--d", ccand.d, "cycle length");
    cmd_ccand->add_option("--t", ccand.t, "tail level (>= 1)");
    cmd_ccand->add_option("--export", ccand.export_path,
                          "write the cheaper candidate as dense CSV");

    CyclesOptOpts copt;
    auto* cmd_copt = app.add_subcommand(
        "cycles-opt", "Penalty-method solver for the variational problem phi_n(t).\n"
                      "CSV schema: kind,cost,cost_over_vn,trace_ratio,feasible");
    cmd_copt->add_option("--n", copt.n, "vertices (<= 60)");
    cmd_copt->add_option("--p", copt.p, "edge probability");
    cmd_copt->add_option("--d", copt.d, "cycle length");
    cmd_copt->add_option("--t", copt.t, "tail level (>= 1)");
    cmd_copt->add_option("--rounds", copt.rounds, "penalty rounds");
    cmd_copt->add_option("--inner", copt.inner, "inner gradient iterations per round");
    cmd_copt->add_option("--tol", copt.tol, "relative feasibility tolerance");
    cmd_copt->add_option("--export", copt.export_path, "write the minimizer as dense CSV");

    CyclesMcOpts cmc;
    auto* cmd_cmc = app.add_subcommand(
        "cycles-mc", "Monte Carlo cycle-count statistics on G(n,p).\n"
                     "CSV schema: level,tail_freq,mean,std_err");
    cmd_cmc->add_option("--n", cmc.n, "vertices");
    cmd_cmc->add_option("--p", cmc.p, "edge probability");
    cmd_cmc->add_option("--d", cmc.d, "cycle length");
    cmd_cmc->add_option("--trials", cmc.trials, "samples (>= 100)");
    cmd_cmc->add_option("--t-list", cmc.t_list, "comma-separated tail levels");

    NetsVerifyOpts nets;
    auto* cmd_nets = app.add_subcommand(
        "nets-verify", "Construct interval/sphere/low-rank nets and verify bounds.\n"
                       "CSV schema: construction,n,k,eps,cardinality,log_cardinality,"
                       "bound,worst_gap,samples,ok");
    cmd_nets->add_option("--n", nets.n, "ambient dimension");
    cmd_nets->add_option("--k", nets.k, "rank bound for the low-rank net");
    cmd_nets->add_option("--eps", nets.eps, "mesh");

    for (auto* cmd : app.get_subcommands({}))
        detail::add_common(cmd, common);

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e, std::cout, std::cerr);
        std::cerr << app.help() << '\n';
        return 2;
    }

    try {
        ExperimentReport rep;
        bool ok = true;
        if (cmd_leg->parsed()) {
            rep = run_legendre(leg, common);
            detail::finish(rep, "legendre", common);
        } else if (cmd_cert->parsed()) {
            rep = run_ising_certify(cert, common, &ok);
            detail::finish(rep, "ising-certify", common);
            if (!ok) {
                std::cerr << "certificate failed on at least one instance\n";
                return 3;
            }
        } else if (cmd_solve->parsed()) {
            rep = run_ising_solve(solve, common);
            detail::finish(rep, "ising-solve", common);
        } else if (cmd_wrate->parsed()) {
            rep = run_wigner_rate(wrate, common);
            detail::finish(rep, "wigner-rate", common);
        } else if (cmd_wmc->parsed()) {
            rep = run_wigner_mc(wmc, common);
            detail::finish(rep, "wigner-mc", common);
        } else if (cmd_wshift->parsed()) {
            rep = run_wigner_shift(wshift, common);
            detail::finish(rep, "wigner-shift", common);
        } else if (cmd_cphi->parsed()) {
            rep = run_cycles_phi(cphi, common);
            detail::finish(rep, "cycles-phi", common);
        } else if (cmd_ccand->parsed()) {
            rep = run_cycles_candidates(ccand, common);
            detail::finish(rep, "cycles-candidates", common);
        } else if (cmd_copt->parsed()) {
            rep = run_cycles_opt(copt, common);
            detail::finish(rep, "cycles-opt", common);
        } else if (cmd_cmc->parsed()) {
            rep = run_cycles_mc(cmc, common);
            detail::finish(rep, "cycles-mc", common);
        } else if (cmd_nets->parsed()) {
            rep = run_nets_verify(nets, common, &ok);
            detail::finish(rep, "nets-verify", common);
            if (!ok) {
                std::cerr << "a net construction failed its bound or coverage\n";
                return 3;
            }
        }
    } catch (const argument_error& e) {
        std::cerr << "argument error: " << e.what() << '\n';
        return 2;
    } catch (const domain_error& e) {
        std::cerr << "argument error: " << e.what() << '\n';
        return 2;
    } catch (const error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return 3;
    }
    return 0;
}

}  // namespace ldlab::cli
