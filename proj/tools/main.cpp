// Command line front end: one subcommand per study, JSON config with flag
// overrides, CSV/JSON artifacts in --out.  Exit codes: 0 ok, 2 bad config,
// 3 aborted at runtime, 4 resource budget exhausted.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sdewalk/errors.hpp"
#include "sdewalk/io.hpp"
#include "sdewalk/rng.hpp"
#include "sdewalk/simulate.hpp"
#include "sdewalk/verify.hpp"
#include "sdewalk/walker.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sdewalk;

namespace {

struct CliConfig {
    ModelConfig model;
    std::string out = ".";
    int jobs = 1;
    std::int64_t n_paths = 1000;
    int m_lo = 3;
    int m_hi = 7;
    int n_seeds = 10;
    std::int64_t n_mc = 100000;
    int n_enum = 8;
};

double as_number(const json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError("config key \"" + key + "\" must be a number");
    return v.get<double>();
}

int as_int(const json& v, const std::string& key) {
    if (!v.is_number_integer()) throw ConfigError("config key \"" + key + "\" must be an integer");
    return v.get<int>();
}

std::string as_string(const json& v, const std::string& key) {
    if (!v.is_string()) throw ConfigError("config key \"" + key + "\" must be a string");
    return v.get<std::string>();
}

void apply_config_file(const std::string& path, CliConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config file must contain a JSON object");

    static const std::vector<std::string> valid = {
        "preset", "a", "b", "c", "d", "mu", "sigma", "sigma_dx", "x0", "T",
        "m", "M", "seed", "N", "jobs", "u_extent", "phi_mode", "out",
        "m_lo", "m_hi", "n_seeds", "n_mc", "n_enum"};

    for (const auto& [key, value] : j.items()) {
        if (key == "preset") cfg.model.preset = as_string(value, key);
        else if (key == "a") cfg.model.params.a = as_number(value, key);
        else if (key == "b") cfg.model.params.b = as_number(value, key);
        else if (key == "c") cfg.model.params.c = as_number(value, key);
        else if (key == "d") cfg.model.params.d = as_number(value, key);
        else if (key == "mu") cfg.model.mu_expr = as_string(value, key);
        else if (key == "sigma") cfg.model.sigma_expr = as_string(value, key);
        else if (key == "sigma_dx") cfg.model.sigma_dx_expr = as_string(value, key);
        else if (key == "x0") cfg.model.x0 = as_number(value, key);
        else if (key == "T") cfg.model.horizon = as_number(value, key);
        else if (key == "m") cfg.model.level = as_int(value, key);
        else if (key == "M") cfg.model.ref_level = as_int(value, key);
        else if (key == "seed") {
            if (!value.is_number_integer() || value.get<std::int64_t>() < 0)
                throw ConfigError("config key \"seed\" must be a non-negative integer");
            cfg.model.seed = value.get<std::uint64_t>();
        } else if (key == "N") {
            if (!value.is_number_integer()) throw ConfigError("config key \"N\" must be an integer");
            cfg.n_paths = value.get<std::int64_t>();
        } else if (key == "jobs") cfg.jobs = as_int(value, key);
        else if (key == "u_extent") cfg.model.u_extent = as_number(value, key);
        else if (key == "phi_mode") cfg.model.phi_mode = as_string(value, key);
        else if (key == "out") cfg.out = as_string(value, key);
        else if (key == "m_lo") cfg.m_lo = as_int(value, key);
        else if (key == "m_hi") cfg.m_hi = as_int(value, key);
        else if (key == "n_seeds") cfg.n_seeds = as_int(value, key);
        else if (key == "n_mc") {
            if (!value.is_number_integer()) throw ConfigError("config key \"n_mc\" must be an integer");
            cfg.n_mc = value.get<std::int64_t>();
        } else if (key == "n_enum") cfg.n_enum = as_int(value, key);
        else {
            std::string keys;
            for (const auto& k : valid) keys += (keys.empty() ? "" : ", ") + k;
            throw ConfigError("unknown config key \"" + key + "\" (valid keys: " + keys + ")");
        }
    }
}

void apply_environment(CliConfig& cfg) {
    if (const char* out = std::getenv("SDEWALK_OUT")) cfg.out = out;
    if (const char* jobs = std::getenv("SDEWALK_JOBS")) {
        try {
            cfg.jobs = std::stoi(jobs);
        } catch (const std::exception&) {
            throw ConfigError("SDEWALK_JOBS must be an integer");
        }
    }
}

void add_model_options(CLI::App* cmd, CliConfig& cfg) {
    cmd->add_option("--config", "JSON config file (flags override it)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--preset", cfg.model.preset,
                    "model: gbm, linear-sigma, ou, counterexample, custom");
    cmd->add_option("--a", cfg.model.params.a, "model parameter a");
    cmd->add_option("--b", cfg.model.params.b, "model parameter b");
    cmd->add_option("--c", cfg.model.params.c, "model parameter c");
    cmd->add_option("--d", cfg.model.params.d, "model parameter d");
    cmd->add_option("--mu", cfg.model.mu_expr, "drift expression in t, x (custom preset)");
    cmd->add_option("--sigma", cfg.model.sigma_expr, "diffusion expression (custom preset)");
    cmd->add_option("--sigma-dx", cfg.model.sigma_dx_expr,
                    "x-derivative of sigma (custom preset)");
    cmd->add_option("--x0", cfg.model.x0, "initial state");
    cmd->add_option("--T", cfg.model.horizon, "time horizon");
    cmd->add_option("--m", cfg.model.level, "walk level m (mesh 2^-m)");
    cmd->add_option("--M", cfg.model.ref_level, "fine proxy level M (default m+4)");
    cmd->add_option("--seed", cfg.model.seed, "random seed");
    cmd->add_option("--u-extent", cfg.model.u_extent,
                    "initial solved half-width in u (0 = auto)");
    cmd->add_option("--phi-mode", cfg.model.phi_mode, "auto, analytic or numeric");
    cmd->add_option("--out", cfg.out, "output directory");
    cmd->add_option("--jobs", cfg.jobs, "worker threads for ensembles");
}

fs::path prepare_out(const CliConfig& cfg) {
    fs::path dir(cfg.out);
    fs::create_directories(dir);
    return dir;
}

json echo_config(const CliConfig& cfg, const SimContext& ctx) {
    json e{{"preset", cfg.model.preset},
           {"x0", cfg.model.x0},
           {"T", cfg.model.horizon},
           {"m", cfg.model.level},
           {"M", ctx.ref_level},
           {"seed", cfg.model.seed},
           {"phi_mode", ctx.sol.mode() == PhiMode::analytic ? "analytic" : "numeric"},
           {"u_extent", cfg.model.u_extent},
           {"out", cfg.out},
           {"jobs", cfg.jobs}};
    if (cfg.model.preset == "custom") {
        e["mu"] = cfg.model.mu_expr;
        e["sigma"] = cfg.model.sigma_expr;
        e["sigma_dx"] = cfg.model.sigma_dx_expr;
    } else {
        e["a"] = cfg.model.params.a;
        e["b"] = cfg.model.params.b;
        e["c"] = cfg.model.params.c;
        e["d"] = cfg.model.params.d;
    }
    return e;
}

void write_json(const fs::path& file, const json& j) {
    std::ofstream os(file);
    if (!os) throw RuntimeAbort("cannot write " + file.string());
    os << j.dump(2) << '\n';
}

void write_text(const fs::path& file, const std::function<void(std::ostream&)>& body) {
    std::ofstream os(file);
    if (!os) throw RuntimeAbort("cannot write " + file.string());
    body(os);
}

int run_simulate(CliConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const SimContext ctx = make_context(cfg.model);
    const QPathSample path = simulate_qm_path(ctx, 0);
    const fs::path dir = prepare_out(cfg);

    write_text(dir / "path.csv", [&](std::ostream& os) { write_path_csv(os, path); });

    json summary{{"config", echo_config(cfg, ctx)},
                 {"n_steps", path.n_steps()},
                 {"terminal_x", path.x[path.x.size() - 1]},
                 {"terminal_b", path.b[path.b.size() - 1]},
                 {"terminal_w", path.w[path.w.size() - 1]},
                 {"log_lambda", log_lambda_m(path)},
                 {"aborted", path.abort.has_value()}};
    if (path.abort) {
        summary["abort_t"] = path.abort->t;
        summary["abort_reason"] = path.abort->reason;
    }
    summary["runtime_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_json(dir / "summary.json", summary);

    if (path.abort) {
        std::cout << "simulate: aborted at t=" << path.abort->t << " ("
                  << path.abort->reason << "); partial path in " << dir << "\n";
        throw RuntimeAbort("simulation aborted: " + path.abort->reason);
    }
    std::cout << "simulate: " << path.n_steps() << " steps, X(T)="
              << format_sig17(path.x[path.x.size() - 1]) << ", artifacts in " << dir
              << "\n";
    return 0;
}

int run_ensemble_cmd(CliConfig& cfg) {
    const SimContext ctx = make_context(cfg.model);
    const EnsembleSummary ens = run_ensemble(ctx, cfg.n_paths, cfg.jobs);
    const fs::path dir = prepare_out(cfg);

    write_text(dir / "terminals.csv", [&](std::ostream& os) {
        os << "path,x_terminal\n";
        for (Eigen::Index i = 0; i < ens.terminals.size(); ++i)
            os << i << ',' << format_sig17(ens.terminals[i]) << '\n';
    });
    write_json(dir / "ensemble.json",
               json{{"config", echo_config(cfg, ctx)},
                    {"N", ens.n_paths},
                    {"n_aborted", ens.n_aborted},
                    {"terminal_mean", ens.terminal_mean},
                    {"terminal_se", ens.terminal_se},
                    {"runtime_seconds", ens.runtime_seconds}});

    std::cout << "ensemble: N=" << ens.n_paths << " mean=" << ens.terminal_mean
              << " se=" << ens.terminal_se << " aborted=" << ens.n_aborted
              << ", artifacts in " << dir << "\n";
    return 0;
}

int run_converge(CliConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const SimContext ctx = make_context(cfg.model);  // validates model config
    const ConvergenceReport rep =
        convergence_study(ctx.preset, ctx.sol.mode(), cfg.m_lo, cfg.m_hi, ctx.ref_level,
                          cfg.n_seeds, cfg.model.seed);
    const fs::path dir = prepare_out(cfg);

    write_text(dir / "convergence.csv",
               [&](std::ostream& os) { write_convergence_csv(os, rep); });
    json out{{"config", echo_config(cfg, ctx)},
             {"ref_level", rep.ref_level},
             {"levels", rep.levels},
             {"grand_mean_ratio", rep.grand_mean_ratio}};
    for (Eigen::Index j = 0; j < rep.mean_errors.size(); ++j)
        out["mean_errors"].push_back(rep.mean_errors[j]);
    for (Eigen::Index j = 0; j < rep.mean_ratios.size(); ++j)
        out["mean_ratios"].push_back(rep.mean_ratios[j]);
    out["runtime_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_json(dir / "convergence.json", out);

    std::cout << "converge: levels " << cfg.m_lo << ".." << cfg.m_hi
              << ", grand mean ratio " << rep.grand_mean_ratio << ", artifacts in " << dir
              << "\n";
    return 0;
}

int run_verify_martingale(CliConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const SimContext ctx = make_context(cfg.model);
    const MartingaleReport rep = martingale_tests(ctx, cfg.n_mc, cfg.n_enum);
    const fs::path dir = prepare_out(cfg);

    write_json(dir / "martingale.json",
               json{{"config", echo_config(cfg, ctx)},
                    {"n_mc", rep.n_mc},
                    {"mc_mean", rep.mc_mean},
                    {"mc_se", rep.mc_se},
                    {"mc_within_4se", rep.mc_within_4se},
                    {"n_enum", rep.n_enum},
                    {"enum_prob_gap", rep.enum_prob_gap},
                    {"enum_lambda_gap", rep.enum_lambda_gap},
                    {"enum_lambda_w_gap", rep.enum_lambda_w_gap},
                    {"enum_q_w_gap", rep.enum_q_w_gap},
                    {"enum_weight_identity_gap", rep.enum_weight_identity_gap},
                    {"runtime_seconds",
                     std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                         .count()}});

    std::cout << "verify-martingale: MC mean=" << rep.mc_mean << " (se=" << rep.mc_se
              << ", within 4se: " << (rep.mc_within_4se ? "yes" : "no")
              << "); enum gaps prob=" << rep.enum_prob_gap
              << " lambda=" << rep.enum_lambda_gap << " lambdaW=" << rep.enum_lambda_w_gap
              << "\n";
    return 0;
}

int run_verify_distribution(CliConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const SimContext ctx = make_context(cfg.model);
    const DistributionReport rep = distribution_test(ctx, cfg.n_paths, cfg.jobs);
    const fs::path dir = prepare_out(cfg);

    write_json(dir / "distribution.json",
               json{{"config", echo_config(cfg, ctx)},
                    {"N", rep.n_samples},
                    {"n_aborted", rep.n_aborted},
                    {"ks", rep.ks},
                    {"law", rep.law},
                    {"runtime_seconds",
                     std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                         .count()}});

    std::cout << "verify-distribution: KS=" << rep.ks << " against " << rep.law
              << " (N=" << rep.n_samples << ")\n";
    return 0;
}

int run_verify_residual(CliConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const SimContext ctx = make_context(cfg.model);
    const TrendReport res = residual_test(ctx.preset, ctx.sol.mode(), cfg.m_lo, cfg.m_hi,
                                          cfg.n_seeds, cfg.model.seed);
    const TrendReport drift = local_drift_test(ctx.preset, ctx.sol.mode(), cfg.m_lo,
                                               cfg.m_hi, cfg.n_seeds, cfg.model.seed);
    const fs::path dir = prepare_out(cfg);

    json out{{"config", echo_config(cfg, ctx)},
             {"levels", res.levels},
             {"residual_decreasing", res.decreasing},
             {"drift_decreasing", drift.decreasing}};
    for (Eigen::Index j = 0; j < res.mean_sup.size(); ++j)
        out["residual_mean_sup"].push_back(res.mean_sup[j]);
    for (Eigen::Index j = 0; j < drift.mean_sup.size(); ++j)
        out["drift_mean_sup"].push_back(drift.mean_sup[j]);
    out["runtime_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_json(dir / "residual.json", out);

    std::cout << "verify-residual: residual decreasing: " << (res.decreasing ? "yes" : "no")
              << ", local drift decreasing: " << (drift.decreasing ? "yes" : "no") << "\n";
    return 0;
}

int run_twist_demo(CliConfig& cfg) {
    const int max_level = cfg.model.ref_level > 0 ? cfg.model.ref_level : cfg.model.level;
    const WalkHierarchy hier =
        build_twisted_hierarchy(cfg.model.seed, max_level, cfg.model.horizon);
    std::vector<WalkLevel> walks;
    for (const TwistedWalk& tw : hier.levels) walks.push_back(shrink(tw, cfg.model.horizon));
    const fs::path dir = prepare_out(cfg);
    write_text(dir / "walks.csv", [&](std::ostream& os) { write_walks_csv(os, walks); });

    std::cout << "twist-demo: levels 0.." << max_level << " over T=" << cfg.model.horizon
              << ", walks in " << dir << "\n";
    return 0;
}

int run_counterexample(CliConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    cfg.model.preset = "counterexample";
    const SimContext ctx = make_context(cfg.model);
    const QPathSample method = simulate_qm_path(ctx, 0);
    if (method.abort)
        throw RuntimeAbort("counterexample: method path aborted at t=" +
                           std::to_string(method.abort->t));

    const double horizon = cfg.model.horizon;
    const WalkLevel fine = make_simple_walk(
        cfg.model.seed, 0, 2, ctx.ref_level,
        static_cast<std::int64_t>(std::floor(std::ldexp(horizon, 2 * ctx.ref_level) + 1e-9)));
    const SampledSeries strong = counterexample_strong_series(
        fine, ctx.preset.params.a, ctx.preset.params.d, cfg.model.x0, horizon,
        method.n_steps());

    const fs::path dir = prepare_out(cfg);
    write_text(dir / "counterexample.csv", [&](std::ostream& os) {
        write_paired_csv(os, strong.times, method.x, strong.values);
    });
    const double method_min = method.x.minCoeff();
    write_json(dir / "summary.json",
               json{{"config", echo_config(cfg, ctx)},
                    {"method_terminal", method.x[method.x.size() - 1]},
                    {"method_min", method_min},
                    {"method_all_positive", method_min > 0.0},
                    {"strong_terminal", strong.values[strong.values.size() - 1]},
                    {"strong_min", strong.values.minCoeff()},
                    {"strong_negative", strong.values[strong.values.size() - 1] < 0.0},
                    {"runtime_seconds",
                     std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                         .count()}});

    std::cout << "counterexample: method stays positive (min "
              << format_sig17(method_min) << "), strong terminal "
              << format_sig17(strong.values[strong.values.size() - 1]) << ", artifacts in "
              << dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CliConfig cfg;

    try {
        // --config is honoured before flag parsing so flags can override it;
        // environment sits between the two.
        for (int i = 1; i < argc; ++i) {
            const std::string arg = argv[i];
            if (arg == "--config" && i + 1 < argc) apply_config_file(argv[i + 1], cfg);
            else if (arg.rfind("--config=", 0) == 0) apply_config_file(arg.substr(9), cfg);
        }
        apply_environment(cfg);
    } catch (const ConfigError& e) {
        std::cerr << json{{"error", {{"kind", "config"}, {"message", e.what()}}}} << "\n";
        return 2;
    }

    CLI::App app{"numerical studies of walk-driven scalar diffusions"};
    app.require_subcommand(1);

    int rc = 0;
    auto bind = [&](CLI::App* cmd, int (*fn)(CliConfig&)) {
        add_model_options(cmd, cfg);
        cmd->callback([&rc, fn, &cfg]() { rc = fn(cfg); });
        return cmd;
    };

    bind(app.add_subcommand("simulate", "sample one tilted path and dump it"), run_simulate);
    auto* ens = bind(app.add_subcommand("ensemble", "terminal statistics over many paths"),
                     run_ensemble_cmd);
    ens->add_option("--N", cfg.n_paths, "number of paths");
    auto* con = bind(app.add_subcommand("converge", "multi-level pathwise error study"),
                     run_converge);
    con->add_option("--m-lo", cfg.m_lo, "coarsest level");
    con->add_option("--m-hi", cfg.m_hi, "finest compared level");
    con->add_option("--n-seeds", cfg.n_seeds, "independent replications");
    auto* mar = bind(app.add_subcommand("verify-martingale",
                                        "likelihood-ratio mean and exact enumeration checks"),
                     run_verify_martingale);
    mar->add_option("--n-mc", cfg.n_mc, "Monte Carlo paths");
    mar->add_option("--n-enum", cfg.n_enum, "enumeration steps (<= 14)");
    auto* dis = bind(app.add_subcommand("verify-distribution",
                                        "terminal law against the closed form"),
                     run_verify_distribution);
    dis->add_option("--N", cfg.n_paths, "number of paths");
    auto* resid = bind(app.add_subcommand("verify-residual",
                                          "equation residual and local drift trends"),
                       run_verify_residual);
    resid->add_option("--m-lo", cfg.m_lo, "coarsest level");
    resid->add_option("--m-hi", cfg.m_hi, "finest level");
    resid->add_option("--n-seeds", cfg.n_seeds, "independent replications");
    bind(app.add_subcommand("twist-demo", "export the twisted walk family as CSV"),
         run_twist_demo);
    bind(app.add_subcommand("counterexample",
                            "method path vs strong solution for the failing model"),
         run_counterexample);

    try {
        app.parse(argc, argv);
        return rc;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        std::cerr << json{{"error", {{"kind", "config"}, {"message", e.what()}}}} << "\n";
        return 2;
    } catch (const ResourceError& e) {
        std::cerr << json{{"error",
                           {{"kind", "resource"},
                            {"message", e.what()},
                            {"level", e.level},
                            {"shortfall", e.shortfall}}}}
                  << "\n";
        return 4;
    } catch (const PositivityError& e) {
        std::cerr << json{{"error",
                           {{"kind", "abort"},
                            {"message", e.what()},
                            {"t", e.t},
                            {"x", e.x}}}}
                  << "\n";
        return 3;
    } catch (const RuntimeAbort& e) {
        std::cerr << json{{"error", {{"kind", "abort"}, {"message", e.what()}}}} << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", {{"kind", "abort"}, {"message", e.what()}}}} << "\n";
        return 3;
    }
}
