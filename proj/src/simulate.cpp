#include "sdewalk/simulate.hpp"

#include <chrono>
#include <cmath>
#include <thread>

#include "sdewalk/errors.hpp"
#include "sdewalk/rng.hpp"

namespace sdewalk {

namespace {

// Substream tags; keep in sync with the verification harnesses.
constexpr std::uint64_t kTagEnsemble = 1;

PhiMode resolve_mode(const std::string& mode, const Preset& preset) {
    if (mode == "analytic") return PhiMode::analytic;
    if (mode == "numeric") return PhiMode::numeric;
    if (mode == "auto")
        return preset.analytic ? PhiMode::analytic : PhiMode::numeric;
    throw ConfigError("phi_mode must be one of auto, analytic, numeric");
}

}  // namespace

SimContext make_context(const ModelConfig& cfg) {
    if (cfg.level < 0 || cfg.level > 14) throw ConfigError("level m must be in [0, 14]");
    if (cfg.ref_level != 0 && cfg.ref_level < cfg.level)
        throw ConfigError("ref_level M must be at least the walk level m");

    Preset preset = cfg.preset == "custom"
                        ? make_custom(cfg.mu_expr, cfg.sigma_expr, cfg.sigma_dx_expr,
                                      cfg.x0, cfg.horizon)
                        : make_preset(cfg.preset, cfg.params, cfg.x0, cfg.horizon);

    const PhiMode mode = resolve_mode(cfg.phi_mode, preset);
    const double extent =
        cfg.u_extent > 0.0 ? cfg.u_extent : 6.0 * std::sqrt(cfg.horizon) + 1.0;
    PhiSolution sol = solve_phi(preset, mode, extent, cfg.level);

    SimContext ctx{cfg, std::move(preset), std::move(sol), 0, 0};
    ctx.ref_level = cfg.ref_level > 0 ? cfg.ref_level : cfg.level + 4;
    ctx.n_steps =
        static_cast<std::int64_t>(std::floor(std::ldexp(cfg.horizon, 2 * cfg.level) + 1e-9));
    return ctx;
}

QPathSample simulate_qm_path(const SimContext& ctx, std::uint64_t path_index) {
    Rng rng(ctx.cfg.seed, path_index, kTagEnsemble);
    return evolve_q_path(ctx.sol, ctx.cfg.level, ctx.n_steps,
                         [&rng](std::int64_t, double q_plus) {
                             return rng.uniform01() <= q_plus ? 1 : -1;
                         });
}

EnsembleSummary run_ensemble(const SimContext& ctx, std::int64_t n_paths, int jobs) {
    if (n_paths <= 0) throw ConfigError("ensemble size must be positive");
    const auto t0 = std::chrono::steady_clock::now();

    Eigen::ArrayXd terminal(n_paths);
    std::vector<char> ok(static_cast<std::size_t>(n_paths), 0);

    const int n_threads = std::max(1, jobs);
    auto worker = [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t i = lo; i < hi; ++i) {
            const QPathSample p = simulate_qm_path(ctx, static_cast<std::uint64_t>(i));
            if (p.abort) {
                ok[static_cast<std::size_t>(i)] = 0;
                terminal[i] = 0.0;
            } else {
                ok[static_cast<std::size_t>(i)] = 1;
                terminal[i] = p.x[p.x.size() - 1];
            }
        }
    };

    if (n_threads == 1) {
        worker(0, n_paths);
    } else {
        std::vector<std::thread> pool;
        const std::int64_t chunk = (n_paths + n_threads - 1) / n_threads;
        for (int t = 0; t < n_threads; ++t) {
            const std::int64_t lo = t * chunk;
            const std::int64_t hi = std::min<std::int64_t>(n_paths, lo + chunk);
            if (lo < hi) pool.emplace_back(worker, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    EnsembleSummary out;
    out.n_paths = n_paths;
    std::vector<double> kept;
    kept.reserve(static_cast<std::size_t>(n_paths));
    for (std::int64_t i = 0; i < n_paths; ++i) {
        if (ok[static_cast<std::size_t>(i)]) kept.push_back(terminal[i]);
        else out.aborted.push_back(i);
    }
    out.n_aborted = static_cast<std::int64_t>(out.aborted.size());
    out.terminals = Eigen::Map<const Eigen::ArrayXd>(kept.data(),
                                                     static_cast<Eigen::Index>(kept.size()));
    if (!kept.empty()) {
        out.terminal_mean = out.terminals.mean();
        if (kept.size() > 1) {
            const double var =
                (out.terminals - out.terminal_mean).square().sum() /
                static_cast<double>(kept.size() - 1);
            out.terminal_se = std::sqrt(var / static_cast<double>(kept.size()));
        }
    }
    out.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

double oracle_gbm_terminal(double a, double c, double x0, double t, double w) {
    return x0 * std::exp((c - 0.5 * a * a) * t + a * w);
}

GaussianLaw oracle_gbm_log_law(double a, double c, double x0, double t) {
    return {std::log(x0) + (c - 0.5 * a * a) * t, std::abs(a) * std::sqrt(t)};
}

GaussianLaw oracle_ou_law(double b, double c, double d, double x0, double t) {
    if (c == 0.0) return {x0 + d * t, std::abs(b) * std::sqrt(t)};
    const double growth = std::exp(c * t);
    const double mean = x0 * growth + d * std::expm1(c * t) / c;
    const double var = b * b * std::expm1(2.0 * c * t) / (2.0 * c);
    return {mean, std::sqrt(var)};
}

namespace {

// Shared core: evolve 1/Y and the left-rule integral along the walk.  The
// per-step factors are constant because the walk only moves by +-2^-M.
template <typename Visit>
void strong_solution_scan(const WalkLevel& fine, double a, double d, double x0, double t,
                          Visit&& visit) {
    const std::int64_t n =
        static_cast<std::int64_t>(std::floor(std::ldexp(t, 2 * fine.level) + 1e-9));
    if (n > static_cast<std::int64_t>(fine.n_steps()))
        throw RangeError("strong solution: time runs past the walk horizon");

    const double h = fine.mesh();
    const double h2 = fine.time_mesh();
    // 1/Y(t_{k+1}) = 1/Y(t_k) * exp(-a dB + a^2 h2 / 2)
    const double f_up = std::exp(-a * h + 0.5 * a * a * h2);
    const double f_dn = std::exp(a * h + 0.5 * a * a * h2);

    double inv_y = 1.0;
    double integral = 0.0;
    visit(0, x0);
    for (std::int64_t k = 1; k <= n; ++k) {
        integral += inv_y * h2;  // left rule: value at t_{k-1}
        inv_y *= fine.increments[static_cast<std::size_t>(k - 1)] > 0 ? f_up : f_dn;
        visit(k, (x0 - d * integral) / inv_y);
    }
}

}  // namespace

StrongSolutionStats counterexample_strong_terminal(const WalkLevel& fine, double a,
                                                   double d, double x0, double t) {
    StrongSolutionStats out;
    out.min_value = x0;
    strong_solution_scan(fine, a, d, x0, t, [&](std::int64_t, double x) {
        out.terminal = x;
        out.min_value = std::min(out.min_value, x);
    });
    out.negative = out.terminal < 0.0;
    return out;
}

SampledSeries counterexample_strong_series(const WalkLevel& fine, double a, double d,
                                           double x0, double t, std::int64_t max_points) {
    const std::int64_t n =
        static_cast<std::int64_t>(std::floor(std::ldexp(t, 2 * fine.level) + 1e-9));
    const std::int64_t stride = std::max<std::int64_t>(1, n / std::max<std::int64_t>(1, max_points));
    std::vector<double> ts, xs;
    strong_solution_scan(fine, a, d, x0, t, [&](std::int64_t k, double x) {
        if (k % stride == 0 || (k == n && n % stride != 0)) {
            ts.push_back(static_cast<double>(k) * fine.time_mesh());
            xs.push_back(x);
        }
    });
    SampledSeries out;
    out.times = Eigen::Map<const Eigen::ArrayXd>(ts.data(), static_cast<Eigen::Index>(ts.size()));
    out.values = Eigen::Map<const Eigen::ArrayXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    return out;
}

}  // namespace sdewalk
