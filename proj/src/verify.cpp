#include "sdewalk/verify.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "sdewalk/errors.hpp"
#include "sdewalk/rng.hpp"
#include "sdewalk/walker.hpp"

namespace sdewalk {

namespace {

// Substream tags (tag 0 = hierarchy levels, 1 = ensembles, 2 = free walks).
constexpr std::uint64_t kTagConvergence = 3;
constexpr std::uint64_t kTagMartingale = 4;
constexpr std::uint64_t kTagDrift = 5;
constexpr std::uint64_t kTagResidual = 6;

double default_extent(double horizon) { return 6.0 * std::sqrt(horizon) + 1.0; }

std::int64_t horizon_steps(int level, double horizon) {
    return static_cast<std::int64_t>(std::floor(std::ldexp(horizon, 2 * level) + 1e-9));
}

void check_level_range(int m_lo, int m_hi, int n_seeds) {
    if (m_lo < 0 || m_hi < m_lo) throw ConfigError("invalid level range");
    if (n_seeds < 1) throw ConfigError("need at least one seed");
}

}  // namespace

ConvergenceReport convergence_study(const Preset& preset, PhiMode mode, int m_lo,
                                    int m_hi, int ref_level, int n_seeds,
                                    std::uint64_t seed) {
    check_level_range(m_lo, m_hi, n_seeds);
    if (ref_level < m_hi) throw ConfigError("ref_level must be at least the top level");

    const double horizon = preset.coeffs.horizon;
    const PhiSolution sol = solve_phi(preset, mode, default_extent(horizon), ref_level);

    ConvergenceReport rep;
    rep.ref_level = ref_level;
    for (int m = m_lo; m <= m_hi; ++m) rep.levels.push_back(m);
    const int n_levels = static_cast<int>(rep.levels.size());
    rep.errors.resize(n_seeds, n_levels);

    for (int i = 0; i < n_seeds; ++i) {
        const std::uint64_t seed_i =
            Rng::derive(seed, static_cast<std::uint64_t>(i), kTagConvergence);
        rep.seeds.push_back(seed_i);

        const WalkHierarchy hier = build_twisted_hierarchy(seed_i, ref_level, horizon);
        const WalkLevel ref = shrink(hier.levels[static_cast<std::size_t>(ref_level)]);

        // Proxy values on the top comparison clock; coarser clocks subsample it.
        const std::int64_t n_hi = horizon_steps(m_hi, horizon);
        const std::int64_t stride_hi = std::int64_t{1} << (2 * (ref_level - m_hi));
        const Eigen::ArrayXd proxy = subsampled_values(ref, stride_hi, n_hi);

        WalkLevel embedded;
        for (int m = m_hi; m >= m_lo; --m) {
            embedded = skorohod_embed(m == m_hi ? ref : embedded, m);
            const std::int64_t n_m = horizon_steps(m, horizon);
            const Eigen::ArrayXd walk = walk_values(embedded, n_m);
            const std::int64_t sub = std::int64_t{1} << (2 * (m_hi - m));
            const double h2 = std::ldexp(1.0, -2 * m);

            double sup = 0.0;
            for (std::int64_t r = 0; r <= n_m; ++r) {
                const double t_r = static_cast<double>(r) * h2;
                const double gap =
                    std::abs(sol.phi(t_r, walk[r]) - sol.phi(t_r, proxy[r * sub]));
                sup = std::max(sup, gap);
            }
            rep.errors(i, m - m_lo) = sup;
        }
    }

    rep.mean_errors = rep.errors.colwise().mean().transpose().array();
    rep.mean_ratios.resize(std::max(0, n_levels - 1));
    double grand = 0.0;
    for (int j = 0; j + 1 < n_levels; ++j) {
        rep.mean_ratios[j] =
            (rep.errors.col(j).array() / rep.errors.col(j + 1).array()).mean();
        grand += rep.mean_ratios[j];
    }
    rep.grand_mean_ratio = n_levels > 1 ? grand / (n_levels - 1) : 0.0;
    return rep;
}

MartingaleReport martingale_tests(const SimContext& ctx, std::int64_t n_mc, int n_enum) {
    if (n_mc < 2) throw ConfigError("martingale MC needs at least two paths");
    if (n_enum < 1 || n_enum > 14)
        throw ConfigError("enumeration depth must be in [1, 14]");

    MartingaleReport rep;
    rep.n_mc = n_mc;
    rep.n_enum = n_enum;
    const int level = ctx.cfg.level;

    // Monte Carlo under the symmetric measure: the likelihood ratio must
    // average to one.
    std::vector<double> lambdas;
    lambdas.reserve(static_cast<std::size_t>(n_mc));
    for (std::int64_t i = 0; i < n_mc; ++i) {
        Rng rng(ctx.cfg.seed, static_cast<std::uint64_t>(i), kTagMartingale);
        const QPathSample path = evolve_q_path(
            ctx.sol, level, ctx.n_steps, [&rng](std::int64_t, double) { return rng.coin(); });
        if (path.abort)
            throw RuntimeAbort("martingale MC: path aborted at t=" +
                               std::to_string(path.abort->t) + " (" + path.abort->reason + ")");
        lambdas.push_back(lambda_m(path));
    }
    double mean = 0.0;
    for (double v : lambdas) mean += v;
    mean /= static_cast<double>(n_mc);
    double m2 = 0.0;
    for (double v : lambdas) m2 += (v - mean) * (v - mean);
    rep.mc_mean = mean;
    rep.mc_se = std::sqrt(m2 / static_cast<double>(n_mc - 1) / static_cast<double>(n_mc));
    rep.mc_within_4se = std::abs(mean - 1.0) <= 4.0 * rep.mc_se;

    // Exact enumeration over all sign sequences of an n_enum-step path.
    const std::uint64_t n_paths = std::uint64_t{1} << n_enum;
    double sum_prob = 0.0, sum_lambda = 0.0, sum_lambda_w = 0.0, sum_q_w = 0.0;
    double max_identity_gap = 0.0;
    for (std::uint64_t mask = 0; mask < n_paths; ++mask) {
        const QPathSample path =
            evolve_q_path(ctx.sol, level, n_enum, [mask](std::int64_t r, double) {
                return (mask >> r) & 1 ? 1 : -1;
            });
        if (path.abort)
            throw RuntimeAbort("martingale enumeration: path aborted (" +
                               path.abort->reason + ")");
        const double prob = path_probability(path);
        const double lambda = lambda_m(path);
        const double w_term = path.w[path.w.size() - 1];
        sum_prob += prob;
        sum_lambda += lambda;
        sum_lambda_w += lambda * w_term;
        sum_q_w += prob * w_term;
        max_identity_gap =
            std::max(max_identity_gap, std::abs(prob - std::ldexp(lambda, -n_enum)));
    }
    const double inv = std::ldexp(1.0, -n_enum);  // fair-coin weight 2^-n
    rep.enum_prob_gap = std::abs(sum_prob - 1.0);
    rep.enum_lambda_gap = std::abs(sum_lambda * inv - 1.0);
    rep.enum_lambda_w_gap = std::abs(sum_lambda_w * inv);
    rep.enum_q_w_gap = std::abs(sum_q_w);
    rep.enum_weight_identity_gap = max_identity_gap;
    return rep;
}

DistributionReport distribution_test(const SimContext& ctx, std::int64_t n_paths,
                                     int jobs) {
    const EnsembleSummary ens = run_ensemble(ctx, n_paths, jobs);
    if (ens.terminals.size() == 0) throw RuntimeAbort("distribution test: no completed paths");

    DistributionReport rep;
    rep.n_samples = ens.terminals.size();
    rep.n_aborted = ens.n_aborted;

    const PresetParams& p = ctx.preset.params;
    const double x0 = ctx.cfg.x0;
    const double horizon = ctx.cfg.horizon;

    if (ctx.preset.name == "gbm") {
        const GaussianLaw law = oracle_gbm_log_law(p.a, p.c, x0, horizon);
        const Eigen::ArrayXd logs = ens.terminals.log();
        rep.ks = ks_statistic(
            logs, [law](double x) { return normal_cdf(x, law.mean, law.sd); });
        rep.law = "lognormal: log X ~ N(" + std::to_string(law.mean) + ", " +
                  std::to_string(law.sd) + "^2)";
    } else if (ctx.preset.name == "ou") {
        const GaussianLaw law = oracle_ou_law(p.b, p.c, p.d, x0, horizon);
        rep.ks = ks_statistic(
            ens.terminals, [law](double x) { return normal_cdf(x, law.mean, law.sd); });
        rep.law = "N(" + std::to_string(law.mean) + ", " + std::to_string(law.sd) + "^2)";
    } else {
        throw ConfigError("distribution test: no closed-form terminal law for preset \"" +
                          ctx.preset.name + "\" (supported: gbm, ou)");
    }
    return rep;
}

TrendReport local_drift_test(const Preset& preset, PhiMode mode, int m_lo, int m_hi,
                             int n_seeds, std::uint64_t seed) {
    check_level_range(m_lo, m_hi, n_seeds);
    const double horizon = preset.coeffs.horizon;

    TrendReport rep;
    for (int m = m_lo; m <= m_hi; ++m) rep.levels.push_back(m);
    rep.mean_sup.resize(static_cast<Eigen::Index>(rep.levels.size()));

    for (std::size_t col = 0; col < rep.levels.size(); ++col) {
        const int m = rep.levels[col];
        const PhiSolution sol = solve_phi(preset, mode, default_extent(horizon), m);
        const std::int64_t n_m = horizon_steps(m, horizon);
        const double h2 = std::ldexp(1.0, -2 * m);

        double acc = 0.0;
        for (int s = 0; s < n_seeds; ++s) {
            const WalkLevel walk = make_simple_walk(
                seed, static_cast<std::uint64_t>(s) * 64 + static_cast<std::uint64_t>(m),
                kTagDrift, m, n_m);
            const Eigen::ArrayXd vals = walk_values(walk, n_m);
            double sup = 0.0;
            for (std::int64_t r = 1; r <= n_m; ++r) {
                const double t_r = static_cast<double>(r) * h2;
                const double gap =
                    std::abs(nu_m(sol, m, r, vals[r]) - nu(sol, t_r, vals[r]));
                sup = std::max(sup, gap);
            }
            acc += sup;
        }
        rep.mean_sup[static_cast<Eigen::Index>(col)] = acc / n_seeds;
    }

    rep.decreasing = true;
    for (Eigen::Index j = 0; j + 1 < rep.mean_sup.size(); ++j)
        if (!(rep.mean_sup[j + 1] < rep.mean_sup[j] ||
              (rep.mean_sup[j] == 0.0 && rep.mean_sup[j + 1] == 0.0)))
            rep.decreasing = false;
    return rep;
}

TrendReport residual_test(const Preset& preset, PhiMode mode, int m_lo, int m_hi,
                          int n_seeds, std::uint64_t seed) {
    check_level_range(m_lo, m_hi, n_seeds);
    const double horizon = preset.coeffs.horizon;
    const CoefficientField& c = preset.coeffs;

    TrendReport rep;
    for (int m = m_lo; m <= m_hi; ++m) rep.levels.push_back(m);
    rep.mean_sup.resize(static_cast<Eigen::Index>(rep.levels.size()));

    for (std::size_t col = 0; col < rep.levels.size(); ++col) {
        const int m = rep.levels[col];
        const PhiSolution sol = solve_phi(preset, mode, default_extent(horizon), m);
        const std::int64_t n_m = horizon_steps(m, horizon);
        const double h2 = std::ldexp(1.0, -2 * m);

        double acc = 0.0;
        for (int s = 0; s < n_seeds; ++s) {
            Rng rng(seed, static_cast<std::uint64_t>(s) * 64 + static_cast<std::uint64_t>(m),
                    kTagResidual);
            const QPathSample path =
                evolve_q_path(sol, m, n_m, [&rng](std::int64_t, double q_plus) {
                    return rng.uniform01() <= q_plus ? 1 : -1;
                });
            if (path.abort)
                throw RuntimeAbort("residual test: path aborted at t=" +
                                   std::to_string(path.abort->t));

            double sup = 0.0;
            double acc_mu = 0.0, acc_sig = 0.0;
            for (std::int64_t r = 1; r <= n_m; ++r) {
                const double t_prev = static_cast<double>(r - 1) * h2;
                const double x_prev = path.x[r - 1];
                acc_mu += c.mu(t_prev, x_prev) * h2;
                acc_sig += c.sigma(t_prev, x_prev) * (path.w[r] - path.w[r - 1]);
                const double res = path.x[r] - path.x[0] - acc_mu - acc_sig;
                sup = std::max(sup, std::abs(res));
            }
            acc += sup;
        }
        rep.mean_sup[static_cast<Eigen::Index>(col)] = acc / n_seeds;
    }

    rep.decreasing = true;
    for (Eigen::Index j = 0; j + 1 < rep.mean_sup.size(); ++j)
        if (!(rep.mean_sup[j + 1] < rep.mean_sup[j] ||
              (rep.mean_sup[j] == 0.0 && rep.mean_sup[j + 1] == 0.0)))
            rep.decreasing = false;
    return rep;
}

double ks_statistic(const Eigen::ArrayXd& samples,
                    const std::function<double(double)>& cdf) {
    const auto n = static_cast<std::size_t>(samples.size());
    if (n == 0) throw ConfigError("ks_statistic: empty sample");
    std::vector<double> xs(samples.data(), samples.data() + n);
    std::sort(xs.begin(), xs.end());

    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = cdf(xs[i]);
        const double lo = static_cast<double>(i) / static_cast<double>(n);
        const double hi = static_cast<double>(i + 1) / static_cast<double>(n);
        d = std::max({d, f - lo, hi - f});
    }
    return d;
}

double normal_cdf(double x, double mean, double sd) {
    return 0.5 * std::erfc(-(x - mean) / (sd * M_SQRT2));
}

}  // namespace sdewalk
