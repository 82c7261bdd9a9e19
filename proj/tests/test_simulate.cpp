#include <doctest.h>

#include <cmath>

#include "sdewalk/errors.hpp"
#include "sdewalk/simulate.hpp"

using namespace sdewalk;

namespace {

ModelConfig gbm_cfg(int level, std::uint64_t seed = 1) {
    ModelConfig cfg;
    cfg.preset = "gbm";
    cfg.params.a = 1.0;
    cfg.params.c = 1.0;
    cfg.x0 = 1.0;
    cfg.horizon = 1.0;
    cfg.level = level;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("context: resolution of defaults and validation") {
    const SimContext ctx = make_context(gbm_cfg(5));
    CHECK(ctx.ref_level == 9);                 // level + 4 by default
    CHECK(ctx.n_steps == 1024);                // floor(T 4^m)
    CHECK(ctx.sol.mode() == PhiMode::analytic);  // auto prefers the closed form

    ModelConfig bad = gbm_cfg(5);
    bad.level = 15;
    CHECK_THROWS_AS((void)make_context(bad), ConfigError);
    bad = gbm_cfg(5);
    bad.ref_level = 3;  // finer than the walk level is required
    CHECK_THROWS_AS((void)make_context(bad), ConfigError);
    bad = gbm_cfg(5);
    bad.horizon = 0.0;
    CHECK_THROWS_AS((void)make_context(bad), ConfigError);
    bad = gbm_cfg(5);
    bad.phi_mode = "sideways";
    CHECK_THROWS_AS((void)make_context(bad), ConfigError);

    ModelConfig num = gbm_cfg(4);
    num.phi_mode = "numeric";
    CHECK(make_context(num).sol.mode() == PhiMode::numeric);

    ModelConfig cus = gbm_cfg(3);
    cus.preset = "custom";
    cus.mu_expr = "0";
    cus.sigma_expr = "1";
    cus.sigma_dx_expr = "0";
    cus.x0 = 0.0;
    const SimContext cctx = make_context(cus);
    CHECK(cctx.sol.mode() == PhiMode::numeric);  // no closed form registered
    CHECK(cctx.preset.name == "custom");
}

TEST_CASE("single path: starts at x0, stays on the mapped walk, reproducible") {
    const SimContext ctx = make_context(gbm_cfg(4, 99));
    const QPathSample a = simulate_qm_path(ctx, 7);
    const QPathSample b = simulate_qm_path(ctx, 7);
    const QPathSample other = simulate_qm_path(ctx, 8);

    REQUIRE_FALSE(a.abort.has_value());
    CHECK(a.x[0] == 1.0);
    for (int r = 0; r <= a.n_steps(); ++r)
        CHECK(a.x[r] == doctest::Approx(std::exp(a.b[r])).epsilon(1e-13));

    CHECK((a.b == b.b).all());
    CHECK(a.steps == b.steps);
    CHECK(a.steps != other.steps);
}

TEST_CASE("ensemble: deterministic regardless of thread count") {
    const SimContext ctx = make_context(gbm_cfg(3, 2024));
    const EnsembleSummary one = run_ensemble(ctx, 64, 1);
    const EnsembleSummary four = run_ensemble(ctx, 64, 4);
    REQUIRE(one.terminals.size() == 64);
    REQUIRE(four.terminals.size() == 64);
    CHECK((one.terminals == four.terminals).all());
    CHECK(one.terminal_mean == four.terminal_mean);
    CHECK(one.n_aborted == 0);
}

TEST_CASE("ensemble: mean terminal near the closed-form expectation") {
    // E X(T) = x0 e^{cT}; discretization bias at this resolution is far below
    // the Monte Carlo band.
    const SimContext ctx = make_context(gbm_cfg(5, 31));
    const EnsembleSummary ens = run_ensemble(ctx, 4000, 1);
    REQUIRE(ens.n_aborted == 0);
    const double target = std::exp(1.0);
    CHECK(std::abs(ens.terminal_mean - target) < 4.0 * ens.terminal_se + 0.01);
    CHECK(ens.terminal_se > 0.0);
    CHECK(ens.terminal_se < 0.2);
}

TEST_CASE("oracles: exponential-model terminal and log law") {
    CHECK(oracle_gbm_terminal(1.0, 1.0, 1.0, 0.0, 0.0) == 1.0);
    // X = x0 exp((c - a^2/2) t + a w).
    CHECK(oracle_gbm_terminal(1.0, 1.0, 1.0, 1.0, 0.25) ==
          doctest::Approx(std::exp(0.75)).epsilon(1e-14));
    CHECK(oracle_gbm_terminal(2.0, 0.5, 3.0, 2.0, -1.0) ==
          doctest::Approx(3.0 * std::exp((0.5 - 2.0) * 2.0 - 2.0)).epsilon(1e-14));

    const GaussianLaw law = oracle_gbm_log_law(1.0, 1.0, 1.0, 1.0);
    CHECK(law.mean == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(law.sd == 1.0);
    const GaussianLaw law2 = oracle_gbm_log_law(0.5, 0.25, 2.0, 4.0);
    CHECK(law2.mean == doctest::Approx(std::log(2.0) + (0.25 - 0.125) * 4.0).epsilon(1e-14));
    CHECK(law2.sd == doctest::Approx(0.5 * 2.0).epsilon(1e-15));
}

TEST_CASE("oracles: mean-reverting law including the c -> 0 limit") {
    // c = -1, b = 1, d = 0, x0 = 0, T = 1: mean 0, variance (1 - e^-2)/2.
    const GaussianLaw law = oracle_ou_law(1.0, -1.0, 0.0, 0.0, 1.0);
    CHECK(law.mean == 0.0);
    CHECK(law.sd * law.sd == doctest::Approx(0.43233235838169365).epsilon(1e-13));

    // Mean with drift: x0 e^{cT} + (d/c)(e^{cT} - 1), here d/c = -1/2.
    const GaussianLaw law2 = oracle_ou_law(0.5, -2.0, 1.0, 3.0, 1.0);
    const double ect = std::exp(-2.0);
    CHECK(law2.mean == doctest::Approx(3.0 * ect - 0.5 * (ect - 1.0)).epsilon(1e-13));

    // Exact c = 0 limit: mean x0 + dT, variance b^2 T.
    const GaussianLaw lim = oracle_ou_law(2.0, 0.0, 0.5, 1.0, 4.0);
    CHECK(lim.mean == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(lim.sd == doctest::Approx(4.0).epsilon(1e-15));

    // Continuity: a tiny c lands next to the c = 0 value.
    const GaussianLaw near = oracle_ou_law(2.0, 1e-10, 0.5, 1.0, 4.0);
    CHECK(near.mean == doctest::Approx(lim.mean).epsilon(1e-8));
    CHECK(near.sd == doctest::Approx(lim.sd).epsilon(1e-8));
}

TEST_CASE("strong solution scan: no drift reduces to the exponential map") {
    // d = 0 makes X(t) = x0 Y(t) > 0 with Y = exp(a B - a^2 t / 2).
    const WalkLevel w = make_simple_walk(7, 0, 2, 4, 256);
    const StrongSolutionStats s = counterexample_strong_terminal(w, 1.0, 0.0, 2.0, 1.0);
    const Eigen::ArrayXd vals = walk_values(w, 256);
    const double expect = 2.0 * std::exp(vals[256] - 0.5);
    CHECK(s.terminal == doctest::Approx(expect).epsilon(1e-9));
    CHECK_FALSE(s.negative);
    CHECK(s.min_value > 0.0);

    // t = 0 means no steps: the terminal is x0 whatever the walk.
    const StrongSolutionStats s0 = counterexample_strong_terminal(w, 1.0, 1.0, 2.0, 0.0);
    CHECK(s0.terminal == 2.0);
}

TEST_CASE("strong solution series: aligned, deduplicated sampling") {
    const WalkLevel w = make_simple_walk(7, 1, 2, 4, 256);

    // Stride 4^(4-2) = 16: exactly the method clock at level 2.
    const SampledSeries s = counterexample_strong_series(w, 1.0, 1.0, 1.0, 1.0, 16);
    REQUIRE(s.times.size() == 17);
    REQUIRE(s.values.size() == 17);
    CHECK(s.times[0] == 0.0);
    CHECK(s.values[0] == 1.0);
    CHECK(s.times[16] == 1.0);
    for (int k = 1; k < 17; ++k) CHECK(s.times[k] - s.times[k - 1] ==
                                       doctest::Approx(0.0625).epsilon(1e-12));

    // Terminal matches the full-resolution scan.
    const StrongSolutionStats full = counterexample_strong_terminal(w, 1.0, 1.0, 1.0, 1.0);
    CHECK(s.values[16] == doctest::Approx(full.terminal).epsilon(1e-12));

    // Non-dividing max_points still ends exactly at the horizon, once.
    const SampledSeries odd = counterexample_strong_series(w, 1.0, 1.0, 1.0, 1.0, 100);
    CHECK(odd.times[odd.times.size() - 1] == doctest::Approx(1.0).epsilon(1e-12));
    for (int k = 1; k < odd.times.size(); ++k)
        CHECK(odd.times[k] > odd.times[k - 1]);  // strictly increasing, no dup
}

TEST_CASE("strong solution: the pathological model really crosses zero") {
    // With a = d = x0 = 1 over T = 5 essentially every driver pushes the
    // strong solution negative (the subtracted integral has expectation
    // e^T - 1 ~ 147, dwarfing x0 = 1) while the mapped sampler cannot
    // leave (0, inf).
    int negative = 0;
    for (std::uint64_t i = 0; i < 200; ++i) {
        const WalkLevel w = make_simple_walk(424242, i, 2, 5, 5 * 1024);
        const StrongSolutionStats s = counterexample_strong_terminal(w, 1.0, 1.0, 1.0, 5.0);
        if (s.negative) ++negative;
    }
    CHECK(negative > 150);
}
