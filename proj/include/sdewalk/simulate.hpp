#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sdewalk/coefficients.hpp"
#include "sdewalk/girsanov.hpp"
#include "sdewalk/phi.hpp"
#include "sdewalk/walker.hpp"

namespace sdewalk {

// Everything a run needs, as plain data.  `preset` "custom" switches to the
// expression fields; `phi_mode` "auto" uses the closed form when the model
// has one and the grid solver otherwise.
struct ModelConfig {
    std::string preset = "gbm";
    PresetParams params;
    std::string mu_expr;
    std::string sigma_expr;
    std::string sigma_dx_expr;
    double x0 = 1.0;
    double horizon = 1.0;
    int level = 5;          // walk resolution m
    int ref_level = 0;      // fine proxy resolution M; 0 means level + 4
    std::uint64_t seed = 1;
    double u_extent = 0.0;  // initial half-width of the solved u range; 0 = auto
    std::string phi_mode = "auto";  // auto | analytic | numeric
};

// Resolved, immutable run state shared by all paths of a run.
struct SimContext {
    ModelConfig cfg;
    Preset preset;
    PhiSolution sol;
    int ref_level = 0;
    std::int64_t n_steps = 0;  // steps to reach the horizon at cfg.level
};

SimContext make_context(const ModelConfig& cfg);

// One path under the tilted measure: at each step draw U uniform on [0,1)
// and step up exactly when U <= q_plus.  Path index selects the substream,
// so ensembles are reproducible path-by-path regardless of scheduling.
QPathSample simulate_qm_path(const SimContext& ctx, std::uint64_t path_index);

struct EnsembleSummary {
    std::int64_t n_paths = 0;
    std::int64_t n_aborted = 0;
    double terminal_mean = 0.0;  // over completed paths
    double terminal_se = 0.0;
    Eigen::ArrayXd terminals;            // completed paths only
    std::vector<std::int64_t> aborted;   // indices of aborted paths
    double runtime_seconds = 0.0;
};

EnsembleSummary run_ensemble(const SimContext& ctx, std::int64_t n_paths, int jobs);

// ---- closed-form references used by tests and the verification harnesses --

struct GaussianLaw {
    double mean = 0.0;
    double sd = 1.0;
};

// Terminal value of dX = c X dt + a X dW given the driving value W(t).
double oracle_gbm_terminal(double a, double c, double x0, double t, double w);

// Law of log X(t) for the same model (exact, Gaussian).
GaussianLaw oracle_gbm_log_law(double a, double c, double x0, double t);

// Law of X(t) for dX = (c X + d) dt + b dW (exact, Gaussian; c may be 0).
GaussianLaw oracle_ou_law(double b, double c, double d, double x0, double t);

// Pathwise strong solution of dX = -d dt + a X dB along a given fine walk:
//   X(t) = Y(t) (x0 - d * int_0^t Y(s)^-1 ds),  Y(t) = exp(a B(t) - a^2 t/2),
// integrated with a left Riemann rule on the walk's clock.  This is the
// solution the tilted sampler cannot reach once it crosses zero.
struct StrongSolutionStats {
    double terminal = 0.0;
    double min_value = 0.0;
    bool negative = false;  // terminal < 0
};

StrongSolutionStats counterexample_strong_terminal(const WalkLevel& fine, double a,
                                                   double d, double x0, double t);

struct SampledSeries {
    Eigen::ArrayXd times;
    Eigen::ArrayXd values;
};

SampledSeries counterexample_strong_series(const WalkLevel& fine, double a, double d,
                                           double x0, double t,
                                           std::int64_t max_points = 2048);

}  // namespace sdewalk
