#pragma once

#include <functional>
#include <optional>
#include <string>

#include "sdewalk/expr.hpp"

namespace sdewalk {

// Drift / diffusion pair of a scalar equation dX = mu dt + sigma dB, plus the
// x-derivative of sigma (needed for second derivatives of the space map) and
// the run geometry.  sigma must be positive wherever a run actually evaluates
// it; that is enforced lazily at the evaluation sites, not here.
struct CoefficientField {
    std::function<double(double, double)> mu;
    std::function<double(double, double)> sigma;
    std::function<double(double, double)> sigma_dx;
    double x0 = 1.0;
    double horizon = 1.0;
    bool sigma_time_dependent = false;
    std::string description;
};

// Closed-form space map phi(t, u) with the derivatives the sampler needs.
struct AnalyticPhi {
    std::function<double(double, double)> phi;
    std::function<double(double, double)> phi_u;
    std::function<double(double, double)> phi_t;
    std::function<double(double, double)> phi_uu;
};

struct PresetParams {
    double a = 1.0;
    double b = 1.0;
    double c = 1.0;
    double d = 1.0;
};

// A named model: coefficients, their parameters, and (for the built-ins) the
// closed-form space map.  Custom expression models carry no analytic part.
struct Preset {
    std::string name;
    PresetParams params;
    CoefficientField coeffs;
    std::optional<AnalyticPhi> analytic;
};

// Built-in models:
//   gbm            mu = c x,     sigma = a x      (a > 0, x0 > 0)
//   linear-sigma   mu = c x + d, sigma = a x + b  (a > 0, x0 > -b/a)
//   ou             mu = c x + d, sigma = b        (b > 0)
//   counterexample mu = -d,      sigma = a x      (a, d, x0 > 0)
// Unknown names raise ConfigError listing the valid ones.
Preset make_preset(const std::string& name, const PresetParams& params, double x0,
                   double horizon);

// Model from expression strings in variables t, x.  The derivative of sigma
// must be spelled out by the caller; there is no symbolic differentiation.
Preset make_custom(const std::string& mu_expr, const std::string& sigma_expr,
                   const std::string& sigma_dx_expr, double x0, double horizon);

}  // namespace sdewalk
