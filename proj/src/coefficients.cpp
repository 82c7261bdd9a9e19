#include "sdewalk/coefficients.hpp"

#include <cmath>

#include "sdewalk/errors.hpp"

namespace sdewalk {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

void check_geometry(double x0, double horizon) {
    require(std::isfinite(x0), "x0 must be finite");
    require(std::isfinite(horizon) && horizon > 0.0, "horizon T must be positive");
}

Preset gbm(const PresetParams& p, double x0, double horizon) {
    require(p.a > 0.0, "gbm: a must be positive");
    require(x0 > 0.0, "gbm: x0 must be positive");
    const double a = p.a, c = p.c;
    Preset out;
    out.name = "gbm";
    out.params = p;
    out.coeffs = {[c](double, double x) { return c * x; },
                  [a](double, double x) { return a * x; },
                  [a](double, double) { return a; },
                  x0,
                  horizon,
                  false,
                  "geometric Brownian motion: mu = c x, sigma = a x"};
    out.analytic = AnalyticPhi{
        [a, x0](double, double u) { return x0 * std::exp(a * u); },
        [a, x0](double, double u) { return a * x0 * std::exp(a * u); },
        [](double, double) { return 0.0; },
        [a, x0](double, double u) { return a * a * x0 * std::exp(a * u); }};
    return out;
}

Preset linear_sigma(const PresetParams& p, double x0, double horizon) {
    require(p.a > 0.0, "linear-sigma: a must be positive");
    require(p.a * x0 + p.b > 0.0, "linear-sigma: requires a*x0 + b > 0");
    const double a = p.a, b = p.b, c = p.c, d = p.d;
    const double shift = b / a;
    const double scale = x0 + shift;
    Preset out;
    out.name = "linear-sigma";
    out.params = p;
    out.coeffs = {[c, d](double, double x) { return c * x + d; },
                  [a, b](double, double x) { return a * x + b; },
                  [a](double, double) { return a; },
                  x0,
                  horizon,
                  false,
                  "affine diffusion: mu = c x + d, sigma = a x + b"};
    out.analytic = AnalyticPhi{
        [scale, shift, a](double, double u) { return scale * std::exp(a * u) - shift; },
        [scale, a](double, double u) { return a * scale * std::exp(a * u); },
        [](double, double) { return 0.0; },
        [scale, a](double, double u) { return a * a * scale * std::exp(a * u); }};
    return out;
}

Preset ou(const PresetParams& p, double x0, double horizon) {
    require(p.b > 0.0, "ou: b must be positive");
    const double b = p.b, c = p.c, d = p.d;
    Preset out;
    out.name = "ou";
    out.params = p;
    out.coeffs = {[c, d](double, double x) { return c * x + d; },
                  [b](double, double) { return b; },
                  [](double, double) { return 0.0; },
                  x0,
                  horizon,
                  false,
                  "Ornstein-Uhlenbeck: mu = c x + d, sigma = b"};
    out.analytic = AnalyticPhi{[b, x0](double, double u) { return b * u + x0; },
                               [b](double, double) { return b; },
                               [](double, double) { return 0.0; },
                               [](double, double) { return 0.0; }};
    return out;
}

Preset counterexample(const PresetParams& p, double x0, double horizon) {
    require(p.a > 0.0, "counterexample: a must be positive");
    require(p.d > 0.0, "counterexample: d must be positive");
    require(x0 > 0.0, "counterexample: x0 must be positive");
    const double a = p.a, d = p.d;
    Preset out;
    out.name = "counterexample";
    out.params = p;
    out.coeffs = {[d](double, double) { return -d; },
                  [a](double, double x) { return a * x; },
                  [a](double, double) { return a; },
                  x0,
                  horizon,
                  false,
                  "constant down-drift with multiplicative noise: mu = -d, sigma = a x"};
    out.analytic = AnalyticPhi{
        [a, x0](double, double u) { return x0 * std::exp(a * u); },
        [a, x0](double, double u) { return a * x0 * std::exp(a * u); },
        [](double, double) { return 0.0; },
        [a, x0](double, double u) { return a * a * x0 * std::exp(a * u); }};
    return out;
}

}  // namespace

Preset make_preset(const std::string& name, const PresetParams& params, double x0,
                   double horizon) {
    check_geometry(x0, horizon);
    if (name == "gbm") return gbm(params, x0, horizon);
    if (name == "linear-sigma") return linear_sigma(params, x0, horizon);
    if (name == "ou") return ou(params, x0, horizon);
    if (name == "counterexample") return counterexample(params, x0, horizon);
    throw ConfigError("unknown preset \"" + name +
                      "\" (valid: gbm, linear-sigma, ou, counterexample)");
}

Preset make_custom(const std::string& mu_expr, const std::string& sigma_expr,
                   const std::string& sigma_dx_expr, double x0, double horizon) {
    check_geometry(x0, horizon);
    if (sigma_dx_expr.empty())
        throw ConfigError("custom coefficients need sigma_dx (no symbolic differentiation)");
    Expr mu = parse_expression(mu_expr);
    Expr sigma = parse_expression(sigma_expr);
    Expr sigma_dx = parse_expression(sigma_dx_expr);

    const double s0 = sigma(0.0, x0);
    if (!(s0 > 0.0) || !std::isfinite(s0))
        throw ConfigError("custom sigma must be positive and finite at (0, x0)");

    Preset out;
    out.name = "custom";
    out.coeffs = {[mu](double t, double x) { return mu(t, x); },
                  [sigma](double t, double x) { return sigma(t, x); },
                  [sigma_dx](double t, double x) { return sigma_dx(t, x); },
                  x0,
                  horizon,
                  sigma.uses_time(),
                  "custom: mu = " + mu_expr + ", sigma = " + sigma_expr};
    return out;
}

}  // namespace sdewalk
