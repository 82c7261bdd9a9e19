#include "sdewalk/girsanov.hpp"

#include <cmath>
#include <stdexcept>

namespace sdewalk {

double log_cosh(double x) {
    const double ax = std::abs(x);
    // cosh x = e^|x| (1 + e^-2|x|) / 2; the log of each factor is safe.
    return ax - M_LN2 + std::log1p(std::exp(-2.0 * ax));
}

QStepLaw step_law(double psi, int level) {
    if (!std::isfinite(psi)) throw std::invalid_argument("step_law: psi must be finite");
    QStepLaw law;
    law.psi = psi;
    law.level = level;
    const double xarg = std::ldexp(psi, -level);
    const double th = std::tanh(xarg);
    law.q_plus = 0.5 - 0.5 * th;
    law.q_minus = 0.5 + 0.5 * th;
    const double lc = log_cosh(xarg);
    law.dlog_lambda_up = -xarg - lc;
    law.dlog_lambda_down = xarg - lc;
    return law;
}

QPathSample evolve_q_path(const PhiSolution& sol, int level, std::int64_t n_steps,
                          const std::function<int(std::int64_t, double)>& stepper) {
    QPathSample path;
    path.level = level;
    path.b.resize(n_steps + 1);
    path.x.resize(n_steps + 1);
    path.w.resize(n_steps + 1);
    path.log_lambda.resize(n_steps + 1);
    path.psi.resize(n_steps);
    path.q_plus.resize(n_steps);
    path.steps.resize(static_cast<std::size_t>(n_steps));

    const double h = path.mesh();
    const double h2 = path.time_mesh();

    path.b[0] = 0.0;
    path.x[0] = sol.phi(0.0, 0.0);
    path.w[0] = 0.0;
    path.log_lambda[0] = 0.0;
    double drift = 0.0;  // cumulative tanh(psi 2^-m) 2^-m correction

    std::int64_t done = 0;
    for (std::int64_t r = 0; r < n_steps; ++r) {
        const double t_r = static_cast<double>(r) * h2;
        double ps;
        try {
            ps = psi_tilde(sol, t_r, path.b[r]);
        } catch (const RuntimeAbort& e) {
            path.abort = QPathSample::Abort{t_r, e.what()};
            break;
        }
        if (!std::isfinite(ps)) {
            path.abort = QPathSample::Abort{t_r, "psi is not finite"};
            break;
        }
        const QStepLaw law = step_law(ps, level);
        path.psi[r] = ps;
        path.q_plus[r] = law.q_plus;

        const int eps = stepper(r, law.q_plus);
        path.steps[static_cast<std::size_t>(r)] = static_cast<std::int8_t>(eps);
        path.b[r + 1] = path.b[r] + (eps > 0 ? h : -h);
        drift += std::tanh(std::ldexp(ps, -level)) * h;
        path.w[r + 1] = path.b[r + 1] + drift;
        path.log_lambda[r + 1] =
            path.log_lambda[r] + (eps > 0 ? law.dlog_lambda_up : law.dlog_lambda_down);
        try {
            path.x[r + 1] = sol.phi(static_cast<double>(r + 1) * h2, path.b[r + 1]);
        } catch (const RuntimeAbort& e) {
            path.abort = QPathSample::Abort{static_cast<double>(r + 1) * h2, e.what()};
            break;
        }
        ++done;
    }

    if (done < n_steps) {
        path.b.conservativeResize(done + 1);
        path.x.conservativeResize(done + 1);
        path.w.conservativeResize(done + 1);
        path.log_lambda.conservativeResize(done + 1);
        path.psi.conservativeResize(done);
        path.q_plus.conservativeResize(done);
        path.steps.resize(static_cast<std::size_t>(done));
    }
    return path;
}

double log_lambda_m(const QPathSample& path) {
    return path.log_lambda[path.log_lambda.size() - 1];
}

double lambda_m(const QPathSample& path) { return std::exp(log_lambda_m(path)); }

double log_path_probability(const QPathSample& path) {
    double acc = 0.0;
    for (std::int64_t r = 0; r < path.n_steps(); ++r) {
        const double xarg = std::ldexp(path.psi[r], -path.level);
        // log q_eps = -log 2 - eps x - log cosh x (exact form of the step law)
        const double eps = path.steps[static_cast<std::size_t>(r)] > 0 ? 1.0 : -1.0;
        acc += -M_LN2 - eps * xarg - log_cosh(xarg);
    }
    return acc;
}

double path_probability(const QPathSample& path) {
    return std::exp(log_path_probability(path));
}

double log_continuous_lambda_approx(const PhiSolution& sol, const WalkLevel& walk,
                                    double t) {
    const std::int64_t n =
        static_cast<std::int64_t>(std::floor(std::ldexp(t, 2 * walk.level)));
    if (n > static_cast<std::int64_t>(walk.n_steps()))
        throw RangeError("continuous_lambda_approx: time runs past the walk horizon");

    const double h = walk.mesh();
    const double h2 = walk.time_mesh();
    double acc = 0.0;
    std::int64_t s = 0;
    for (std::int64_t r = 1; r <= n; ++r) {
        const double t_prev = static_cast<double>(r - 1) * h2;
        const double b_prev = static_cast<double>(s) * h;
        const double ps = psi_tilde(sol, t_prev, b_prev);
        const std::int8_t xi = walk.increments[static_cast<std::size_t>(r - 1)];
        acc += -ps * (xi > 0 ? h : -h) - log_cosh(std::ldexp(ps, -walk.level));
        s += xi;
    }
    return acc;
}

double continuous_lambda_approx(const PhiSolution& sol, const WalkLevel& walk, double t) {
    return std::exp(log_continuous_lambda_approx(sol, walk, t));
}

}  // namespace sdewalk
