#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sdewalk/phi.hpp"
#include "sdewalk/walker.hpp"

namespace sdewalk {

// log(cosh(x)) without overflow for large |x|.
double log_cosh(double x);

// One-step law of the tilted walk at a given drift mismatch psi:
//   q_plus  = 1/2 - 1/2 tanh(psi 2^-m)      (prob. of an up step)
//   q_minus = 1/2 + 1/2 tanh(psi 2^-m)
// and the matching log-likelihood-ratio increments for each step sign,
//   dlog_lambda(eps) = -psi eps 2^-m - log cosh(psi 2^-m),
// which satisfy q_eps = 1/2 * exp(dlog_lambda(eps)) exactly.
struct QStepLaw {
    double psi = 0.0;
    int level = 0;
    double q_plus = 0.5;
    double q_minus = 0.5;
    double dlog_lambda_up = 0.0;
    double dlog_lambda_down = 0.0;
};

QStepLaw step_law(double psi, int level);

// A walk evolved under the tilted measure, with everything the sampler and
// the verification harnesses need recorded along the way.  Arrays b, x, w and
// log_lambda hold n+1 values (index = step count); psi, q_plus and steps hold
// one entry per step, indexed by the step's starting time.
//
// If the run had to stop early (sigma degenerated, walk left the solvable
// range), `abort` carries the stop time and reason and the arrays are
// truncated to the last valid step.
struct QPathSample {
    int level = 0;
    Eigen::ArrayXd b;           // tilted walk values
    Eigen::ArrayXd x;           // mapped process phi(t_r, b_r)
    Eigen::ArrayXd w;           // drift-corrected walk (martingale under Q)
    Eigen::ArrayXd log_lambda;  // cumulative log likelihood ratio, starts at 0
    Eigen::ArrayXd psi;
    Eigen::ArrayXd q_plus;
    std::vector<std::int8_t> steps;

    struct Abort {
        double t = 0.0;
        std::string reason;
    };
    std::optional<Abort> abort;

    std::int64_t n_steps() const { return static_cast<std::int64_t>(steps.size()); }
    double mesh() const { return std::ldexp(1.0, -level); }
    double time_mesh() const { return std::ldexp(1.0, -2 * level); }
    double time_at(std::int64_t r) const { return static_cast<double>(r) * time_mesh(); }
};

// Drive a path for n_steps steps, asking `stepper(r, q_plus)` for each step
// sign.  Pass a fair coin to sample under the symmetric measure, a thresholded
// uniform for the tilted measure, or a fixed sign table for enumeration.
QPathSample evolve_q_path(const PhiSolution& sol, int level, std::int64_t n_steps,
                          const std::function<int(std::int64_t, double)>& stepper);

// Likelihood ratio of the sampled path at its endpoint.
double log_lambda_m(const QPathSample& path);
double lambda_m(const QPathSample& path);

// Probability of the recorded sign sequence under the tilted measure,
// prod_r q^{eps}_r.  Equals 2^-n * lambda at the endpoint (exact identity).
double log_path_probability(const QPathSample& path);
double path_probability(const QPathSample& path);

// Likelihood ratio accumulated along an already-generated fine walk (the
// proxy for a true Brownian driver).  The solution must be evaluable on the
// walk's grid, i.e. analytic or solved at walk.level.
double log_continuous_lambda_approx(const PhiSolution& sol, const WalkLevel& walk,
                                    double t);
double continuous_lambda_approx(const PhiSolution& sol, const WalkLevel& walk, double t);

}  // namespace sdewalk
