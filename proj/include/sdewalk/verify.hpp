#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sdewalk/simulate.hpp"

namespace sdewalk {

// Multi-level pathwise comparison: one fine twisted walk per seed acts as the
// Brownian proxy, every coarser walk is first-passage embedded into it, and
//   e_m = sup_{t_r <= T} | phi(t_r, B_m(t_r)) - phi(t_r, B_M(t_r)) |
// measures how far the level-m state path strays from the proxy's.
struct ConvergenceReport {
    int ref_level = 0;
    std::vector<int> levels;
    std::vector<std::uint64_t> seeds;
    Eigen::MatrixXd errors;      // seeds x levels
    Eigen::ArrayXd mean_errors;  // per level
    Eigen::ArrayXd mean_ratios;  // per consecutive level pair, mean of e_m / e_{m+1}
    double grand_mean_ratio = 0.0;
};

ConvergenceReport convergence_study(const Preset& preset, PhiMode mode, int m_lo,
                                    int m_hi, int ref_level, int n_seeds,
                                    std::uint64_t seed);

// Two independent checks that the tilt is a genuine change of measure:
// a Monte Carlo mean of the likelihood ratio under the symmetric measure
// (must be 1 within noise), and exact enumeration over all sign sequences of
// a short path (sums must hit their algebraic values to rounding).
struct MartingaleReport {
    std::int64_t n_mc = 0;
    double mc_mean = 0.0;
    double mc_se = 0.0;
    bool mc_within_4se = false;

    int n_enum = 0;
    double enum_prob_gap = 0.0;             // | sum of tilted path probabilities - 1 |
    double enum_lambda_gap = 0.0;           // | mean likelihood ratio - 1 |
    double enum_lambda_w_gap = 0.0;         // | mean of likelihood ratio * W |
    double enum_q_w_gap = 0.0;              // | tilted mean of W |
    double enum_weight_identity_gap = 0.0;  // max | path prob - 2^-n lambda |
};

MartingaleReport martingale_tests(const SimContext& ctx, std::int64_t n_mc, int n_enum);

// Terminal-law check of sampled paths against the model's closed-form law
// (gbm: lognormal, ou: Gaussian); reports the Kolmogorov-Smirnov statistic.
struct DistributionReport {
    std::int64_t n_samples = 0;
    std::int64_t n_aborted = 0;
    double ks = 0.0;
    std::string law;
};

DistributionReport distribution_test(const SimContext& ctx, std::int64_t n_paths,
                                     int jobs);

// Shared shape for per-level trend harnesses: mean over seeds of a pathwise
// sup, one entry per level, plus whether the means strictly decrease.
struct TrendReport {
    std::vector<int> levels;
    Eigen::ArrayXd mean_sup;
    bool decreasing = false;
};

// sup over walk points of | nu_m - nu |: the lattice drift must approach the
// continuum drift as the mesh refines.
TrendReport local_drift_test(const Preset& preset, PhiMode mode, int m_lo, int m_hi,
                             int n_seeds, std::uint64_t seed);

// sup over a tilted path of the equation residual
//   X(t_n) - x0 - sum mu(t_{r-1}, X_{r-1}) h^2 - sum sigma(t_{r-1}, X_{r-1}) dW_r,
// which must shrink as the mesh refines (and vanish exactly when mu = 0 and
// sigma is constant).
TrendReport residual_test(const Preset& preset, PhiMode mode, int m_lo, int m_hi,
                          int n_seeds, std::uint64_t seed);

// Exact two-sided Kolmogorov-Smirnov distance of a sample against a CDF.
double ks_statistic(const Eigen::ArrayXd& samples,
                    const std::function<double(double)>& cdf);

double normal_cdf(double x, double mean, double sd);

}  // namespace sdewalk
