#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "sdewalk/coefficients.hpp"
#include "sdewalk/errors.hpp"

namespace sdewalk {

enum class PhiMode { analytic, numeric };

// Space map phi(t, u): the solution of d/du phi = sigma(t, phi), phi(t,0)=x0,
// which turns a walk value u into a state X = phi(t, u).  Either backed by a
// registered closed form or by a cached grid solve (classic Runge-Kutta along
// u, rows keyed by the time index r with t_r = r 4^-level).
//
// Numeric lookups are node-exact: t and u must lie on the solve grid, which
// every walk value at the matching level does by construction.  Rows extend
// themselves in u when a query lands outside the initially solved extent.  If
// sigma stops being positive along a row, the row is truncated there and a
// query beyond the truncation point raises PositivityError; merely solving
// past a degenerate region a run never visits is not an error.
//
// Thread safety: all accessors are const and may be called concurrently; the
// lazy row cache is guarded internally.
class PhiSolution {
  public:
    double phi(double t, double u) const;
    double phi_u(double t, double u) const;   // equals sigma(t, phi(t,u))
    double phi_t(double t, double u) const;   // 0 when sigma ignores t
    double phi_uu(double t, double u) const;  // sigma_dx(t,phi) * sigma(t,phi)

    const CoefficientField& coefficients() const { return coeffs_; }
    PhiMode mode() const { return mode_; }
    int grid_level() const { return level_; }

  private:
    friend PhiSolution solve_phi(const Preset& preset, PhiMode mode, double u_extent,
                                 int level);

    struct Row {
        std::vector<double> phi_pos, phi_neg;  // phi at u = +-j * h_u, index j
        std::vector<double> sig_pos, sig_neg;  // sigma(t, phi) at the same nodes
        bool trunc_pos = false, trunc_neg = false;
        double trunc_phi_pos = 0.0, trunc_phi_neg = 0.0;  // first offending phi
    };
    struct NumericState {
        std::int64_t initial_extent = 0;
        mutable std::unordered_map<std::int64_t, Row> rows;
        mutable std::mutex lock;
    };

    std::pair<double, double> node(double t, double u) const;  // (phi, sigma)
    const Row& ensure_row_locked(std::int64_t r, std::int64_t extent) const;
    void march(Row& row, double t, std::int64_t from, std::int64_t to) const;
    std::int64_t time_index(double t) const;
    std::int64_t space_index(double u) const;

    CoefficientField coeffs_;
    std::optional<AnalyticPhi> closed_;
    PhiMode mode_ = PhiMode::analytic;
    int level_ = 0;
    double h_u_ = 1.0;
    double h_t_ = 1.0;
    std::int64_t r_max_ = 0;
    std::shared_ptr<NumericState> state_;
};

// Build the space map for a model.  analytic mode requires the preset to
// carry a closed form; numeric mode solves on the dyadic grid of the given
// level with initial half-width u_extent (it grows on demand afterwards).
PhiSolution solve_phi(const Preset& preset, PhiMode mode, double u_extent, int level);

// Local drift of the mapped process: nu = phi_t + phi_uu / 2.
double nu(const PhiSolution& sol, double t, double u);

// Lattice counterpart of nu at clock level m, time index r, node u: trapezoid
// sum of the divided time difference of phi_u (zero when sigma ignores t)
// plus half the divided second space difference of phi, both over mesh 2^-m.
// The r = 0 step has no earlier row and is defined as phi_uu(0,0)/2.
double nu_m(const PhiSolution& sol, int level, std::int64_t r, double u);

// Drift mismatch per unit noise: (nu - mu(t, phi)) / sigma(t, phi).
// The change of measure tilts each walk step by this amount.
double psi_tilde(const PhiSolution& sol, double t, double u);

// Coarse check of the linear-growth conditions the convergence theory needs.
// k0_hat probes |sigma| / (1 + |x - x0|) over the mapped range, k_hat probes
// |psi_tilde| / (1 + |u|); k_hat is also measured over half the extent, and a
// more-than-2x jump between the two flags super-linear growth.
struct GrowthDiagnostics {
    double k0_hat = 0.0;
    double k_hat = 0.0;
    double k_hat_half = 0.0;
    bool sigma_positive = true;
    bool growth_warning = false;
};

GrowthDiagnostics growth_diagnostics(const PhiSolution& sol, double u_extent,
                                     double u_step);

}  // namespace sdewalk
