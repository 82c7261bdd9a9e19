#include "sdewalk/phi.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sdewalk/path_sums.hpp"

namespace sdewalk {

namespace {

constexpr int kMaxLevel = 14;
constexpr double kOverflowGuard = 1e154;  // |phi| beyond this aborts the march
constexpr int kSubsteps = 4;              // Runge-Kutta substeps per grid node

// One classic fourth-order Runge-Kutta step of d/du y = sigma(t, y).
double rk4_step(const CoefficientField& c, double t, double y, double h) {
    const double k1 = c.sigma(t, y);
    const double k2 = c.sigma(t, y + 0.5 * h * k1);
    const double k3 = c.sigma(t, y + 0.5 * h * k2);
    const double k4 = c.sigma(t, y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

PhiSolution solve_phi(const Preset& preset, PhiMode mode, double u_extent, int level) {
    PhiSolution sol;
    sol.coeffs_ = preset.coeffs;
    sol.mode_ = mode;

    if (mode == PhiMode::analytic) {
        if (!preset.analytic)
            throw ConfigError("preset \"" + preset.name +
                              "\" has no closed-form space map; use numeric mode");
        sol.closed_ = preset.analytic;
        return sol;
    }

    if (level < 0 || level > kMaxLevel)
        throw ConfigError("solve level must be in [0, " + std::to_string(kMaxLevel) + "]");
    if (!(u_extent > 0.0)) throw ConfigError("u_extent must be positive");

    sol.level_ = level;
    sol.h_u_ = std::ldexp(1.0, -level);
    sol.h_t_ = std::ldexp(1.0, -2 * level);
    sol.r_max_ = static_cast<std::int64_t>(std::ceil(preset.coeffs.horizon / sol.h_t_ - 1e-9));
    sol.state_ = std::make_shared<PhiSolution::NumericState>();
    sol.state_->initial_extent =
        static_cast<std::int64_t>(std::ceil(u_extent / sol.h_u_ - 1e-9));

    // Solve the t = 0 row eagerly so obviously broken coefficients fail fast.
    std::scoped_lock hold(sol.state_->lock);
    sol.ensure_row_locked(0, sol.state_->initial_extent);
    return sol;
}

std::int64_t PhiSolution::time_index(double t) const {
    const double raw = t / h_t_;
    const double rounded = std::nearbyint(raw);
    if (std::abs(raw - rounded) > 1e-9)
        throw RangeError("phi lookup: t is not on the solve time grid");
    const auto r = static_cast<std::int64_t>(rounded);
    if (r < 0 || r > r_max_)
        throw RangeError("phi lookup: t outside the solved horizon");
    return r;
}

std::int64_t PhiSolution::space_index(double u) const {
    const double raw = u / h_u_;
    const double rounded = std::nearbyint(raw);
    if (std::abs(raw - rounded) > 1e-9)
        throw RangeError("phi lookup: u is not on the solve grid");
    return static_cast<std::int64_t>(rounded);
}

void PhiSolution::march(Row& row, double t, std::int64_t /*from*/, std::int64_t to) const {
    const CoefficientField& c = coeffs_;
    auto extend = [&](std::vector<double>& phis, std::vector<double>& sigs, bool& trunc,
                      double& trunc_phi, double dir) {
        while (static_cast<std::int64_t>(phis.size()) - 1 < to && !trunc) {
            double y = phis.back();
            const double h = dir * h_u_ / kSubsteps;
            bool ok = true;
            for (int s = 0; s < kSubsteps && ok; ++s) {
                y = rk4_step(c, t, y, h);
                if (!std::isfinite(y) || std::abs(y) > kOverflowGuard ||
                    !(c.sigma(t, y) > 0.0)) {
                    trunc = true;
                    trunc_phi = y;
                    ok = false;
                }
            }
            if (!ok) break;
            phis.push_back(y);
            sigs.push_back(c.sigma(t, y));
        }
    };
    extend(row.phi_pos, row.sig_pos, row.trunc_pos, row.trunc_phi_pos, +1.0);
    extend(row.phi_neg, row.sig_neg, row.trunc_neg, row.trunc_phi_neg, -1.0);
}

const PhiSolution::Row& PhiSolution::ensure_row_locked(std::int64_t r,
                                                       std::int64_t extent) const {
    Row& row = state_->rows[r];
    if (row.phi_pos.empty()) {
        const double t = static_cast<double>(r) * h_t_;
        const double x0 = coeffs_.x0;
        row.phi_pos.push_back(x0);
        row.phi_neg.push_back(x0);
        const double s0 = coeffs_.sigma(t, x0);
        row.sig_pos.push_back(s0);
        row.sig_neg.push_back(s0);
        if (!(s0 > 0.0) || !std::isfinite(s0)) {
            row.trunc_pos = row.trunc_neg = true;
            row.trunc_phi_pos = row.trunc_phi_neg = x0;
        }
    }
    const std::int64_t have =
        std::min<std::int64_t>(static_cast<std::int64_t>(row.phi_pos.size()),
                               static_cast<std::int64_t>(row.phi_neg.size())) -
        1;
    if (extent > have) {
        const double t = static_cast<double>(r) * h_t_;
        // Grow geometrically so repeated small overshoots stay cheap.
        march(row, t, have, std::max(extent, 2 * have));
    }
    return row;
}

std::pair<double, double> PhiSolution::node(double t, double u) const {
    if (mode_ == PhiMode::analytic) return {closed_->phi(t, u), closed_->phi_u(t, u)};

    const std::int64_t r = coeffs_.sigma_time_dependent ? time_index(t) : 0;
    const std::int64_t j = space_index(u);
    const std::int64_t extent = std::max(std::abs(j), state_->initial_extent);

    std::scoped_lock hold(state_->lock);
    const Row& row = ensure_row_locked(r, extent);
    const auto& phis = j >= 0 ? row.phi_pos : row.phi_neg;
    const auto& sigs = j >= 0 ? row.sig_pos : row.sig_neg;
    const bool trunc = j >= 0 ? row.trunc_pos : row.trunc_neg;
    const double trunc_phi = j >= 0 ? row.trunc_phi_pos : row.trunc_phi_neg;
    const std::int64_t aj = std::abs(j);
    if (aj >= static_cast<std::int64_t>(phis.size())) {
        if (trunc)
            throw PositivityError(t, trunc_phi,
                                  "sigma lost positivity along the space map at t=" +
                                      std::to_string(t));
        throw RangeError("phi lookup: node beyond solvable extent");
    }
    return {phis[static_cast<std::size_t>(aj)], sigs[static_cast<std::size_t>(aj)]};
}

double PhiSolution::phi(double t, double u) const { return node(t, u).first; }

double PhiSolution::phi_u(double t, double u) const { return node(t, u).second; }

double PhiSolution::phi_uu(double t, double u) const {
    if (mode_ == PhiMode::analytic) return closed_->phi_uu(t, u);
    const auto [p, s] = node(t, u);
    return coeffs_.sigma_dx(t, p) * s;
}

double PhiSolution::phi_t(double t, double u) const {
    if (mode_ == PhiMode::analytic) return closed_->phi_t(t, u);
    if (!coeffs_.sigma_time_dependent) return 0.0;

    const std::int64_t r = time_index(t);
    auto phi_at_row = [&](std::int64_t rr) {
        return node(static_cast<double>(rr) * h_t_, u).first;
    };
    if (r == 0) return (phi_at_row(1) - phi_at_row(0)) / h_t_;
    if (r == r_max_) return (phi_at_row(r) - phi_at_row(r - 1)) / h_t_;
    return (phi_at_row(r + 1) - phi_at_row(r - 1)) / (2.0 * h_t_);
}

double nu(const PhiSolution& sol, double t, double u) {
    return sol.phi_t(t, u) + 0.5 * sol.phi_uu(t, u);
}

double nu_m(const PhiSolution& sol, int level, std::int64_t r, double u) {
    if (r == 0) return 0.5 * sol.phi_uu(0.0, 0.0);

    const double h = std::ldexp(1.0, -level);
    const double h2 = h * h;
    const double t_cur = static_cast<double>(r) * h2;
    const double t_prev = static_cast<double>(r - 1) * h2;

    const double second_diff =
        (sol.phi(t_prev, u + h) - 2.0 * sol.phi(t_prev, u) + sol.phi(t_prev, u - h)) /
        (2.0 * h2);

    double time_part = 0.0;
    if (sol.coefficients().sigma_time_dependent) {
        const GridFunction dtf{[&](double, double x) {
                                   return (sol.phi_u(t_cur, x) - sol.phi_u(t_prev, x)) / h2;
                               },
                               Smoothness::continuous};
        const DyadicGrid grid = DyadicGrid::dyadic(level);
        time_part = trapezoidal_sum(dtf, 0.0, grid, 0, grid.index_of(u));
    }
    return time_part + second_diff;
}

double psi_tilde(const PhiSolution& sol, double t, double u) {
    const double sig = sol.phi_u(t, u);
    if (!(sig > 0.0) || !std::isfinite(sig))
        throw PositivityError(t, sol.phi(t, u),
                              "sigma(t, phi) not positive in psi_tilde at t=" +
                                  std::to_string(t));
    return (nu(sol, t, u) - sol.coefficients().mu(t, sol.phi(t, u))) / sig;
}

GrowthDiagnostics growth_diagnostics(const PhiSolution& sol, double u_extent,
                                     double u_step) {
    if (!(u_extent > 0.0) || !(u_step > 0.0))
        throw ConfigError("growth_diagnostics: extent and step must be positive");

    GrowthDiagnostics out;
    const CoefficientField& c = sol.coefficients();

    std::vector<double> ts;
    if (sol.mode() == PhiMode::numeric && c.sigma_time_dependent) {
        const double h_t = std::ldexp(1.0, -2 * sol.grid_level());
        const auto r_max = static_cast<std::int64_t>(std::ceil(c.horizon / h_t - 1e-9));
        const std::int64_t stride = std::max<std::int64_t>(1, r_max / 16);
        for (std::int64_t r = 0; r <= r_max; r += stride) ts.push_back(r * h_t);
    } else {
        ts.push_back(0.0);
    }

    std::vector<double> us;
    if (sol.mode() == PhiMode::numeric) {
        const double h_u = std::ldexp(1.0, -sol.grid_level());
        const auto stride = std::max<std::int64_t>(
            1, static_cast<std::int64_t>(std::nearbyint(u_step / h_u)));
        const auto jmax = static_cast<std::int64_t>(std::ceil(u_extent / h_u - 1e-9));
        for (std::int64_t j = -jmax; j <= jmax; j += stride) us.push_back(j * h_u);
    } else {
        for (double u = -u_extent; u <= u_extent + 1e-12; u += u_step) us.push_back(u);
    }

    for (double t : ts) {
        for (double u : us) {
            try {
                const double p = sol.phi(t, u);
                const double sig = sol.phi_u(t, u);
                if (!(sig > 0.0)) {
                    out.sigma_positive = false;
                    continue;
                }
                out.k0_hat = std::max(out.k0_hat, std::abs(sig) / (1.0 + std::abs(p - c.x0)));
                const double growth = std::abs(psi_tilde(sol, t, u)) / (1.0 + std::abs(u));
                out.k_hat = std::max(out.k_hat, growth);
                if (std::abs(u) <= 0.5 * u_extent + 1e-12)
                    out.k_hat_half = std::max(out.k_hat_half, growth);
            } catch (const RuntimeAbort&) {
                out.sigma_positive = false;
            }
        }
    }
    out.growth_warning = out.k_hat > 2.0 * out.k_hat_half + 1e-12;
    return out;
}

}  // namespace sdewalk
