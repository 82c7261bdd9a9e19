#pragma once

#include <cstdint>

#include "sdewalk/grid.hpp"
#include "sdewalk/walker.hpp"

namespace sdewalk {

// Discrete path integral T f h between two lattice nodes: signed trapezoid
// rule with half weights at both endpoints and full weights at the interior
// nodes.  It depends only on the endpoints, so any two paths with the same
// endpoints give the same value; equal endpoints give exactly 0.
double trapezoidal_sum(const GridFunction& f, double t, const DyadicGrid& grid,
                       std::int64_t from, std::int64_t to);

// Same quantity accumulated edge by edge along a concrete path,
// (h/2) * sum_r mu_r * (f(x_r) + f(x_r + mu_r h)).
// Kept as the slow reference: agreement with the closed form above is the
// off-by-one guard for the endpoint weights.
double trapezoidal_sum_edges(const GridFunction& f, double t, const DiscretePath& path);

// Exact decomposition of T f(t_n, .) h over a path into time, martingale and
// quadratic-variation parts (the lattice analogue of the Ito formula).  The
// identity total() == trapezoidal_sum(f, t_n, ...) holds to rounding for any
// f and any path; nothing is approximated.
struct ItoDecomposition {
    double time_term = 0.0;
    double stochastic_term = 0.0;
    double quadratic_term = 0.0;

    double total() const { return time_term + stochastic_term + quadratic_term; }
};

ItoDecomposition discrete_ito_decompose(const GridFunction& f, const DiscretePath& path);

// Same left-hand side split Stratonovich-style: time part as above plus a
// midpoint-rule martingale sum (no separate quadratic term).
struct StratonovichDecomposition {
    double time_term = 0.0;
    double midpoint_term = 0.0;

    double total() const { return time_term + midpoint_term; }
};

StratonovichDecomposition discrete_stratonovich_decompose(const GridFunction& f,
                                                          const DiscretePath& path);

// Forward stochastic sum along a scaled walk:
//   sum_{r=1..floor(t 4^m)} f(t_{r-1}, B(t_{r-1})) * 2^-m * xi_r.
// Throws RangeError if t runs past the walk's recorded steps.
double stochastic_sum(const GridFunction& f, const WalkLevel& walk, double t);

}  // namespace sdewalk
