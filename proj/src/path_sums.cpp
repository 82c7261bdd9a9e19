#include "sdewalk/path_sums.hpp"

#include <cmath>

namespace sdewalk {

double trapezoidal_sum(const GridFunction& f, double t, const DyadicGrid& grid,
                       std::int64_t from, std::int64_t to) {
    if (from == to) return 0.0;
    const std::int64_t dir = to > from ? 1 : -1;
    double acc = 0.5 * (f(t, grid.point(from)) + f(t, grid.point(to)));
    for (std::int64_t k = from + dir; k != to; k += dir) acc += f(t, grid.point(k));
    return acc * grid.mesh * static_cast<double>(dir);
}

double trapezoidal_sum_edges(const GridFunction& f, double t, const DiscretePath& path) {
    const double h = path.grid.mesh;
    double acc = 0.0;
    std::int64_t k = path.start;
    for (std::int8_t mu : path.increments) {
        const double x = path.grid.point(k);
        acc += static_cast<double>(mu) * (f(t, x) + f(t, x + mu * h));
        k += mu;
    }
    return 0.5 * h * acc;
}

ItoDecomposition discrete_ito_decompose(const GridFunction& f, const DiscretePath& path) {
    const double h = path.grid.mesh;
    const double h2 = path.grid.time_mesh();
    ItoDecomposition out;

    std::int64_t k = path.start;
    for (std::size_t r = 1; r <= path.n_steps(); ++r) {
        const double t_prev = static_cast<double>(r - 1) * h2;
        const double t_cur = static_cast<double>(r) * h2;
        const double x_prev = path.grid.point(k);
        const std::int8_t xi = path.increments[r - 1];
        const std::int64_t k_cur = k + xi;
        const double x_cur = path.grid.point(k_cur);

        // Trapezoid sum of the divided time difference from the start to the
        // current node, advanced by one time step.
        const GridFunction dtf{
            [&](double, double x) { return (f(t_cur, x) - f(t_prev, x)) / h2; },
            f.smoothness};
        out.time_term += trapezoidal_sum(dtf, 0.0, path.grid, path.start, k_cur) * h2;

        out.stochastic_term += f(t_prev, x_prev) * h * static_cast<double>(xi);
        out.quadratic_term +=
            0.5 * ((f(t_prev, x_cur) - f(t_prev, x_prev)) / (h * xi)) * h2;

        k = k_cur;
    }
    return out;
}

StratonovichDecomposition discrete_stratonovich_decompose(const GridFunction& f,
                                                          const DiscretePath& path) {
    const double h = path.grid.mesh;
    const double h2 = path.grid.time_mesh();
    StratonovichDecomposition out;

    std::int64_t k = path.start;
    for (std::size_t r = 1; r <= path.n_steps(); ++r) {
        const double t_prev = static_cast<double>(r - 1) * h2;
        const double t_cur = static_cast<double>(r) * h2;
        const double x_prev = path.grid.point(k);
        const std::int8_t xi = path.increments[r - 1];
        const std::int64_t k_cur = k + xi;
        const double x_cur = path.grid.point(k_cur);

        const GridFunction dtf{
            [&](double, double x) { return (f(t_cur, x) - f(t_prev, x)) / h2; },
            f.smoothness};
        out.time_term += trapezoidal_sum(dtf, 0.0, path.grid, path.start, k_cur) * h2;

        out.midpoint_term +=
            0.5 * (f(t_prev, x_prev) + f(t_prev, x_cur)) * h * static_cast<double>(xi);

        k = k_cur;
    }
    return out;
}

double stochastic_sum(const GridFunction& f, const WalkLevel& walk, double t) {
    if (!(t >= 0.0)) throw RangeError("stochastic_sum: time must be non-negative");
    const std::int64_t n = static_cast<std::int64_t>(std::floor(std::ldexp(t, 2 * walk.level)));
    if (n > static_cast<std::int64_t>(walk.n_steps()))
        throw RangeError("stochastic_sum: time runs past the walk horizon");

    const double h = walk.mesh();
    const double h2 = walk.time_mesh();
    double acc = 0.0;
    std::int64_t s = 0;
    for (std::int64_t r = 1; r <= n; ++r) {
        const double b_prev = static_cast<double>(s) * h;
        const double t_prev = static_cast<double>(r - 1) * h2;
        const std::int8_t xi = walk.increments[static_cast<std::size_t>(r - 1)];
        acc += f(t_prev, b_prev) * h * static_cast<double>(xi);
        s += xi;
    }
    return acc;
}

}  // namespace sdewalk
