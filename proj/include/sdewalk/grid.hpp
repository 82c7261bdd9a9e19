#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

#include "sdewalk/errors.hpp"

namespace sdewalk {

// Spatial lattice {origin + k*mesh : k integer}. Time steps on the matching
// clock are mesh^2, so one space step per time step is diffusive scaling.
struct DyadicGrid {
    double origin = 0.0;
    double mesh = 1.0;

    static DyadicGrid dyadic(int m, double origin = 0.0) {
        return DyadicGrid{origin, std::ldexp(1.0, -m)};
    }

    double point(std::int64_t k) const { return origin + static_cast<double>(k) * mesh; }
    double time_mesh() const { return mesh * mesh; }

    // Map a real coordinate back to its lattice index; the coordinate must
    // actually lie on the lattice (everything this library produces does).
    std::int64_t index_of(double x) const {
        const double raw = (x - origin) / mesh;
        const double rounded = std::nearbyint(raw);
        if (std::abs(raw - rounded) > 1e-9)
            throw RangeError("coordinate is not a lattice node");
        return static_cast<std::int64_t>(rounded);
    }
};

enum class Smoothness {
    continuous,  // f continuous in (t, x)
    c12,         // f has continuous d/dt and d2/dx2 (needed for the Ito form)
};

// A scalar field f(t, x) together with the smoothness the caller vouches for.
struct GridFunction {
    std::function<double(double, double)> f;
    Smoothness smoothness = Smoothness::c12;

    double operator()(double t, double x) const { return f(t, x); }
};

// Nearest-neighbour path on a grid: start index plus a string of +-1 moves.
// Step r happens at time t_r = r * mesh^2.
struct DiscretePath {
    DyadicGrid grid;
    std::int64_t start = 0;
    std::vector<std::int8_t> increments;

    std::size_t n_steps() const { return increments.size(); }

    std::int64_t index_at(std::size_t r) const {
        return start + std::accumulate(increments.begin(), increments.begin() + r,
                                       std::int64_t{0});
    }

    double value_at(std::size_t r) const { return grid.point(index_at(r)); }
    double time_at(std::size_t r) const { return static_cast<double>(r) * grid.time_mesh(); }
};

}  // namespace sdewalk
