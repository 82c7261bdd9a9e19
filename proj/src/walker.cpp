#include "sdewalk/walker.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace sdewalk {

namespace {

constexpr int kMaxLevel = 14;     // 4^14 steps/unit time is already ~270M
constexpr int kMaxAttempts = 6;   // each retry doubles every level's budget

std::int64_t steps_for_horizon(int level, double horizon) {
    return static_cast<std::int64_t>(std::ceil(std::ldexp(horizon, 2 * level)));
}

// Raw base walk for one level: `budget` fair-coin increments.
TwistedWalk generate_base(std::uint64_t seed, int level, std::int64_t budget) {
    Rng rng(seed, static_cast<std::uint64_t>(level), 0);
    TwistedWalk out;
    out.level = level;
    out.increments.resize(static_cast<std::size_t>(budget));
    for (auto& inc : out.increments) inc = static_cast<std::int8_t>(rng.coin());
    out.complete_bridges = budget;  // meaningless for the base level, kept full
    return out;
}

// Twist one level against the previous twisted level.  Base increments are
// drawn on the fly; each bridge (first passage of the base walk to +-2 from
// its bridge start) is sign-flipped so its displacement equals twice the
// previous level's k-th increment.  The output stops when either the previous
// level's increments are used up (no more targets) or the base budget ends
// mid-bridge, in which case the unfinished bridge is appended as generated.
TwistedWalk twist_level(std::uint64_t seed, int level, std::int64_t budget,
                        const std::vector<std::int8_t>& prev) {
    Rng rng(seed, static_cast<std::uint64_t>(level), 0);
    TwistedWalk out;
    out.level = level;
    out.increments.reserve(static_cast<std::size_t>(budget));

    std::vector<std::int8_t> bridge;
    bridge.reserve(64);
    int disp = 0;
    std::size_t k = 0;  // index of the bridge being built

    for (std::int64_t j = 0; j < budget; ++j) {
        if (k >= prev.size()) break;  // no target left for the next bridge
        const int xi = rng.coin();
        bridge.push_back(static_cast<std::int8_t>(xi));
        disp += xi;
        if (disp == 2 || disp == -2) {
            const int sign = (disp / 2) * prev[k];
            for (std::int8_t b : bridge)
                out.increments.push_back(static_cast<std::int8_t>(sign * b));
            ++out.complete_bridges;
            ++k;
            bridge.clear();
            disp = 0;
        }
    }
    // Budget ended inside a bridge: keep the fragment unflipped.
    out.increments.insert(out.increments.end(), bridge.begin(), bridge.end());
    return out;
}

}  // namespace

std::int64_t WalkLevel::steps_for(double t) const {
    return static_cast<std::int64_t>(std::ceil(std::ldexp(t, 2 * level)));
}

WalkHierarchy build_twisted_hierarchy(std::uint64_t seed, int max_level, double horizon) {
    if (max_level < 0 || max_level > kMaxLevel)
        throw ConfigError("max_level must be in [0, " + std::to_string(kMaxLevel) + "]");
    if (!(horizon > 0.0))
        throw ConfigError("horizon must be positive");

    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        WalkHierarchy h;
        h.seed = seed;
        h.horizon = horizon;
        h.levels.reserve(static_cast<std::size_t>(max_level) + 1);

        int short_level = -1;
        std::int64_t shortfall = 0;
        for (int m = 0; m <= max_level; ++m) {
            const std::int64_t need = steps_for_horizon(m, horizon);
            const std::int64_t budget = 4 * need << attempt;
            TwistedWalk walk = (m == 0)
                                   ? generate_base(seed, m, budget)
                                   : twist_level(seed, m, budget, h.levels.back().increments);
            if (static_cast<std::int64_t>(walk.n_steps()) < need) {
                short_level = m;
                shortfall = need - static_cast<std::int64_t>(walk.n_steps());
                break;
            }
            h.levels.push_back(std::move(walk));
        }
        if (short_level < 0) return h;
        if (attempt == kMaxAttempts - 1)
            throw ResourceError(short_level, shortfall,
                                "walk increments exhausted at level " +
                                    std::to_string(short_level) + " (short by " +
                                    std::to_string(shortfall) + " steps after " +
                                    std::to_string(kMaxAttempts) + " attempts)");
    }
    return {};  // unreachable
}

WalkLevel shrink(const TwistedWalk& walk, double horizon) {
    const std::int64_t need = steps_for_horizon(walk.level, horizon);
    if (static_cast<std::int64_t>(walk.n_steps()) < need)
        throw RangeError("twisted walk shorter than requested horizon");
    WalkLevel out;
    out.level = walk.level;
    out.ref_level = walk.level;
    out.increments.assign(walk.increments.begin(), walk.increments.begin() + need);
    return out;
}

WalkLevel shrink(const TwistedWalk& walk) {
    WalkLevel out;
    out.level = walk.level;
    out.ref_level = walk.level;
    out.increments = walk.increments;
    return out;
}

WalkLevel skorohod_embed(const WalkLevel& reference, int m) {
    if (m > reference.level)
        throw ConfigError("cannot embed level " + std::to_string(m) +
                          " into coarser reference level " + std::to_string(reference.level));
    const std::int64_t threshold = std::int64_t{1} << (reference.level - m);
    const bool composed = !reference.embed_indices.empty();

    WalkLevel out;
    out.level = m;
    out.ref_level = reference.ref_level;
    out.embed_indices.push_back(0);

    std::int64_t acc = 0;
    std::int64_t anchor = 0;
    const std::int64_t n = static_cast<std::int64_t>(reference.increments.size());
    for (std::int64_t j = 0; j < n; ++j) {
        acc += reference.increments[static_cast<std::size_t>(j)];
        if (acc - anchor == threshold || anchor - acc == threshold) {
            out.increments.push_back(static_cast<std::int8_t>(acc > anchor ? 1 : -1));
            out.embed_indices.push_back(
                composed ? reference.embed_indices[static_cast<std::size_t>(j + 1)] : j + 1);
            anchor = acc;
        }
    }
    return out;
}

WalkLevel make_simple_walk(std::uint64_t seed, std::uint64_t index, std::uint64_t tag,
                           int level, std::int64_t n_steps) {
    if (level < 0 || level > kMaxLevel) throw ConfigError("walk level out of range");
    Rng rng(seed, index, tag);
    WalkLevel out;
    out.level = level;
    out.ref_level = level;
    out.increments.resize(static_cast<std::size_t>(n_steps));
    for (auto& inc : out.increments) inc = static_cast<std::int8_t>(rng.coin());
    return out;
}

Eigen::ArrayXd walk_values(const WalkLevel& walk, std::int64_t n_steps) {
    if (n_steps < 0 || n_steps > static_cast<std::int64_t>(walk.n_steps()))
        throw RangeError("walk_values: step count exceeds walk length");
    Eigen::ArrayXd vals(n_steps + 1);
    const double mesh = walk.mesh();
    std::int64_t acc = 0;
    vals[0] = 0.0;
    for (std::int64_t r = 0; r < n_steps; ++r) {
        acc += walk.increments[static_cast<std::size_t>(r)];
        vals[r + 1] = static_cast<double>(acc) * mesh;
    }
    return vals;
}

Eigen::ArrayXd subsampled_values(const WalkLevel& walk, std::int64_t stride,
                                 std::int64_t count) {
    if (stride <= 0) throw ConfigError("subsampled_values: stride must be positive");
    if (count < 0 || count * stride > static_cast<std::int64_t>(walk.n_steps()))
        throw RangeError("subsampled_values: range exceeds walk length");
    Eigen::ArrayXd vals(count + 1);
    const double mesh = walk.mesh();
    std::int64_t acc = 0;
    vals[0] = 0.0;
    for (std::int64_t q = 1; q <= count; ++q) {
        const std::int64_t hi = q * stride;
        for (std::int64_t j = (q - 1) * stride; j < hi; ++j)
            acc += walk.increments[static_cast<std::size_t>(j)];
        vals[q] = static_cast<double>(acc) * mesh;
    }
    return vals;
}

}  // namespace sdewalk
