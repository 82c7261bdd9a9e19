#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "sdewalk/errors.hpp"
#include "sdewalk/rng.hpp"

namespace sdewalk {

// Integer-scale twisted simple random walk S~_m.  Increments are +-1; the
// twist rearranges bridge signs so that consecutive levels refine each other:
// the walk's value at its k-th completed bridge equals twice the value of the
// coarser walk at step k.  Level 0 carries the raw (untwisted) base walk.
struct TwistedWalk {
    int level = 0;
    std::vector<std::int8_t> increments;
    std::int64_t complete_bridges = 0;  // bridges closed before the base ran out

    std::size_t n_steps() const { return increments.size(); }
};

// Family of twisted walks for levels 0..max_level, all driven by substreams
// of one seed.  Level m's raw stream depends only on (seed, m) and per-level
// budgets do not depend on max_level, so rebuilding with the same arguments
// is bit-identical and a taller build normally reproduces the shared levels
// exactly.  When budgets differ (longer horizon, or a rare retry) the shared
// levels still agree over their completed bridges; only the unflipped tail
// fragment past the last completed bridge may differ.
struct WalkHierarchy {
    std::uint64_t seed = 0;
    double horizon = 1.0;
    std::vector<TwistedWalk> levels;  // levels[m] has level == m
};

// Scaled walk B_m: value 2^-m * S(r) at time t_r = r * 4^-m.  May be native
// (its own increments) or embedded into a finer reference walk, in which case
// embed_indices[k] is the reference step index where the k-th value was hit.
struct WalkLevel {
    int level = 0;
    std::vector<std::int8_t> increments;
    std::vector<std::int64_t> embed_indices;  // empty for native walks; else size n_steps()+1
    int ref_level = 0;                        // level the embed indices refer to (== level if native)

    std::size_t n_steps() const { return increments.size(); }
    double mesh() const { return std::ldexp(1.0, -level); }
    double time_mesh() const { return std::ldexp(1.0, -2 * level); }

    // Number of steps needed to cover [0, t].
    std::int64_t steps_for(double t) const;
};

// Build levels 0..max_level over [0, horizon].  Each level generates four
// times the increments the horizon needs, which in practice always leaves the
// twisted prefix long enough; if a level still falls short the whole build is
// retried with doubled budgets (identical stream prefixes, so the result is
// still a pure function of seed/max_level/horizon).  Budget exhaustion after
// all retries raises ResourceError.
WalkHierarchy build_twisted_hierarchy(std::uint64_t seed, int max_level, double horizon);

// Diffusive rescaling of a twisted walk: keep the +-1 increments, read value
// k-th step as 2^-m S(k) at time k 4^-m, truncated to the horizon prefix.
WalkLevel shrink(const TwistedWalk& walk, double horizon);

// Same rescaling keeping every generated increment (useful when the extra
// tail is wanted as margin, e.g. before embedding coarser levels).
WalkLevel shrink(const TwistedWalk& walk);

// First-passage (Skorohod) embedding of a coarser walk into `reference`:
// record reference's values each time it first moves 2^-m away from the last
// recorded value.  Requires m <= reference.level.  When `reference` is itself
// embedded, the recorded stopping indices are composed so they always point
// into the original native walk.
WalkLevel skorohod_embed(const WalkLevel& reference, int m);

// Independent scaled simple walk (no twisting), used where i.i.d. fine paths
// are wanted without the cost of a hierarchy.  Stream is (seed, index, tag).
WalkLevel make_simple_walk(std::uint64_t seed, std::uint64_t index, std::uint64_t tag,
                           int level, std::int64_t n_steps);

// First n+1 values of the scaled walk as a dense array (B(0)=0 included).
Eigen::ArrayXd walk_values(const WalkLevel& walk, std::int64_t n_steps);

// Values at steps 0, stride, 2*stride, ..., count*stride (count+1 entries).
Eigen::ArrayXd subsampled_values(const WalkLevel& walk, std::int64_t stride,
                                 std::int64_t count);

}  // namespace sdewalk
