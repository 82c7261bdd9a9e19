#pragma once

#include <stdexcept>
#include <string>

namespace sdewalk {

// Error taxonomy. Each class maps to one process exit code in the CLI:
//   ConfigError     -> 2  (bad config file, unknown keys, invalid parameters)
//   RuntimeAbort    -> 3  (aborted mid-run: sigma lost positivity, range exceeded)
//   ResourceError   -> 4  (a resource budget was exhausted, e.g. walk increments)

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct RuntimeAbort : std::runtime_error {
    explicit RuntimeAbort(const std::string& msg) : std::runtime_error(msg) {}
};

// sigma(t, x) <= 0 was encountered at a point the evaluation actually needed.
struct PositivityError : RuntimeAbort {
    PositivityError(double t_, double x_, const std::string& what_arg)
        : RuntimeAbort(what_arg), t(t_), x(x_) {}
    double t;
    double x;
};

// A lookup left the solved/valid range (time horizon, walk length, grid node).
struct RangeError : RuntimeAbort {
    explicit RangeError(const std::string& msg) : RuntimeAbort(msg) {}
};

// A pre-allocated budget ran out even after the configured retries.
struct ResourceError : std::runtime_error {
    ResourceError(int level_, long long shortfall_, const std::string& msg)
        : std::runtime_error(msg), level(level_), shortfall(shortfall_) {}
    int level;
    long long shortfall;
};

}  // namespace sdewalk
