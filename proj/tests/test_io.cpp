#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "sdewalk/io.hpp"
#include "sdewalk/rng.hpp"
#include "sdewalk/simulate.hpp"

using namespace sdewalk;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("number formatting: exact round trip over random doubles") {
    Rng rng(1001);
    for (int i = 0; i < 2000; ++i) {
        // Spread mantissas over a wide exponent range, both signs.
        const double mag = std::ldexp(rng.uniform01() + 0.5,
                                      static_cast<int>(rng.uniform01() * 600.0) - 300);
        const double v = rng.uniform01() < 0.5 ? mag : -mag;
        const std::string s = format_sig17(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    CHECK(format_sig17(0.0) == "0");
    CHECK(format_sig17(1.0) == "1");
    CHECK(format_sig17(0.5) == "0.5");
    CHECK(std::strtod(format_sig17(1.0 / 3.0).c_str(), nullptr) == 1.0 / 3.0);
}

TEST_CASE("path csv: header, row count, empty trailing law columns") {
    ModelConfig cfg;
    cfg.preset = "gbm";
    cfg.level = 2;
    cfg.seed = 5;
    const SimContext ctx = make_context(cfg);
    const QPathSample path = simulate_qm_path(ctx, 0);
    REQUIRE_FALSE(path.abort.has_value());

    std::ostringstream os;
    write_path_csv(os, path);
    const auto lines = lines_of(os.str());
    REQUIRE(lines.size() == 18);  // header + 16 steps + terminal row
    CHECK(lines[0] == "r,t_r,b_m,x_m,w_m,psi_m,q_plus,log_lambda");
    CHECK(lines[1].substr(0, 4) == "0,0,");
    // Terminal row has empty psi_m and q_plus fields.
    CHECK(lines[17].find(",,,") != std::string::npos);
    // Every row has exactly 7 commas.
    for (std::size_t i = 1; i < lines.size(); ++i)
        CHECK(std::count(lines[i].begin(), lines[i].end(), ',') == 7);
}

TEST_CASE("walks csv: per-level sections with scaled values") {
    WalkLevel w;
    w.level = 1;
    w.ref_level = 1;
    w.increments = {1, -1, 1};
    std::ostringstream os;
    write_walks_csv(os, {w}, -1);
    const auto lines = lines_of(os.str());
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == "level,r,t_r,value");
    CHECK(lines[1] == "1,0,0,0");
    CHECK(lines[2] == "1,1,0.25,0.5");
    CHECK(lines[3] == "1,2,0.5,0");
    CHECK(lines[4] == "1,3,0.75,0.5");

    std::ostringstream capped;
    write_walks_csv(capped, {w}, 1);
    CHECK(lines_of(capped.str()).size() == 3);  // header + rows 0..1
}

TEST_CASE("paired csv: alignment enforced") {
    Eigen::ArrayXd t(2), a(2), b(3);
    t << 0, 1;
    a << 1, 2;
    b << 1, 2, 3;
    std::ostringstream os;
    CHECK_THROWS_AS(write_paired_csv(os, t, a, b), ConfigError);

    Eigen::ArrayXd b2(2);
    b2 << 3, 4;
    write_paired_csv(os, t, a, b2);
    const auto lines = lines_of(os.str());
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "t,x_method,x_strong");
    CHECK(lines[1] == "0,1,3");
    CHECK(lines[2] == "1,2,4");
}

TEST_CASE("convergence csv: one row per seed/level pair") {
    ConvergenceReport rep;
    rep.levels = {3, 4};
    rep.seeds = {10, 20};
    rep.errors.resize(2, 2);
    rep.errors << 0.5, 0.25, 0.75, 0.5;
    std::ostringstream os;
    write_convergence_csv(os, rep);
    const auto lines = lines_of(os.str());
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == "m,seed,e_m");
    CHECK(lines[1] == "3,10,0.5");
    CHECK(lines[2] == "4,10,0.25");
    CHECK(lines[3] == "3,20,0.75");
    CHECK(lines[4] == "4,20,0.5");
}
