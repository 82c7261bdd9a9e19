#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sdewalk/girsanov.hpp"
#include "sdewalk/verify.hpp"
#include "sdewalk/walker.hpp"

namespace sdewalk {

// Shortest exact decimal with up to 17 significant digits, locale-independent.
// CSV outputs round-trip to the same double bit pattern.
std::string format_sig17(double v);

// Columns: r,t_r,b_m,x_m,w_m,psi_m,q_plus,log_lambda.  One row per recorded
// step count; psi_m and q_plus describe the step that starts at the row's
// time and stay empty on the final row.
void write_path_csv(std::ostream& os, const QPathSample& path);

// Columns: level,r,t_r,value.  Each walk contributes its values up to
// max_steps (or its full length when max_steps is negative).
void write_walks_csv(std::ostream& os, const std::vector<WalkLevel>& walks,
                     std::int64_t max_steps = -1);

// Columns: m,seed,e_m (one row per seed/level pair).
void write_convergence_csv(std::ostream& os, const ConvergenceReport& report);

// Columns: t,x_method,x_strong (paired trajectories on a common clock).
void write_paired_csv(std::ostream& os, const Eigen::ArrayXd& times,
                      const Eigen::ArrayXd& method, const Eigen::ArrayXd& strong);

}  // namespace sdewalk
