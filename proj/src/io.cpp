#include "sdewalk/io.hpp"

#include <charconv>
#include <ostream>

#include "sdewalk/errors.hpp"

namespace sdewalk {

std::string format_sig17(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void write_path_csv(std::ostream& os, const QPathSample& path) {
    os << "r,t_r,b_m,x_m,w_m,psi_m,q_plus,log_lambda\n";
    const std::int64_t n = path.b.size() - 1;
    for (std::int64_t r = 0; r <= n; ++r) {
        os << r << ',' << format_sig17(path.time_at(r)) << ',' << format_sig17(path.b[r])
           << ',' << format_sig17(path.x[r]) << ',' << format_sig17(path.w[r]) << ',';
        if (r < path.n_steps())
            os << format_sig17(path.psi[r]) << ',' << format_sig17(path.q_plus[r]);
        else
            os << ',';
        os << ',' << format_sig17(path.log_lambda[r]) << '\n';
    }
}

void write_walks_csv(std::ostream& os, const std::vector<WalkLevel>& walks,
                     std::int64_t max_steps) {
    os << "level,r,t_r,value\n";
    for (const WalkLevel& w : walks) {
        const std::int64_t n =
            max_steps < 0 ? static_cast<std::int64_t>(w.n_steps())
                          : std::min<std::int64_t>(max_steps,
                                                   static_cast<std::int64_t>(w.n_steps()));
        const double mesh = w.mesh();
        const double h2 = w.time_mesh();
        std::int64_t acc = 0;
        for (std::int64_t r = 0; r <= n; ++r) {
            if (r > 0) acc += w.increments[static_cast<std::size_t>(r - 1)];
            os << w.level << ',' << r << ',' << format_sig17(r * h2) << ','
               << format_sig17(static_cast<double>(acc) * mesh) << '\n';
        }
    }
}

void write_convergence_csv(std::ostream& os, const ConvergenceReport& report) {
    os << "m,seed,e_m\n";
    for (int i = 0; i < report.errors.rows(); ++i)
        for (std::size_t j = 0; j < report.levels.size(); ++j)
            os << report.levels[j] << ',' << report.seeds[static_cast<std::size_t>(i)]
               << ',' << format_sig17(report.errors(i, static_cast<int>(j))) << '\n';
}

void write_paired_csv(std::ostream& os, const Eigen::ArrayXd& times,
                      const Eigen::ArrayXd& method, const Eigen::ArrayXd& strong) {
    if (times.size() != method.size() || times.size() != strong.size())
        throw ConfigError("paired series must have equal lengths");
    os << "t,x_method,x_strong\n";
    for (Eigen::Index i = 0; i < times.size(); ++i)
        os << format_sig17(times[i]) << ',' << format_sig17(method[i]) << ','
           << format_sig17(strong[i]) << '\n';
}

}  // namespace sdewalk
