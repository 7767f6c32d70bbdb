#include "oscctl/export.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "oscctl/errors.hpp"

namespace oscctl {

std::string format_double(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

namespace {

std::string quoted(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open " + path + " for writing");
  return f;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, std::size_t n) {
  out << "t";
  for (std::size_t i = 1; i <= n; ++i) out << ",x" << i << ",y" << i;
  out << ",u,stage,rho,Tfrak\n";
  for (const auto& s : trajectory.samples) {
    out << format_double(s.t);
    for (Eigen::Index i = 0; i < s.x.size(); ++i) out << ',' << format_double(s.x(i));
    out << ',' << format_double(s.u) << ',' << to_string(s.stage) << ',' << format_double(s.rho)
        << ',';
    if (s.T_frak) out << format_double(*s.T_frak);
    out << '\n';
  }
}

void write_events_csv(std::ostream& out, const Trajectory& trajectory) {
  out << "t,kind,detail\n";
  for (const auto& e : trajectory.events)
    out << format_double(e.t) << ',' << to_string(e.kind) << ',' << quoted(e.detail) << '\n';
}

void write_trajectory_csv(const std::string& path, const Trajectory& trajectory, std::size_t n) {
  auto f = open_for_write(path);
  write_trajectory_csv(f, trajectory, n);
}

void write_events_csv(const std::string& path, const Trajectory& trajectory) {
  auto f = open_for_write(path);
  write_events_csv(f, trajectory);
}

}  // namespace oscctl
