#pragma once

#include <ostream>
#include <string>

#include "oscctl/sim.hpp"

namespace oscctl {

/// Header `t,x1,y1,...,xN,yN,u,stage,rho,Tfrak`; Tfrak is empty outside stage 3.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, std::size_t n);
/// Header `t,kind,detail`.
void write_events_csv(std::ostream& out, const Trajectory& trajectory);

void write_trajectory_csv(const std::string& path, const Trajectory& trajectory, std::size_t n);
void write_events_csv(const std::string& path, const Trajectory& trajectory);

/// 17 significant digits, the round-trip precision of a double.
std::string format_double(double v);

}  // namespace oscctl
