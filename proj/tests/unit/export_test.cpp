#include "oscctl/export.hpp"

#include <algorithm>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

namespace oscctl {
namespace {

TEST(Export, TrajectoryCsvShape) {
  PhaseState x0(2);
  x0 << 10.0, 0.0;
  Scenario sc(toy_design(), x0);
  sc.sample_stride = 500;
  const Trajectory tr = simulate(sc);
  std::ostringstream out;
  write_trajectory_csv(out, tr, 1);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,x1,y1,u,stage,rho,Tfrak");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 6) << line;
  }
  EXPECT_EQ(rows, tr.samples.size());
}

TEST(Export, EventsCsv) {
  Trajectory tr;
  tr.events.push_back({1.5, EventKind::StageSwitch, "high->middle"});
  std::ostringstream out;
  write_events_csv(out, tr);
  EXPECT_EQ(out.str(), "t,kind,detail\n1.5,stage-switch,high->middle\n");
}

TEST(Export, RoundTripPrecision) {
  for (double v : {0.1, 1.0 / 3.0, 2.718281828459045, -1e-300, 6.02214076e23}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

}  // namespace
}  // namespace oscctl
