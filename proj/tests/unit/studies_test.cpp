#include "oscctl/studies.hpp"

#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "oscctl/errors.hpp"
#include "oscctl/momentum.hpp"

namespace oscctl {
namespace {

TEST(ParallelMap, OrderedAndEqualToSerial) {
  auto f = [](std::size_t i) { return static_cast<double>(i * i); };
  const auto serial = parallel_map(50, 1, f);
  const auto parallel = parallel_map(50, 4, f);
  EXPECT_EQ(serial, parallel);
  for (std::size_t i = 0; i < serial.size(); ++i) EXPECT_EQ(serial[i], double(i * i));
  EXPECT_TRUE(parallel_map(0, 3, f).empty());
}

TEST(ParallelMap, RethrowsLowestFailure) {
  auto f = [](std::size_t i) -> int {
    if (i == 7) throw std::runtime_error("seven");
    if (i == 3) throw std::runtime_error("three");
    return 0;
  };
  try {
    parallel_map(10, 3, f);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "three");
  }
}

TEST(LevelSet, SamplesLieOnLevel) {
  const OscillatorSystem sys({1.0, std::sqrt(2.0)});
  const auto xs = sample_level_set(sys, 7.5, 10, 3);
  ASSERT_EQ(xs.size(), 10u);
  for (const auto& x : xs) EXPECT_NEAR(rho_norm(sys, x), 7.5, 1e-9);
  EXPECT_EQ(sample_level_set(sys, 7.5, 10, 3)[4], xs[4]);
}

TEST(Ratio, SingleOscillatorApproachesOptimal) {
  RatioStudyOptions opt;
  opt.levels = {0.0, 30.0, 120.0};
  opt.samples_per_level = 3;
  const auto rows = ratio_study(toy_design(), opt);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].samples, 0u);
  EXPECT_FALSE(rows[0].note.empty());
  ASSERT_TRUE(rows[1].T_over_tau && rows[2].T_over_tau);
  EXPECT_GE(rows[1].T_over_tau->min, 1.0 - 1e-6);
  EXPECT_GE(rows[2].T_over_tau->min, 1.0 - 1e-6);
  EXPECT_LT(rows[2].T_over_tau->mean, rows[1].T_over_tau->mean);
  EXPECT_GT(rows[2].rho_over_T.mean, rows[1].rho_over_T.mean);
}

TEST(Ratio, ParallelMatchesSerial) {
  RatioStudyOptions opt;
  opt.levels = {20.0};
  opt.samples_per_level = 4;
  opt.numerics.threads = 1;
  const auto a = ratio_study(toy_design(), opt);
  opt.numerics.threads = 4;
  const auto b = ratio_study(toy_design(), opt);
  EXPECT_EQ(a[0].rho_over_T.mean, b[0].rho_over_T.mean);
  EXPECT_EQ(a[0].T_over_tau->max, b[0].T_over_tau->max);
}

TEST(Decay, NonResonantPairNearUnitRate) {
  DecayOptions opt;
  opt.starts = 3;
  const DecayReport r = decay_study(OscillatorSystem({1.0, std::sqrt(2.0)}), opt);
  ASSERT_EQ(r.runs.size(), 3u);
  for (const auto& run : r.runs) {
    EXPECT_EQ(run.outcome, Outcome::Stopped);
    EXPECT_NEAR(run.rho_end, 50.0, 1e-6);
  }
  EXPECT_EQ(r.fraction_within(0.9, 1.1), 1.0);
  DecayOptions bad;
  bad.rho_stop = 600.0;
  EXPECT_THROW(decay_study(OscillatorSystem({1.0}), bad), ValidationError);
}

TEST(SingularMagnitude, RestPointOfUnitOscillator) {
  const OscillatorSystem sys({1.0});
  for (double a : {0.2, 0.5, -0.8}) {
    PhaseState x(2);
    x << a, 0.0;
    EXPECT_NEAR(singular_control_magnitude(sys, x), a, 1e-6);
  }
  EXPECT_THROW(singular_control_magnitude(sys, PhaseState::Zero(2)), ZeroState);
}

TEST(Attractor, SingleOscillatorStallsOnStandstillSegment) {
  AttractorScanOptions opt;
  opt.rho_level = 3.0;
  opt.n_inits = 4;
  const AttractorReport r = attractor_scan(OscillatorSystem({1.0}), opt);
  EXPECT_EQ(r.runs, 4u);
  ASSERT_FALSE(r.stalled.empty());
  for (const auto& arc : r.stalled) {
    EXPECT_LE(std::abs(arc.x_end(0)), 1.0);
    EXPECT_LE(std::abs(arc.x_end(1)), 0.05);
    EXPECT_LE(arc.f_max, 1.0 + 1e-6);
  }
  ASSERT_TRUE(r.radius.has_value());
  EXPECT_GE(*r.radius, 1.0);
}

TEST(Attractor, EmptyAndFarLevels) {
  AttractorScanOptions opt;
  opt.horizon = 0.0;
  const AttractorReport empty = attractor_scan(OscillatorSystem({1.0}), opt);
  EXPECT_EQ(empty.runs, 0u);
  EXPECT_TRUE(empty.stalled.empty());

  AttractorScanOptions far;
  far.rho_level = 200.0;
  far.n_inits = 2;
  far.horizon = 60.0;
  const AttractorReport r = attractor_scan(OscillatorSystem({1.0, std::sqrt(2.0)}), far);
  EXPECT_TRUE(r.stalled.empty());
}

TEST(Cauchy, Rule) {
  EXPECT_TRUE(is_cauchy({1.0, 0.5, 0.2}, 1e-6));
  EXPECT_FALSE(is_cauchy({1.0, 0.6}, 1e-6));
  EXPECT_TRUE(is_cauchy({1e-7, 1e-7}, 1e-6));
  EXPECT_TRUE(is_cauchy({}, 1e-6));
}

TEST(Convergence, ToyRefinementIsCauchy) {
  PhaseState x0(2);
  x0 << 10.0, 0.0;
  const ConvergenceReport r = convergence_study(Scenario(toy_design(), x0), {});
  ASSERT_EQ(r.cells.size(), 9u);
  EXPECT_TRUE(r.passed);
  // (1e-3, 1e-4) against (5e-4, 5e-5).
  EXPECT_LE(std::abs(r.cells[4].total_time - r.cells[8].total_time), 1e-4);
}

}  // namespace
}  // namespace oscctl
