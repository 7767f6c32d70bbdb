#include "oscctl/canonical.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "oracles.hpp"
#include "oscctl/errors.hpp"
#include "oscctl/terminal.hpp"

namespace oscctl {
namespace {

using testing::Gen;

Eigen::MatrixXd closed_loop(const std::vector<double>& omega) {
  const OscillatorSystem sys(omega);
  return sys.A() + sys.B() * feedback_row(omega);
}

TEST(Feedback, Examples) {
  const Eigen::RowVectorXd c1 = feedback_row({1.0});
  EXPECT_EQ(c1(0), 1.0);
  EXPECT_EQ(c1(1), 0.0);
  const Eigen::RowVectorXd c2 = feedback_row({1.0, 2.0});
  EXPECT_NEAR(c2(0), -1.0 / 3.0, 1e-15);
  EXPECT_EQ(c2(1), 0.0);
  EXPECT_NEAR(c2(2), 16.0 / 3.0, 1e-14);
  EXPECT_EQ(c2(3), 0.0);
}

TEST(Feedback, ExactAgainstOracle) {
  Gen g(41);
  for (int k = 0; k < 10; ++k) {
    const std::size_t n = static_cast<std::size_t>(g.integer(1, 5));
    std::vector<Rational> w2;
    while (w2.size() < n) {
      const Rational r(g.integer(1, 40), g.integer(1, 7));
      if (std::find(w2.begin(), w2.end(), r) == w2.end()) w2.push_back(r);
    }
    const DenseMatrix<Rational> row = feedback_row_exact(w2);
    const std::vector<Rational> want = testing::feedback_oracle(w2);
    Rational sum_c(0), sum_w(0);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_EQ(row(0, 2 * i), want[i]);
      EXPECT_EQ(row(0, 2 * i + 1), Rational(0));
      sum_c += want[i];
      sum_w += w2[i];
    }
    EXPECT_EQ(sum_c, sum_w);
  }
}

TEST(FeedbackProperty, SumEqualsSumOfSquares) {
  Gen g(42);
  for (int k = 0; k < 30; ++k) {
    const auto omega = g.distinct_omega(static_cast<std::size_t>(g.integer(1, 5)), 0.5, 3.0, 0.1);
    double sw = 0.0;
    for (double w : omega) sw += w * w;
    EXPECT_NEAR(feedback_row(omega).sum(), sw, 1e-10 * sw);
  }
}

TEST(Feedback, Validation) {
  EXPECT_THROW(feedback_row({1.0, 1.0}), DuplicateFrequency);
  EXPECT_THROW(feedback_row({}), ValidationError);
  EXPECT_THROW(feedback_row(std::vector<double>(9, 1.0)), ValidationError);
}

TEST(Gauge, SingleOscillator) {
  const Eigen::MatrixXd D = gauge_matrix({1.0});
  Eigen::Matrix2d want;
  want << 0, -1, 1, 0;
  EXPECT_EQ(D, want);
  EXPECT_EQ(gauge_matrix_blocks({1.0}), want);
}

TEST(GaugeProperty, ColumnsAreScaledKrylovVectors) {
  Gen g(43);
  for (int k = 0; k < 15; ++k) {
    const std::size_t n = static_cast<std::size_t>(g.integer(1, 3));
    const auto omega = g.distinct_omega(n, 0.5, 3.0, 0.1);
    const OscillatorSystem sys(omega);
    const Eigen::MatrixXd M = closed_loop(omega);
    const Eigen::MatrixXd D = gauge_matrix(omega);
    Eigen::VectorXd v = sys.B();
    double fact = 1.0;
    for (std::size_t i = 0; i < 2 * n; ++i) {
      if (i > 0) fact *= static_cast<double>(i);
      const double sign = (i % 2 == 0) ? 1.0 : -1.0;
      EXPECT_LE((D.col(static_cast<Eigen::Index>(i)) - sign / fact * v).cwiseAbs().maxCoeff(), 1e-9);
      v = M * v;
    }
  }
}

TEST(GaugeProperty, InputMapsToFirstBasisVector) {
  Gen g(44);
  for (int k = 0; k < 15; ++k) {
    const auto omega = g.distinct_omega(static_cast<std::size_t>(g.integer(1, 4)), 0.5, 3.0, 0.1);
    const OscillatorSystem sys(omega);
    const Eigen::VectorXd b = gauge_matrix(omega).lu().solve(sys.B());
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(b.size());
    e1(0) = 1.0;
    EXPECT_LE((b - e1).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Gauge, BlockFormulaDiffersBeyondOneOscillator) {
  const std::vector<double> omega{1.0, 2.0};
  const Eigen::MatrixXd M = closed_loop(omega);
  const Eigen::MatrixXd chain = canonical_chain(4);
  const Eigen::MatrixXd Db = gauge_matrix_blocks(omega);
  EXPECT_GT((Db.inverse() * M * Db - chain).cwiseAbs().maxCoeff(), 1.0);
  const Eigen::MatrixXd D = gauge_matrix(omega);
  EXPECT_LE((D.inverse() * M * D - chain).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Chain, Subdiagonal) {
  const Eigen::MatrixXd A = canonical_chain(6);
  for (Eigen::Index i = 0; i < 6; ++i)
    for (Eigen::Index j = 0; j < 6; ++j)
      EXPECT_EQ(A(i, j), i == j + 1 ? -static_cast<double>(i) : 0.0);
}

TEST(Exact, NilpotencyIndexAndConjugation) {
  const std::vector<std::vector<Rational>> cases{
      {Rational(1)}, {Rational(1), Rational(4)}, {Rational(1), Rational(2), Rational(9, 4)},
      {Rational(1, 4), Rational(1), Rational(5, 2), Rational(7)}};
  for (const auto& w2 : cases) {
    const std::size_t n = w2.size();
    const DenseMatrix<Rational> M = system_matrix_exact(w2) + [&] {
      DenseMatrix<Rational> bc(2 * n, 2 * n);
      const DenseMatrix<Rational> c = feedback_row_exact(w2);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < 2 * n; ++j) bc(2 * i + 1, j) = c(0, j);
      return bc;
    }();
    DenseMatrix<Rational> P = DenseMatrix<Rational>::identity(2 * n);
    for (std::size_t k = 0; k + 1 < 2 * n; ++k) P = P * M;
    EXPECT_FALSE(P.is_zero()) << "n = " << n;
    EXPECT_TRUE((P * M).is_zero()) << "n = " << n;
    const DenseMatrix<Rational> D = gauge_matrix_exact(w2);
    EXPECT_EQ(D.inverse() * M * D, canonical_chain_exact(2 * n)) << "n = " << n;
  }
}

TEST(Reduction, Examples) {
  const ReductionReport r1 = verify_reduction({1.0}, 1e-12);
  EXPECT_TRUE(r1.passed);
  EXPECT_TRUE(verify_reduction({1.0, 2.0}, 1e-9).passed);
  EXPECT_TRUE(verify_reduction({1.0, 2.0}, 1e-9).exact_identities);
  Gen g(45);
  for (int k = 0; k < 5; ++k) {
    const ReductionReport r = verify_reduction(g.distinct_omega(4, 0.5, 4.0, 0.1), 1e-8);
    EXPECT_TRUE(r.passed) << "conj " << r.conjugation << " nil " << r.nilpotency;
    EXPECT_GE(r.condition_number, 1.0);
  }
}

TEST(TransformProperty, TrajectoriesCorrespond) {
  Gen g(46);
  for (std::size_t n : {1u, 2u}) {
    const auto omega = g.distinct_omega(n, 0.5, 2.0, 0.2);
    const OscillatorSystem sys(omega);
    const CanonicalTransform tr = make_canonical(sys);
    const TerminalController ctrl(2 * n);
    Eigen::VectorXd xf = g.normal_vector(static_cast<Eigen::Index>(2 * n));
    // Stretch so that the time-to-go is 5: far from arrival over one time unit.
    const double s = 5.0 / solve_time_scale(ctrl, xf).T_frak;
    for (Eigen::Index i = 0; i < xf.size(); ++i) xf(i) *= std::pow(s, static_cast<double>(i + 1));
    PhaseState x = tr.from_canonical(xf);

    auto canon = [&](const Eigen::VectorXd& z) {
      Eigen::VectorXd d = tr.A_frak * z;
      d(0) += terminal_control_canonical(ctrl, z);
      return d;
    };
    auto phys = [&](const PhaseState& z) {
      return sys.field(z, terminal_control_physical(tr, ctrl, z));
    };
    auto rk4 = [](auto& f, Eigen::VectorXd& z, double h) {
      const Eigen::VectorXd k1 = f(z), k2 = f(z + 0.5 * h * k1), k3 = f(z + 0.5 * h * k2),
                            k4 = f(z + h * k3);
      z += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    };
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      rk4(canon, xf, 1e-3);
      rk4(phys, x, 1e-3);
      worst = std::max(worst, (tr.from_canonical(xf) - x).cwiseAbs().maxCoeff());
    }
    EXPECT_LE(worst, 1e-6) << "n = " << n;
  }
}

}  // namespace
}  // namespace oscctl
