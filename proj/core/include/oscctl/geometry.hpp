#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "oscctl/system.hpp"

namespace oscctl {

enum class SupportMethod { Torus, Bessel, Elliptic2, Auto };

/// Work limits shared by the quadrature paths.
struct QuadratureBudget {
  std::size_t monte_carlo_samples = 10'000'000;  ///< torus path, n >= 4
  std::uint64_t monte_carlo_seed = 0x5eed;
  double bessel_max_cutoff = 1e8;                ///< largest truncation point (scaled units)
};

struct SupportValue {
  double value = 0.0;
  double error = 0.0;  ///< estimated absolute error
  SupportMethod method = SupportMethod::Auto;
};

enum class HessianBackend { ClosedForm, FiniteDifference };

struct HessianForm {
  double value = 0.0;
  HessianBackend backend = HessianBackend::FiniteDifference;
};

struct SingularLocusFlag {
  bool is_singular = false;
  std::optional<std::pair<std::size_t, std::size_t>> witness;
};

struct ResonanceReport {
  bool resonant = false;
  double min_value = 0.0;        ///< smallest |sum m_i omega_i| found
  std::vector<int> witness;      ///< empty when n = 1
  std::size_t scanned = 0;
};

/// Relative tolerance used to detect the locus z_i = +-z_j, others zero.
inline constexpr double kSingularLocusTol = 1e-9;

SingularLocusFlag singular_locus(const ZVector& z, double rel_tol = kSingularLocusTol);

/// Average of |sum z_i cos phi_i| over the n-torus.
SupportValue h_support_detailed(const ZVector& z, SupportMethod method = SupportMethod::Auto,
                                double tol = 1e-10, const QuadratureBudget& budget = {});
double h_support(const ZVector& z, SupportMethod method = SupportMethod::Auto,
                 double tol = 1e-10, const QuadratureBudget& budget = {});

/// Gradient of the support function; throws ZeroVector at z = 0.
Eigen::VectorXd h_gradient(const ZVector& z, double tol = 1e-10,
                           const QuadratureBudget& budget = {});

/// <H(z) xi, xi> for the Hessian H of the support function.
HessianForm h_hessian_form(const ZVector& z, const Eigen::VectorXd& xi, double tol = 1e-10);

/// Bessel representation (2/pi) int_0^inf (1 - prod J0(z_i s)) s^-2 ds.
/// truncation <= 0 selects the cut-off from the tail bound.
SupportValue h_bessel(const ZVector& z, double truncation = 0.0, double tol = 1e-9,
                      const QuadratureBudget& budget = {});

/// Prefactor of the Bessel representation before calibration.
inline constexpr double kBesselPrintedPrefactor = 0.31830988618379067;  // 1/pi
inline constexpr double kBesselCalibratedPrefactor = 0.63661977236758134;  // 2/pi

/// One-dimensional elliptic quadrature for n = 2, |z1| <= |z2|, off |z1| = |z2|.
double h_elliptic2(double z1, double z2, double tol = 1e-12);
/// Same quadrature with the numerator (z2^2 - z1^2) as printed in the source
/// derivation; kept only to document that it disagrees with the torus average.
double h_elliptic2_printed(double z1, double z2, double tol = 1e-12);

/// Support function of the set reachable in time T: int_0^T |<p, e^{-At} B>| dt.
double support_reachable_finite(const OscillatorSystem& sys, const MomentumVector& p, double T,
                                double tol = 1e-12);

ResonanceReport resonance_check(const std::vector<double>& omega, int max_coeff, double tol);

namespace detail {
/// Closed-form average over one axis: mean over phi of |s + a cos phi|, a >= 0.
double axis_average(double s, double a);
double axis_average_ds(double s, double a);
double axis_average_da(double s, double a);

/// Complete elliptic integrals E(k), K(k) and B(k) = (E - (1-k^2) K) / k^2.
/// kc2 = 1 - k^2 is passed separately to avoid cancellation near k = 1.
struct EllipticTriple {
  double E = 0.0, K = 0.0, B = 0.0;
};
EllipticTriple elliptic_triple(double k, double kc2);

/// Closed forms for n = 2 via complete elliptic integrals.
double h2_closed(double z1, double z2);
Eigen::Vector2d h2_gradient(double z1, double z2);
}  // namespace detail

}  // namespace oscctl
