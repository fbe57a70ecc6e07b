#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace knotenergy {

enum class PhiKind { PowerLaw, Custom, Tabulated };

/// A repulsion kernel Phi on (0, inf) with its tail integral T(x) = int_x^inf dt / Phi(t)
/// and Lambda(x) = -T(x) / x.
///
/// Immutable and cheap to copy (shared state). The tail cache of non-power-law kernels is
/// internally synchronized, so one model can be used from many threads.
class PhiModel {
 public:
  using Scalar = std::function<double(double)>;

  /// Phi(x) = x^alpha. Throws TailDivergence for alpha <= 1.
  static PhiModel power_law(double alpha);

  /// User supplied kernel. Derivatives are optional; operations that need a missing one
  /// throw MissingDerivative.
  static PhiModel custom(Scalar phi, Scalar dphi = {}, Scalar d2phi = {}, std::string name = "custom");

  /// Monotone cubic (PCHIP) interpolant of (x, Phi) samples, extended beyond the table by power
  /// laws that match value and slope at the end points. Throws Format for fewer than 3 samples,
  /// non-increasing x or non-positive Phi, and TailDivergence when the upper extension decays
  /// no faster than 1/t.
  static PhiModel tabulated(std::vector<double> x, std::vector<double> phi);

  PhiKind kind() const;
  /// Exponent of a power law; empty otherwise.
  std::optional<double> alpha() const;
  const std::string& name() const;

  bool has_dphi() const;
  bool has_d2phi() const;

  double phi(double x) const;
  double dphi(double x) const;
  double d2phi(double x) const;

  /// T(x). Non-power-law kernels integrate adaptively after t = x / u and memoize per x.
  /// Throws TailDivergence when the integral does not converge.
  double tail(double x) const;
  double lambda(double x) const;
  /// d/dx Lambda(sqrt(x)).
  double dlambda_sq(double x) const;

 private:
  struct Impl;
  explicit PhiModel(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

/// Phi_1 = 2 Phi and Phi_2 = -4 / (1/Phi - Lambda). j must be 1 or 2.
double derived_phi_j(const PhiModel& model, int j, double x);

/// Xi_j(x) = x Phi_j'(x) / Phi_j(x). Throws MissingDerivative without dphi.
double xi_j(const PhiModel& model, int j, double x);

/// Everything the pair densities and variational integrands need at one chord length.
struct KernelJet {
  double phi = 0.0;
  double dphi = 0.0;
  double d2phi = 0.0;
  double tail = 0.0;
  double lambda = 0.0;
  /// 1/Phi - Lambda, the weight of the twisting density.
  double weight2 = 0.0;
  double phi_j[2] = {0.0, 0.0};
  double dphi_j[2] = {0.0, 0.0};
  double xi[2] = {0.0, 0.0};
  double dxi[2] = {0.0, 0.0};
};

/// Fast kernel evaluation for O(N^2) loops.
///
/// Power laws are evaluated in closed form. Other kernels interpolate T from a cubic Hermite
/// table on a logarithmic grid over [x_max * 1e-9, x_max] (T' = -1/Phi is used exactly, about
/// 1e-10 relative); arguments outside the table fall back to PhiModel::tail.
class KernelEvaluator {
 public:
  KernelEvaluator(PhiModel model, double x_max);

  const PhiModel& model() const { return model_; }

  double inv_phi(double x) const;
  double tail(double x) const;
  double lambda(double x) const { return -tail(x) / x; }
  double weight2(double x) const { return inv_phi(x) + tail(x) / x; }

  /// order 0: phi, tail, lambda, weight2, phi_j. order 1 adds dphi, dphi_j, xi.
  /// order 2 adds d2phi and dxi.
  KernelJet jet(double x, int order) const;

 private:
  PhiModel model_;
  double alpha_ = 0.0;
  bool power_ = false;
  double log_lo_ = 0.0;
  double log_step_ = 0.0;
  std::vector<double> grid_;
  std::vector<double> tail_table_;
  std::vector<double> slope_table_;
};

/// Local exponent beta such that pair densities behave like |ds|^(-beta) near the diagonal,
/// evaluated at scale x: alpha - 2 for power laws, Xi_1(x) - 2 otherwise (a centered log-slope
/// of Phi when dphi is missing).
double singular_exponent(const PhiModel& model, double x);

}  // namespace knotenergy
