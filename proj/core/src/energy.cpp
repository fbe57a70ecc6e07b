#include "knotenergy/energy.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <numbers>
#include <string>

#include "knotenergy/audit.hpp"
#include "knotenergy/error.hpp"
#include "knotenergy/parallel.hpp"

namespace knotenergy {

namespace {

void check_cell(const ClosedCurve& curve, Index i, Index j) {
  const Index n = curve.size();
  if (i < 0 || j < 0 || i >= n || j >= n) {
    throw Error(ErrorCode::InvalidArgument, "cell (" + std::to_string(i) + ", " + std::to_string(j) + ") out of range");
  }
  if (i == j) {
    throw Error(ErrorCode::DiagonalSingularity, "densities are singular on the diagonal cell (" + std::to_string(i) +
                                                    ", " + std::to_string(j) + ")");
  }
}

// (a ^ u).(b ^ u) for unit u, as the dot product of the parts normal to u. For nearby nodes both
// tangents are almost parallel to the chord and the expanded form a.b - (a.u)(b.u) loses most digits.
template <typename A, typename B, typename U>
double normal_overlap(const A& a, const B& b, const U& u) {
  return (a - a.dot(u) * u).dot(b - b.dot(u) * u);
}

double intrinsic(const ClosedCurve& curve, Index i, Index j) {
  return intrinsic_distance(curve.total_length(), curve.node(i), curve.node(j));
}

constexpr unsigned kTotal = 1, kM1 = 2, kM2 = 4;

template <unsigned Parts>
Energies sum_energies(const ClosedCurve& curve, const PhiModel& model, const EnergyOptions& options) {
  const Index n = curve.size();
  const double length = curve.total_length();
  const double step = curve.parameter_step();
  const auto weights = offset_weights(n, model, length, options.scheme);
  const KernelEvaluator kernel(model, length);
  const NodeMatrix& p = curve.points();
  const NodeMatrix& tau = curve.tangents();

  std::vector<std::array<double, 3>> rows(static_cast<std::size_t>(n));
  parallel_rows(static_cast<std::size_t>(n), options.threads, [&](std::size_t row) {
    const auto i = static_cast<Index>(row);
    std::array<double, 3> acc{0.0, 0.0, 0.0};
    for (Index k = 0; k < n; ++k) {
      if (k == i) continue;
      const double w = weights[static_cast<std::size_t>((k - i + n) % n)] * curve.speed(k);
      const Vec d = p.col(k) - p.col(i);
      const double r = d.norm();
      const double inv = kernel.inv_phi(r);
      double total = 0.0, m1 = 0.0, m2 = 0.0;
      if constexpr ((Parts & kTotal) != 0) total = inv - kernel.inv_phi(intrinsic(curve, i, k));
      if constexpr ((Parts & kM1) != 0) m1 = 0.5 * (tau.col(i) - tau.col(k)).squaredNorm() * inv;
      if constexpr ((Parts & kM2) != 0) {
        m2 = (inv + kernel.tail(r) / r) * normal_overlap(tau.col(i), tau.col(k), Vec(d / r));
      }
      if (!std::isfinite(total) || !std::isfinite(m1) || !std::isfinite(m2)) {
        throw Error(ErrorCode::NumericFailure, "non-finite density in cell (" + std::to_string(i) + ", " +
                                                   std::to_string(k) + "), chord " + std::to_string(r));
      }
      acc[0] += w * total;
      acc[1] += w * m1;
      acc[2] += w * m2;
    }
    const double scale = curve.speed(i) * step * step;
    for (double& a : acc) a *= scale;
    rows[row] = acc;
  });

  Energies out;
  for (const auto& r : rows) {
    out.total += r[0];
    out.m1 += r[1];
    out.m2 += r[2];
  }
  return out;
}

}  // namespace

std::vector<double> offset_weights(Index count, const PhiModel& model, double length, QuadratureScheme scheme) {
  std::vector<double> w(static_cast<std::size_t>(count), 1.0);
  w[0] = 0.0;
  if (scheme == QuadratureScheme::ZetaCorrected && count >= 3) {
    const double beta = singular_exponent(model, length / static_cast<double>(count));
    if (beta < 1.0) {
      const double corrected = 1.0 - std::riemann_zeta(beta);
      w[1] = corrected;
      w[static_cast<std::size_t>(count) - 1] = corrected;
    }
  }
  return w;
}

double density_total(const ClosedCurve& curve, Index i, Index j, const PhiModel& model) {
  check_cell(curve, i, j);
  return 1.0 / model.phi(chord(curve, i, j)) - 1.0 / model.phi(intrinsic(curve, i, j));
}

double density_m1(const ClosedCurve& curve, Index i, Index j, const PhiModel& model) {
  check_cell(curve, i, j);
  return (curve.tangent(i) - curve.tangent(j)).squaredNorm() / (2.0 * model.phi(chord(curve, i, j)));
}

double density_m2(const ClosedCurve& curve, Index i, Index j, const PhiModel& model) {
  check_cell(curve, i, j);
  const Eigen::VectorXd d = curve.point(j) - curve.point(i);
  const double r = d.norm();
  const Eigen::VectorXd u = d / r;
  return (1.0 / model.phi(r) - model.lambda(r)) * normal_overlap(curve.tangent(i), curve.tangent(j), u);
}

Energies energies(const ClosedCurve& curve, const PhiModel& model, const EnergyOptions& options) {
  return sum_energies<kTotal | kM1 | kM2>(curve, model, options);
}

double energy(const ClosedCurve& curve, const PhiModel& model, Which which, const EnergyOptions& options) {
  switch (which) {
    case Which::Total:
      return sum_energies<kTotal>(curve, model, options).total;
    case Which::M1:
      return sum_energies<kM1>(curve, model, options).m1;
    case Which::M2:
      return sum_energies<kM2>(curve, model, options).m2;
  }
  return 0.0;
}

double decomposition_constant(const PhiModel& model, double length) {
  if (!(length > 0.0)) throw Error(ErrorCode::InvalidArgument, "length must be positive");
  return 2.0 * length * model.tail(0.5 * length);
}

EnergyReport check_decomposition(const ClosedCurve& curve, const PhiModel& model, const EnergyOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  EnergyReport report;
  const Energies e = energies(curve, model, options);
  report.e_total = e.total;
  report.e1 = e.m1;
  report.e2 = e.m2;
  report.constant_term = decomposition_constant(model, curve.total_length());
  report.residual = e.total - (e.m1 + e.m2 + report.constant_term);
  report.n = curve.size();
  report.model = model.name();
  report.alpha = model.alpha();
  report.scheme = options.scheme;
  report.assumptions_verified = audit(model, curve.total_length()).basic_assumptions_hold();
  report.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

bool divergence_suspected(const ClosedCurve& curve, const PhiModel& model, Which which, double value,
                          const EnergyOptions& options) {
  const ClosedCurve finer = resample_arclength(curve.points(), 2 * curve.size());
  const double refined = energy(finer, model, which, options);
  return std::abs(refined) > 1.25 * std::abs(value) && std::abs(refined - value) > 1e-12;
}

CircleEnergies circle_closed_form(double alpha, double length) {
  if (!(alpha > 1.0)) throw Error(ErrorCode::TailDivergence, "circle energies need alpha > 1");
  if (alpha >= 3.0) throw Error(ErrorCode::Pole, "circle energies are infinite for alpha >= 3 (Gamma((3-alpha)/2) pole)");
  if (!(length > 0.0)) throw Error(ErrorCode::InvalidArgument, "length must be positive");
  const double pi = std::numbers::pi;
  const double ratio = std::tgamma(0.5 * (3.0 - alpha)) / std::tgamma(0.5 * (4.0 - alpha));
  const double scale = std::pow(length, alpha - 2.0);
  const double bracket = (alpha - 2.0) * std::pow(pi, alpha - 0.5) * ratio + std::pow(2.0, alpha);
  CircleEnergies out;
  out.e_total = bracket / ((alpha - 1.0) * scale);
  out.e1 = 2.0 * std::pow(pi, alpha - 0.5) * ratio / scale;
  out.e2 = out.e_total - out.e1 - std::pow(2.0, alpha) / ((alpha - 1.0) * scale);
  return out;
}

std::string to_string(QuadratureScheme scheme) {
  return scheme == QuadratureScheme::ZetaCorrected ? "zeta-corrected" : "skip-diagonal";
}

std::string to_string(Which which) {
  switch (which) {
    case Which::Total:
      return "total";
    case Which::M1:
      return "m1";
    case Which::M2:
      return "m2";
  }
  return "total";
}

}  // namespace knotenergy
