#include "knotenergy/variation.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "knotenergy/error.hpp"
#include "knotenergy/parallel.hpp"
#include "knotenergy/spline.hpp"

namespace knotenergy {

namespace {

void check_j(int j) {
  if (j != 1 && j != 2) throw Error(ErrorCode::InvalidArgument, "operator index j must be 1 or 2");
}

void check_field(const ClosedCurve& curve, const VariationField& field, const char* name) {
  if (field.size() != curve.size() || field.dim() != curve.dim()) {
    throw Error(ErrorCode::DimensionMismatch, std::string("field ") + name + " does not match the curve grid");
  }
}

bool uses(Part part, int j) { return part == Part::Sum || (j == 1 ? part == Part::M1 : part == Part::M2); }

double min_adjacent_gap(const NodeMatrix& p) {
  double best = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < p.cols(); ++k) best = std::min(best, (p.col((k + 1) % p.cols()) - p.col(k)).norm());
  return best;
}

// Energy of the polygon curve + sum_m coeffs[m] * directions[m], re-splined on the same grid.
double perturbed_energy(const ClosedCurve& curve, const std::vector<const NodeMatrix*>& directions,
                        const std::vector<double>& coeffs, const PhiModel& model, FdTarget target,
                        const EnergyOptions& options) {
  NodeMatrix moved = curve.points();
  for (std::size_t m = 0; m < directions.size(); ++m) moved += coeffs[m] * *directions[m];
  if (!(min_adjacent_gap(moved) > 0.25 * min_adjacent_gap(curve.points()))) {
    throw Error(ErrorCode::StepTooLarge, "finite-difference step collapses adjacent nodes");
  }
  try {
    return target_energy(ClosedCurve::from_nodes(std::move(moved), curve.parameter_step()), model, target, options);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DegenerateInput || e.code() == ErrorCode::NumericFailure) {
      throw Error(ErrorCode::StepTooLarge, std::string("finite-difference step breaks the curve: ") + e.what());
    }
    throw;
  }
}

void check_direction(const ClosedCurve& curve, const NodeMatrix& dir, double step) {
  if (dir.rows() != curve.dim() || dir.cols() != curve.size()) {
    throw Error(ErrorCode::DimensionMismatch, "finite-difference direction does not match the curve grid");
  }
  if (!(step > 0.0) || !std::isfinite(step)) throw Error(ErrorCode::InvalidArgument, "finite-difference step must be positive");
}

double observed_order(double coarse, double mid, double fine) {
  const double a = std::abs(coarse - mid), b = std::abs(mid - fine);
  if (!(a > 0.0) || !(b > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::log2(a / b);
}

// Double sum over off-diagonal cells of weight * speed_i * speed_k * h^2 * cell(frame).
template <typename Cell>
double cell_sum(const ClosedCurve& curve, const PhiModel& model, int order, const EnergyOptions& options, Cell&& cell) {
  const Index n = curve.size();
  const double step = curve.parameter_step();
  const auto weights = offset_weights(n, model, curve.total_length(), options.scheme);
  const KernelEvaluator kernel(model, curve.total_length());
  std::vector<double> rows(static_cast<std::size_t>(n), 0.0);
  parallel_rows(static_cast<std::size_t>(n), options.threads, [&](std::size_t row) {
    const auto i = static_cast<Index>(row);
    double acc = 0.0;
    for (Index k = 0; k < n; ++k) {
      if (k == i) continue;
      const PairFrame frame = pair_frame(curve, i, k, kernel, order);
      acc += weights[static_cast<std::size_t>((k - i + n) % n)] * curve.speed(k) * cell(frame);
    }
    rows[row] = acc * curve.speed(i) * step * step;
  });
  double total = 0.0;
  for (double r : rows) total += r;
  if (!std::isfinite(total)) throw Error(ErrorCode::NumericFailure, "variation sum is not finite");
  return total;
}

}  // namespace

PairFrame pair_frame(const ClosedCurve& curve, Index i, Index k, const KernelEvaluator& kernel, int order) {
  if (i == k) {
    throw Error(ErrorCode::DiagonalSingularity, "no pair frame on the diagonal cell (" + std::to_string(i) + ", " +
                                                    std::to_string(k) + ")");
  }
  PairFrame f;
  f.i = i;
  f.k = k;
  f.delta = curve.point(i) - curve.point(k);
  f.chord = f.delta.norm();
  f.ds = wrapped_difference(curve.total_length(), curve.node(i), curve.node(k));
  f.u = f.delta / f.chord;
  f.r1_direction = f.ds > 0.0 ? f.u : Vec(-f.u);
  f.tau1 = curve.tangent(i);
  f.tau2 = curve.tangent(k);
  f.jet = kernel.jet(f.chord, order);
  return f;
}

PairFrame pair_frame(const ClosedCurve& curve, Index i, Index k, const PhiModel& model, int order) {
  return pair_frame(curve, i, k, KernelEvaluator(model, curve.total_length()), order);
}

PairField curve_pair(const ClosedCurve& curve, Index i, Index k) {
  return PairField{curve.point(i), curve.point(k), curve.tangent(i), curve.tangent(k)};
}

PairField field_pair(const VariationField& field, Index i, Index k) {
  return PairField{field.value(i), field.value(k), field.derivative(i), field.derivative(k)};
}

Vec r1_op(const PairFrame& frame, const PairField& v) {
  const double sign = frame.ds > 0.0 ? 1.0 : -1.0;
  return (sign / frame.chord) * (v.v1 - v.v2);
}

Vec r2_op(const PairField& v) { return 0.5 * (v.d1 + v.d2); }

Vec q_op(int j, int i, const PairFrame& frame, const PairField& v) {
  check_j(j);
  check_j(i);
  if (j == 1) return v.d1 - v.d2;
  const Vec& tau = i == 1 ? frame.tau1 : frame.tau2;
  const Vec& d = i == 1 ? v.d1 : v.d2;
  const double sign = i == 1 ? 2.0 : -2.0;
  return sign * (d - frame.r1_direction.dot(tau) * r1_op(frame, v));
}

double s_op(int j, int i, const PairFrame& frame, const PairField& v, const PairField& w) {
  check_j(j);
  if (j == 1) return r2_op(v).dot(q_op(1, i, frame, w)) + q_op(1, i, frame, v).dot(r2_op(w));
  return r1_op(frame, v).dot(q_op(2, i, frame, w)) + q_op(2, i, frame, v).dot(r1_op(frame, w));
}

double m_via_operators(int j, const PairFrame& frame, const PairField& f) {
  check_j(j);
  return q_op(j, 1, frame, f).dot(q_op(j, 2, frame, f)) / frame.jet.phi_j[j - 1];
}

double g_integrand(int j, const PairFrame& frame, const PairField& f, const PairField& phi) {
  check_j(j);
  const double big_phi = frame.jet.phi_j[j - 1];
  const double xi = frame.jet.xi[j - 1];
  const double r2 = frame.chord * frame.chord;
  const double m = m_via_operators(j, frame, f);
  const double cross = q_op(j, 1, frame, f).dot(q_op(j, 2, frame, phi)) + q_op(j, 2, frame, f).dot(q_op(j, 1, frame, phi));
  return cross / big_phi - m * xi * frame.delta.dot(phi.v1 - phi.v2) / r2;
}

double h_integrand(int j, const PairFrame& frame, const PairField& f, const PairField& phi, const PairField& psi) {
  check_j(j);
  const double big_phi = frame.jet.phi_j[j - 1];
  const double xi = frame.jet.xi[j - 1];
  const double dxi = frame.jet.dxi[j - 1];
  const double r = frame.chord;
  const double r2 = r * r;
  const Vec dphi = phi.v1 - phi.v2;
  const Vec dpsi = psi.v1 - psi.v2;
  const double a = frame.delta.dot(dphi);
  const double b = frame.delta.dot(dpsi);
  const double m = m_via_operators(j, frame, f);

  const double quad = q_op(j, 1, frame, phi).dot(q_op(j, 2, frame, psi)) +
                      q_op(j, 2, frame, phi).dot(q_op(j, 1, frame, psi));
  const double s = s_op(j, 1, frame, f, phi) * s_op(j, 2, frame, f, psi) +
                   s_op(j, 2, frame, f, phi) * s_op(j, 1, frame, f, psi);
  return (quad - s) / big_phi - g_integrand(j, frame, f, phi) * xi * b / r2 -
         g_integrand(j, frame, f, psi) * xi * a / r2 - m * xi * dphi.dot(dpsi) / r2 +
         m * (2.0 * xi - xi * xi - r * dxi) * a * b / (r2 * r2);
}

double first_variation(Part part, const ClosedCurve& curve, const VariationField& phi, const PhiModel& model,
                       const EnergyOptions& options) {
  check_field(curve, phi, "phi");
  return cell_sum(curve, model, 1, options, [&](const PairFrame& frame) {
    const PairField f = curve_pair(curve, frame.i, frame.k);
    const PairField v = field_pair(phi, frame.i, frame.k);
    double value = 0.0;
    for (int j = 1; j <= 2; ++j) {
      if (uses(part, j)) value += g_integrand(j, frame, f, v);
    }
    return value;
  });
}

double second_variation(Part part, const ClosedCurve& curve, const VariationField& phi, const VariationField& psi,
                        const PhiModel& model, const EnergyOptions& options) {
  check_field(curve, phi, "phi");
  check_field(curve, psi, "psi");
  if (!model.has_d2phi()) {
    throw Error(ErrorCode::MissingDerivative, "second variation needs the second derivative of the kernel");
  }
  return cell_sum(curve, model, 2, options, [&](const PairFrame& frame) {
    const PairField f = curve_pair(curve, frame.i, frame.k);
    const PairField v = field_pair(phi, frame.i, frame.k);
    const PairField w = field_pair(psi, frame.i, frame.k);
    double value = 0.0;
    for (int j = 1; j <= 2; ++j) {
      if (uses(part, j)) value += h_integrand(j, frame, f, v, w);
    }
    return value;
  });
}

NodeMatrix assemble_gradient(const ClosedCurve& curve, const PhiModel& model, Part part, const EnergyOptions& options) {
  const Index n = curve.size();
  const Index dim = curve.dim();
  const double step = curve.parameter_step();
  const auto weights = offset_weights(n, model, curve.total_length(), options.scheme);
  const KernelEvaluator kernel(model, curve.total_length());

  // Per cell (i, k) the first-variation density is A . phi'_i + A' . phi'_k + B . (phi_i - phi_k).
  // The mirrored cell (k, i) contributes the same coefficients to node i, hence the factor 2.
  NodeMatrix value_coef(dim, n), slope_coef(dim, n);
  parallel_rows(static_cast<std::size_t>(n), options.threads, [&](std::size_t row) {
    const auto i = static_cast<Index>(row);
    Vec a = Vec::Zero(dim), b = Vec::Zero(dim);
    for (Index k = 0; k < n; ++k) {
      if (k == i) continue;
      const PairFrame frame = pair_frame(curve, i, k, kernel, 1);
      const double w = weights[static_cast<std::size_t>((k - i + n) % n)] * curve.speed(k);
      const double r2 = frame.chord * frame.chord;
      if (uses(part, 1)) {
        const Vec e = frame.tau1 - frame.tau2;
        const double phi1 = frame.jet.phi_j[0];
        const double m1 = e.squaredNorm() / phi1;
        b += w * (2.0 / phi1) * e;
        a -= w * (m1 * frame.jet.xi[0] / r2) * frame.delta;
      }
      if (uses(part, 2)) {
        const double phi2 = frame.jet.phi_j[1];
        const double ca = frame.u.dot(frame.tau1);
        const double cb = frame.u.dot(frame.tau2);
        const Vec pa = frame.tau1 - ca * frame.u;
        const Vec pb = frame.tau2 - cb * frame.u;
        const double m2 = -4.0 * pa.dot(pb) / phi2;
        b += w * (-4.0 / phi2) * pb;
        a += w * ((4.0 / (frame.chord * phi2)) * (cb * pa + ca * pb) - (m2 * frame.jet.xi[1] / r2) * frame.delta);
      }
    }
    const double scale = 2.0 * curve.speed(i) * step * step;
    value_coef.col(i) = scale * a;
    slope_coef.col(i) = scale * b / curve.speed(i);
  });
  // sum_i b_i . (D phi)_i / speed_i = -sum_i (D (b / speed))_i . phi_i because D is antisymmetric.
  const NodeMatrix transported = spline_node_derivatives(slope_coef, step);
  const double cell = curve.total_length() / static_cast<double>(n);
  NodeMatrix g = (value_coef - transported) / cell;
  if (!g.allFinite()) throw Error(ErrorCode::NumericFailure, "gradient is not finite");
  return g;
}

double target_energy(const ClosedCurve& curve, const PhiModel& model, FdTarget target, const EnergyOptions& options) {
  switch (target) {
    case FdTarget::Total:
      return energy(curve, model, Which::Total, options);
    case FdTarget::M1:
      return energy(curve, model, Which::M1, options);
    case FdTarget::M2:
      return energy(curve, model, Which::M2, options);
    case FdTarget::Sum:
      break;
  }
  const Energies e = energies(curve, model, options);
  return e.m1 + e.m2;
}

FdEstimate fd_first_variation(const ClosedCurve& curve, const NodeMatrix& phi, const PhiModel& model, FdTarget target,
                              double step, const EnergyOptions& options) {
  check_direction(curve, phi, step);
  auto central = [&](double h) {
    const double plus = perturbed_energy(curve, {&phi}, {h}, model, target, options);
    const double minus = perturbed_energy(curve, {&phi}, {-h}, model, target, options);
    return (plus - minus) / (2.0 * h);
  };
  const double coarse = central(2.0 * step);
  FdEstimate out;
  out.at_step = central(step);
  out.at_half_step = central(0.5 * step);
  out.value = (4.0 * out.at_half_step - out.at_step) / 3.0;
  out.order_estimate = observed_order(coarse, out.at_step, out.at_half_step);
  return out;
}

FdEstimate fd_second_variation(const ClosedCurve& curve, const NodeMatrix& phi, const NodeMatrix& psi,
                               const PhiModel& model, FdTarget target, double step, const EnergyOptions& options) {
  check_direction(curve, phi, step);
  check_direction(curve, psi, step);
  auto mixed = [&](double h) {
    auto e = [&](double a, double b) { return perturbed_energy(curve, {&phi, &psi}, {a, b}, model, target, options); };
    return (e(h, h) - e(h, -h) - e(-h, h) + e(-h, -h)) / (4.0 * h * h);
  };
  const double coarse = mixed(2.0 * step);
  FdEstimate out;
  out.at_step = mixed(step);
  out.at_half_step = mixed(0.5 * step);
  out.value = (4.0 * out.at_half_step - out.at_step) / 3.0;
  out.order_estimate = observed_order(coarse, out.at_step, out.at_half_step);
  return out;
}

}  // namespace knotenergy
