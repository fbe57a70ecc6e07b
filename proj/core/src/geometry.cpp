#include "knotenergy/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "knotenergy/error.hpp"
#include "knotenergy/spline.hpp"

namespace knotenergy {

double wedge_inner(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b,
                   const Eigen::Ref<const Eigen::VectorXd>& c, const Eigen::Ref<const Eigen::VectorXd>& d) {
  const Index n = a.size();
  if (b.size() != n || c.size() != n || d.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "wedge_inner arguments have dimensions " + std::to_string(a.size()) +
                                                  ", " + std::to_string(b.size()) + ", " + std::to_string(c.size()) +
                                                  ", " + std::to_string(d.size()));
  }
  return wedge_inner_unchecked(a, b, c, d);
}

namespace {

void check_dimension(Index dim) {
  if (dim < 2 || dim > kMaxDim) {
    throw Error(ErrorCode::DimensionMismatch,
                "ambient dimension must be in [2, " + std::to_string(kMaxDim) + "], got " + std::to_string(dim));
  }
}

}  // namespace

TangentField tangents(const NodeMatrix& points, double parameter_step) {
  TangentField out;
  out.tangents = spline_node_derivatives(points, parameter_step);
  out.speeds.resize(points.cols());
  for (Index i = 0; i < points.cols(); ++i) {
    const double speed = out.tangents.col(i).norm();
    if (!(speed > 0.0) || !std::isfinite(speed)) {
      throw Error(ErrorCode::DegenerateInput, "zero-length derivative at node " + std::to_string(i));
    }
    out.speeds[i] = speed;
    out.tangents.col(i) /= speed;
  }
  return out;
}

const NodeMatrix& tangents(const ClosedCurve& curve) { return curve.tangents(); }

ClosedCurve ClosedCurve::from_nodes(NodeMatrix points, double parameter_step) {
  check_dimension(points.rows());
  if (points.cols() < 8) throw Error(ErrorCode::InvalidArgument, "a curve needs at least 8 nodes");
  if (!points.allFinite()) throw Error(ErrorCode::DegenerateInput, "non-finite node coordinates");

  ClosedCurve curve;
  auto field = knotenergy::tangents(points, parameter_step);
  const auto spline = PeriodicCubicSpline::uniform(points, parameter_step);
  curve.nodes_.resize(points.cols());
  double s = 0.0;
  for (Index k = 0; k < points.cols(); ++k) {
    curve.nodes_[k] = s;
    s += spline.segment_length(k);
  }
  curve.total_length_ = s;
  curve.parameter_step_ = parameter_step;
  curve.points_ = std::move(points);
  curve.tangents_ = std::move(field.tangents);
  curve.speeds_ = std::move(field.speeds);
  return curve;
}

ClosedCurve ClosedCurve::similarity(double scale, const Eigen::Ref<const Eigen::VectorXd>& shift) const {
  if (!(scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "similarity scale must be positive");
  if (shift.size() != dim()) throw Error(ErrorCode::DimensionMismatch, "similarity shift has wrong dimension");
  ClosedCurve out(*this);
  out.points_ = (scale * points_).colwise() + shift;
  out.nodes_ *= scale;
  out.total_length_ *= scale;
  out.parameter_step_ *= scale;
  return out;
}

Eigen::VectorXd ClosedCurve::centroid() const { return points_.rowwise().mean(); }

double ClosedCurve::diameter() const {
  double best = 0.0;
  for (Index i = 0; i < size(); ++i) {
    for (Index j = i + 1; j < size(); ++j) best = std::max(best, (points_.col(i) - points_.col(j)).squaredNorm());
  }
  return std::sqrt(best);
}

VariationField VariationField::on(const ClosedCurve& curve, NodeMatrix values) {
  if (values.cols() != curve.size() || values.rows() != curve.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "variation field shape does not match the curve");
  }
  VariationField field;
  field.derivatives_ = spline_node_derivatives(values, curve.parameter_step());
  for (Index i = 0; i < curve.size(); ++i) field.derivatives_.col(i) /= curve.speed(i);
  field.values_ = std::move(values);
  field.base_length_ = curve.total_length();
  return field;
}

ClosedCurve resample_arclength(const NodeMatrix& points, Index count) {
  if (points.cols() < 4) {
    throw Error(ErrorCode::DegenerateInput,
                "need at least 4 input points, got " + std::to_string(points.cols()));
  }
  check_dimension(points.rows());
  if (count < 8) throw Error(ErrorCode::InvalidArgument, "node count must be at least 8, got " + std::to_string(count));
  if (!points.allFinite()) throw Error(ErrorCode::DegenerateInput, "non-finite input coordinates");

  const auto spline = PeriodicCubicSpline::chord_length(points);
  const Index segments = spline.segments();
  std::vector<double> cumulative(static_cast<std::size_t>(segments) + 1, 0.0);
  for (Index k = 0; k < segments; ++k) {
    cumulative[static_cast<std::size_t>(k) + 1] = cumulative[static_cast<std::size_t>(k)] + spline.segment_length(k);
  }
  const double length = cumulative.back();
  const double step = length / static_cast<double>(count);

  NodeMatrix out(points.rows(), count);
  for (Index i = 0; i < count; ++i) {
    const double target = static_cast<double>(i) * step;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    Index k = std::clamp<Index>(static_cast<Index>(std::distance(cumulative.begin(), it)) - 1, 0, segments - 1);
    const double remaining = target - cumulative[static_cast<std::size_t>(k)];
    const double width = spline.segment_width(k);
    const double seg_len = spline.segment_length(k);
    // Newton on partial_length(k, tau) = remaining, safeguarded by bisection.
    double lo = 0.0, hi = width;
    double tau = std::clamp(remaining / seg_len * width, 0.0, width);
    for (int iter = 0; iter < 50; ++iter) {
      const double residual = spline.partial_length(k, tau) - remaining;
      if (std::abs(residual) <= 1e-15 * length) break;
      if (residual > 0.0) {
        hi = tau;
      } else {
        lo = tau;
      }
      const double speed = spline.derivative_on(k, tau).norm();
      double next = tau - residual / speed;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      tau = next;
    }
    out.col(i) = spline.value_on(k, tau);
  }

  ClosedCurve curve;
  auto field = knotenergy::tangents(out, step);
  curve.points_ = std::move(out);
  curve.tangents_ = std::move(field.tangents);
  curve.speeds_ = std::move(field.speeds);
  curve.nodes_.resize(count);
  for (Index i = 0; i < count; ++i) curve.nodes_[i] = (static_cast<double>(i) + 0.5) * step;
  curve.total_length_ = length;
  curve.parameter_step_ = step;
  return curve;
}

double intrinsic_distance(double length, double s1, double s2) {
  const double d = std::fmod(std::abs(s1 - s2), length);
  return std::min(d, length - d);
}

double wrapped_difference(double length, double s1, double s2) {
  double d = std::fmod(s1 - s2, length);
  if (d > 0.5 * length) d -= length;
  if (d <= -0.5 * length) d += length;
  return d;
}

double chord(const ClosedCurve& curve, Index i, Index j) { return (curve.point(i) - curve.point(j)).norm(); }

}  // namespace knotenergy
