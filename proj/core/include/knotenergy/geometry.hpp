#pragma once

#include "knotenergy/vec.hpp"

namespace knotenergy {

/// A closed curve sampled at N nodes of a uniform parameter grid.
///
/// Curves produced by resample_arclength() are arclength parametrized: node i sits at
/// s_i = (i + 1/2) L / N, the parameter step equals L / N and every speed is 1 up to the
/// spline differentiation error. Curves built with from_nodes() keep an arbitrary uniform
/// parameter grid; their arclength coordinates come from integrating the interpolating spline.
/// Either way the discrete energies integrate over ds = speed * parameter_step.
class ClosedCurve {
 public:
  /// Nodes on a uniform parameter grid of spacing `parameter_step`. Tangents, speeds and
  /// arclength coordinates are derived from the uniform periodic cubic spline through the nodes.
  static ClosedCurve from_nodes(NodeMatrix points, double parameter_step);

  Index size() const { return points_.cols(); }
  Index dim() const { return points_.rows(); }
  double total_length() const { return total_length_; }
  double parameter_step() const { return parameter_step_; }

  const NodeMatrix& points() const { return points_; }
  const NodeMatrix& tangents() const { return tangents_; }
  const Eigen::VectorXd& speeds() const { return speeds_; }
  /// Arclength coordinate of each node.
  const Eigen::VectorXd& nodes() const { return nodes_; }

  auto point(Index i) const { return points_.col(i); }
  auto tangent(Index i) const { return tangents_.col(i); }
  double speed(Index i) const { return speeds_[i]; }
  double node(Index i) const { return nodes_[i]; }

  /// Image under x -> scale * x + shift. Arclength structure scales exactly.
  ClosedCurve similarity(double scale, const Eigen::Ref<const Eigen::VectorXd>& shift) const;

  Eigen::VectorXd centroid() const;
  double diameter() const;

 private:
  friend ClosedCurve resample_arclength(const NodeMatrix& points, Index count);
  ClosedCurve() = default;

  NodeMatrix points_;
  NodeMatrix tangents_;
  Eigen::VectorXd speeds_;
  Eigen::VectorXd nodes_;
  double total_length_ = 0.0;
  double parameter_step_ = 0.0;
};

/// A nodal perturbation field on a curve, with derivatives per unit arclength of that curve.
class VariationField {
 public:
  /// Derivatives use spline_node_derivatives() on the curve's parameter grid, divided by node speed.
  static VariationField on(const ClosedCurve& curve, NodeMatrix values);

  Index size() const { return values_.cols(); }
  Index dim() const { return values_.rows(); }
  const NodeMatrix& values() const { return values_; }
  const NodeMatrix& derivatives() const { return derivatives_; }
  double base_length() const { return base_length_; }

  auto value(Index i) const { return values_.col(i); }
  auto derivative(Index i) const { return derivatives_.col(i); }

 private:
  NodeMatrix values_;
  NodeMatrix derivatives_;
  double base_length_ = 0.0;
};

/// Resamples a closed polygon to `count` nodes equally spaced in arclength of its periodic
/// cubic interpolant (chord-length knots).
///
/// Node i lies at interpolant arclength i L / count from input point 0 and carries the label
/// s_i = (i + 1/2) L / count, so resampling an already resampled curve reproduces it.
/// Throws DegenerateInput for fewer than 4 points or a zero-length segment and
/// InvalidArgument for count < 8.
ClosedCurve resample_arclength(const NodeMatrix& points, Index count);

/// Shorter arclength distance between parameters s1 and s2 on a loop of length L; in [0, L/2].
double intrinsic_distance(double length, double s1, double s2);

/// Signed parameter difference s1 - s2 wrapped into (-L/2, L/2].
double wrapped_difference(double length, double s1, double s2);

double chord(const ClosedCurve& curve, Index i, Index j);

/// Unit tangents and speeds of nodes on a uniform parameter grid.
/// Throws DegenerateInput when a node derivative vanishes.
struct TangentField {
  NodeMatrix tangents;
  Eigen::VectorXd speeds;
};
TangentField tangents(const NodeMatrix& points, double parameter_step);

/// The tangents stored on a curve (same rule as above).
const NodeMatrix& tangents(const ClosedCurve& curve);

}  // namespace knotenergy
