#pragma once

#include <utility>
#include <vector>

#include "knotenergy/vec.hpp"

namespace knotenergy {

/// Solves a cyclic tridiagonal system for every column of rhs.
///
/// Row r reads sub[r] * x[r-1] + diag[r] * x[r] + super[r] * x[r+1] = rhs[r], indices mod n.
/// Requires n >= 3.
Eigen::MatrixXd solve_cyclic_tridiagonal(const std::vector<double>& sub, const std::vector<double>& diag,
                                         const std::vector<double>& super, const Eigen::MatrixXd& rhs);

/// C^2 periodic cubic spline through vector-valued samples (one sample per column).
class PeriodicCubicSpline {
 public:
  /// Knots are placed by cumulative chord length; the period is the closed polygon's perimeter.
  static PeriodicCubicSpline chord_length(const NodeMatrix& samples);

  /// Knots at k * step; the period is N * step.
  static PeriodicCubicSpline uniform(const NodeMatrix& samples, double step);

  Index dim() const { return values_.rows(); }
  Index segments() const { return values_.cols(); }
  double period() const { return period_; }
  double knot(Index k) const { return knots_[static_cast<std::size_t>(k)]; }
  double segment_width(Index k) const;

  Vec value(double t) const;
  Vec derivative(double t) const;

  /// Position and derivative on segment k at local offset tau in [0, width].
  Vec value_on(Index k, double tau) const;
  Vec derivative_on(Index k, double tau) const;

  /// Arc length of segment k from its start to local offset tau (5-point Gauss-Legendre).
  double partial_length(Index k, double tau) const;
  double segment_length(Index k) const { return partial_length(k, segment_width(k)); }

 private:
  PeriodicCubicSpline(NodeMatrix values, std::vector<double> knots, double period);
  std::pair<Index, double> locate(double t) const;

  NodeMatrix values_;
  NodeMatrix second_;
  std::vector<double> knots_;
  double period_ = 0.0;
};

/// Node derivatives of the uniform periodic cubic spline interpolant of `values` (knot spacing `step`).
///
/// This is the differentiation rule used for tangents and variation fields. It is the circulant
/// operator y' = 3/step * A^{-1} (y[k+1] - y[k-1]) with A = circ(1, 4, 1), so it is antisymmetric:
/// its transpose equals its negative.
NodeMatrix spline_node_derivatives(const NodeMatrix& values, double step);

}  // namespace knotenergy
