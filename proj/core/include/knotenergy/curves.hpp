#pragma once

#include <string_view>

#include "knotenergy/vec.hpp"

namespace knotenergy {

/// Samples of a named test curve in R^3, `count` points on a uniform parameter grid.
///
/// Names: circle (unit radius), ellipse (2:1) or ellipse:A:B, trefoil
/// ((sin t + 2 sin 2t, cos t - 2 cos 2t, -sin 3t)), perturbed or perturbed:K:EPS
/// (planar radius 1 + EPS cos(K t), default K = 3, EPS = 0.05).
/// Throws InvalidArgument for unknown names or bad parameters.
NodeMatrix builtin_curve(std::string_view spec, Index count = 2048);

/// Image of the points under x -> c + (x - c) / |x - c|^2.
/// Throws DegenerateInput if a point coincides with the center.
NodeMatrix sphere_inversion(const NodeMatrix& points, const Eigen::VectorXd& center);

}  // namespace knotenergy
