#pragma once

#include <Eigen/Core>

namespace knotenergy {

/// Largest ambient dimension supported by the per-cell kernels.
inline constexpr int kMaxDim = 16;

/// Small ambient-space vector; lives on the stack (no heap traffic in O(N^2) loops).
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

/// Column-per-node storage: dim x N.
using NodeMatrix = Eigen::MatrixXd;

using Index = Eigen::Index;

/// <a^b, c^d> = (a.c)(b.d) - (a.d)(b.c). Throws DimensionMismatch unless all four agree.
double wedge_inner(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b,
                   const Eigen::Ref<const Eigen::VectorXd>& c, const Eigen::Ref<const Eigen::VectorXd>& d);

/// Unchecked variant for hot loops.
template <typename A, typename B, typename C, typename D>
inline double wedge_inner_unchecked(const A& a, const B& b, const C& c, const D& d) {
  return a.dot(c) * b.dot(d) - a.dot(d) * b.dot(c);
}

}  // namespace knotenergy
