#include "knotenergy/curves.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "knotenergy/error.hpp"

namespace knotenergy {

namespace {

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return parts;
    start = pos + 1;
  }
}

double parse_number(const std::string& text, std::string_view spec) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !std::isfinite(value)) {
    throw Error(ErrorCode::InvalidArgument, "builtin curve '" + std::string(spec) + "': bad number '" + text + "'");
  }
  return value;
}

template <typename F>
NodeMatrix sample(Index count, F&& f) {
  NodeMatrix out(3, count);
  for (Index k = 0; k < count; ++k) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
    out.col(k) = f(t);
  }
  return out;
}

}  // namespace

NodeMatrix builtin_curve(std::string_view spec, Index count) {
  if (count < 4) throw Error(ErrorCode::InvalidArgument, "builtin curves need at least 4 samples");
  const auto parts = split(spec, ':');
  const std::string& name = parts[0];
  auto expect_args = [&](std::size_t n) {
    if (parts.size() != 1 && parts.size() != n + 1) {
      throw Error(ErrorCode::InvalidArgument,
                  "builtin curve '" + std::string(spec) + "' takes " + std::to_string(n) + " parameters");
    }
  };

  if (name == "circle") {
    expect_args(0);
    return sample(count, [](double t) { return Eigen::Vector3d(std::cos(t), std::sin(t), 0.0); });
  }
  if (name == "ellipse") {
    expect_args(2);
    const double a = parts.size() > 1 ? parse_number(parts[1], spec) : 2.0;
    const double b = parts.size() > 1 ? parse_number(parts[2], spec) : 1.0;
    if (!(a > 0.0 && b > 0.0)) throw Error(ErrorCode::InvalidArgument, "ellipse semi-axes must be positive");
    return sample(count, [=](double t) { return Eigen::Vector3d(a * std::cos(t), b * std::sin(t), 0.0); });
  }
  if (name == "trefoil") {
    expect_args(0);
    return sample(count, [](double t) {
      return Eigen::Vector3d(std::sin(t) + 2.0 * std::sin(2.0 * t), std::cos(t) - 2.0 * std::cos(2.0 * t),
                             -std::sin(3.0 * t));
    });
  }
  if (name == "perturbed") {
    expect_args(2);
    const double mode = parts.size() > 1 ? parse_number(parts[1], spec) : 3.0;
    const double eps = parts.size() > 1 ? parse_number(parts[2], spec) : 0.05;
    if (mode != std::round(mode) || mode < 1.0) {
      throw Error(ErrorCode::InvalidArgument, "perturbation mode must be a positive integer");
    }
    if (!(std::abs(eps) < 1.0)) throw Error(ErrorCode::InvalidArgument, "perturbation amplitude must be below 1");
    return sample(count, [=](double t) {
      const double r = 1.0 + eps * std::cos(mode * t);
      return Eigen::Vector3d(r * std::cos(t), r * std::sin(t), 0.0);
    });
  }
  throw Error(ErrorCode::InvalidArgument, "unknown builtin curve '" + std::string(spec) + "'");
}

NodeMatrix sphere_inversion(const NodeMatrix& points, const Eigen::VectorXd& center) {
  if (center.size() != points.rows()) throw Error(ErrorCode::DimensionMismatch, "inversion center has wrong dimension");
  NodeMatrix out(points.rows(), points.cols());
  for (Index k = 0; k < points.cols(); ++k) {
    const Eigen::VectorXd d = points.col(k) - center;
    const double r2 = d.squaredNorm();
    if (!(r2 > 0.0)) throw Error(ErrorCode::DegenerateInput, "point " + std::to_string(k) + " is the inversion center");
    out.col(k) = center + d / r2;
  }
  return out;
}

}  // namespace knotenergy
