#include "knotenergy/spline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "knotenergy/error.hpp"

namespace knotenergy {

namespace {

constexpr std::array<double, 5> kGaussNodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                               0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kGaussWeights = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                                 0.4786286704993665, 0.2369268850561891};

}  // namespace

Eigen::MatrixXd solve_cyclic_tridiagonal(const std::vector<double>& sub, const std::vector<double>& diag,
                                         const std::vector<double>& super, const Eigen::MatrixXd& rhs) {
  const std::size_t n = diag.size();
  if (n < 3 || sub.size() != n || super.size() != n || static_cast<std::size_t>(rhs.rows()) != n) {
    throw Error(ErrorCode::InvalidArgument, "cyclic tridiagonal system needs n >= 3 and consistent sizes");
  }
  // Sherman-Morrison: A = T + u v^T with T tridiagonal.
  const double corner_low = sub[0];        // A(0, n-1)
  const double corner_high = super[n - 1];  // A(n-1, 0)
  const double gamma = -diag[0];

  std::vector<double> b(diag);
  b[0] -= gamma;
  b[n - 1] -= corner_high * corner_low / gamma;

  // Thomas factorization of the modified tridiagonal matrix.
  std::vector<double> c_prime(n), denom(n);
  denom[0] = b[0];
  c_prime[0] = super[0] / denom[0];
  for (std::size_t i = 1; i < n; ++i) {
    denom[i] = b[i] - sub[i] * c_prime[i - 1];
    c_prime[i] = (i + 1 < n) ? super[i] / denom[i] : 0.0;
  }
  auto thomas = [&](Eigen::MatrixXd d) {
    d.row(0) /= denom[0];
    for (std::size_t i = 1; i < n; ++i) {
      const auto ii = static_cast<Index>(i);
      d.row(ii) = (d.row(ii) - sub[i] * d.row(ii - 1)) / denom[i];
    }
    for (std::size_t i = n - 1; i-- > 0;) {
      const auto ii = static_cast<Index>(i);
      d.row(ii) -= c_prime[i] * d.row(ii + 1);
    }
    return d;
  };

  Eigen::MatrixXd x = thomas(rhs);
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(static_cast<Index>(n), 1);
  u(0, 0) = gamma;
  u(static_cast<Index>(n) - 1, 0) = corner_high;
  const Eigen::MatrixXd z = thomas(u);

  const double vz = z(0, 0) + corner_low / gamma * z(static_cast<Index>(n) - 1, 0);
  for (Index col = 0; col < x.cols(); ++col) {
    const double vx = x(0, col) + corner_low / gamma * x(static_cast<Index>(n) - 1, col);
    x.col(col) -= (vx / (1.0 + vz)) * z.col(0);
  }
  return x;
}

PeriodicCubicSpline::PeriodicCubicSpline(NodeMatrix values, std::vector<double> knots, double period)
    : values_(std::move(values)), knots_(std::move(knots)), period_(period) {
  const Index n = values_.cols();
  if (n < 3) throw Error(ErrorCode::DegenerateInput, "periodic spline needs at least 3 samples");
  std::vector<double> sub(static_cast<std::size_t>(n)), diag(sub.size()), super(sub.size());
  Eigen::MatrixXd rhs(n, values_.rows());
  for (Index k = 0; k < n; ++k) {
    const double h_prev = segment_width((k + n - 1) % n);
    const double h_next = segment_width(k);
    const auto kk = static_cast<std::size_t>(k);
    sub[kk] = h_prev;
    diag[kk] = 2.0 * (h_prev + h_next);
    super[kk] = h_next;
    const auto slope_next = (values_.col((k + 1) % n) - values_.col(k)) / h_next;
    const auto slope_prev = (values_.col(k) - values_.col((k + n - 1) % n)) / h_prev;
    rhs.row(k) = 6.0 * (slope_next - slope_prev).transpose();
  }
  second_ = solve_cyclic_tridiagonal(sub, diag, super, rhs).transpose();
}

PeriodicCubicSpline PeriodicCubicSpline::chord_length(const NodeMatrix& samples) {
  const Index n = samples.cols();
  if (n < 3) throw Error(ErrorCode::DegenerateInput, "periodic spline needs at least 3 samples");
  std::vector<double> knots(static_cast<std::size_t>(n));
  double t = 0.0;
  for (Index k = 0; k < n; ++k) {
    knots[static_cast<std::size_t>(k)] = t;
    const double step = (samples.col((k + 1) % n) - samples.col(k)).norm();
    if (!(step > 0.0)) {
      throw Error(ErrorCode::DegenerateInput,
                  "duplicate consecutive points at indices " + std::to_string(k) + " and " +
                      std::to_string((k + 1) % n));
    }
    t += step;
  }
  return PeriodicCubicSpline(samples, std::move(knots), t);
}

PeriodicCubicSpline PeriodicCubicSpline::uniform(const NodeMatrix& samples, double step) {
  const Index n = samples.cols();
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "spline knot spacing must be positive");
  std::vector<double> knots(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) knots[static_cast<std::size_t>(k)] = static_cast<double>(k) * step;
  return PeriodicCubicSpline(samples, std::move(knots), static_cast<double>(n) * step);
}

double PeriodicCubicSpline::segment_width(Index k) const {
  const auto n = static_cast<Index>(knots_.size());
  const double start = knots_[static_cast<std::size_t>(k)];
  const double end = (k + 1 < n) ? knots_[static_cast<std::size_t>(k + 1)] : period_;
  return end - start;
}

std::pair<Index, double> PeriodicCubicSpline::locate(double t) const {
  double w = std::fmod(t, period_);
  if (w < 0.0) w += period_;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), w);
  const auto k = static_cast<Index>(std::distance(knots_.begin(), it)) - 1;
  return {std::max<Index>(k, 0), w - knots_[static_cast<std::size_t>(std::max<Index>(k, 0))]};
}

Vec PeriodicCubicSpline::value_on(Index k, double tau) const {
  const Index n = segments();
  const Index k1 = (k + 1) % n;
  const double h = segment_width(k);
  const double a = h - tau;
  Vec out = (second_.col(k) * (a * a * a) + second_.col(k1) * (tau * tau * tau)) / (6.0 * h) +
            (values_.col(k) / h - second_.col(k) * (h / 6.0)) * a +
            (values_.col(k1) / h - second_.col(k1) * (h / 6.0)) * tau;
  return out;
}

Vec PeriodicCubicSpline::derivative_on(Index k, double tau) const {
  const Index n = segments();
  const Index k1 = (k + 1) % n;
  const double h = segment_width(k);
  const double a = h - tau;
  Vec out = (-second_.col(k) * (a * a) + second_.col(k1) * (tau * tau)) / (2.0 * h) +
            (values_.col(k1) - values_.col(k)) / h - (second_.col(k1) - second_.col(k)) * (h / 6.0);
  return out;
}

Vec PeriodicCubicSpline::value(double t) const {
  const auto [k, tau] = locate(t);
  return value_on(k, tau);
}

Vec PeriodicCubicSpline::derivative(double t) const {
  const auto [k, tau] = locate(t);
  return derivative_on(k, tau);
}

double PeriodicCubicSpline::partial_length(Index k, double tau) const {
  const double half = 0.5 * tau;
  double sum = 0.0;
  for (std::size_t q = 0; q < kGaussNodes.size(); ++q) {
    sum += kGaussWeights[q] * derivative_on(k, half * (1.0 + kGaussNodes[q])).norm();
  }
  return half * sum;
}

NodeMatrix spline_node_derivatives(const NodeMatrix& values, double step) {
  const Index n = values.cols();
  if (n < 3) throw Error(ErrorCode::DegenerateInput, "node differentiation needs at least 3 nodes");
  const auto nn = static_cast<std::size_t>(n);
  std::vector<double> sub(nn, 1.0), diag(nn, 4.0), super(nn, 1.0);
  Eigen::MatrixXd rhs(n, values.rows());
  for (Index k = 0; k < n; ++k) {
    rhs.row(k) = (3.0 / step) * (values.col((k + 1) % n) - values.col((k + n - 1) % n)).transpose();
  }
  return solve_cyclic_tridiagonal(sub, diag, super, rhs).transpose();
}

}  // namespace knotenergy
