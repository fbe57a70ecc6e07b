#include "knotenergy/phi_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <string>
#include <utility>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "knotenergy/error.hpp"

namespace knotenergy {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void check_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " needs x > 0, got " + format_double(x));
  }
}

void check_j(int j) {
  if (j != 1 && j != 2) throw Error(ErrorCode::InvalidArgument, "kernel index j must be 1 or 2");
}

// Fritsch-Carlson slopes with the three-point shape-preserving end conditions.
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> h(n - 1), delta(n - 1), m(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = x[k + 1] - x[k];
    delta[k] = (y[k + 1] - y[k]) / h[k];
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (delta[k - 1] * delta[k] <= 0.0) continue;
    const double w1 = 2.0 * h[k] + h[k - 1];
    const double w2 = h[k] + 2.0 * h[k - 1];
    m[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
  }
  auto edge = [](double h0, double h1, double d0, double d1) {
    double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (d * d0 <= 0.0) return 0.0;
    if (d0 * d1 < 0.0 && std::abs(d) > 3.0 * std::abs(d0)) return 3.0 * d0;
    return d;
  };
  m[0] = edge(h[0], h[1], delta[0], delta[1]);
  m[n - 1] = edge(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  return m;
}

KernelJet assemble_jet(double x, double phi, double dphi, double d2phi, double tail, int order) {
  KernelJet jet;
  jet.phi = phi;
  jet.tail = tail;
  jet.lambda = -tail / x;
  jet.weight2 = 1.0 / phi - jet.lambda;
  jet.phi_j[0] = 2.0 * phi;
  jet.phi_j[1] = -4.0 / jet.weight2;
  if (order < 1) return jet;

  const double k = jet.weight2;
  const double dk = -dphi / (phi * phi) - k / x;
  jet.dphi = dphi;
  jet.dphi_j[0] = 2.0 * dphi;
  jet.dphi_j[1] = 4.0 * dk / (k * k);
  jet.xi[0] = x * dphi / phi;
  jet.xi[1] = -x * dk / k;
  if (order < 2) return jet;

  const double d2lambda = (dk * x - k) / (x * x);
  const double d2k = -d2phi / (phi * phi) + 2.0 * dphi * dphi / (phi * phi * phi) - d2lambda;
  const double r1 = dphi / phi;
  const double r2 = dk / k;
  jet.d2phi = d2phi;
  jet.dxi[0] = r1 + x * d2phi / phi - x * r1 * r1;
  jet.dxi[1] = -r2 - x * d2k / k + x * r2 * r2;
  return jet;
}

KernelJet power_jet(double x, double alpha, int order) {
  KernelJet jet;
  const double xa = std::pow(x, alpha);
  jet.phi = xa;
  jet.tail = x / ((alpha - 1.0) * xa);
  jet.lambda = -1.0 / ((alpha - 1.0) * xa);
  jet.weight2 = alpha / ((alpha - 1.0) * xa);
  jet.phi_j[0] = 2.0 * xa;
  jet.phi_j[1] = -4.0 * (alpha - 1.0) * xa / alpha;
  if (order < 1) return jet;
  jet.dphi = alpha * xa / x;
  jet.dphi_j[0] = alpha * jet.phi_j[0] / x;
  jet.dphi_j[1] = alpha * jet.phi_j[1] / x;
  jet.xi[0] = alpha;
  jet.xi[1] = alpha;
  if (order < 2) return jet;
  jet.d2phi = alpha * (alpha - 1.0) * xa / (x * x);
  return jet;
}

}  // namespace

struct PhiModel::Impl {
  PhiKind kind = PhiKind::PowerLaw;
  double alpha = 0.0;
  std::string name;
  Scalar phi_fn, dphi_fn, d2phi_fn;

  // Tabulated kernels.
  std::vector<double> tx, ty, tm;
  double upper_exponent = 0.0;
  double lower_exponent = 0.0;

  mutable std::mutex mutex;
  mutable std::map<double, double> tail_cache;

  double table_phi(double x, int derivative) const;
  double tail_uncached(double x) const;
};

double PhiModel::Impl::table_phi(double x, int derivative) const {
  const std::size_t n = tx.size();
  if (x >= tx[n - 1] || x <= tx[0]) {
    const bool upper = x >= tx[n - 1];
    const double x0 = upper ? tx[n - 1] : tx[0];
    const double y0 = upper ? ty[n - 1] : ty[0];
    const double p = upper ? upper_exponent : lower_exponent;
    const double v = y0 * std::pow(x / x0, p);
    if (derivative == 0) return v;
    if (derivative == 1) return p * v / x;
    return p * (p - 1.0) * v / (x * x);
  }
  const auto it = std::upper_bound(tx.begin(), tx.end(), x);
  const std::size_t k = static_cast<std::size_t>(std::distance(tx.begin(), it)) - 1;
  const double h = tx[k + 1] - tx[k];
  const double t = (x - tx[k]) / h;
  const double y0 = ty[k], y1 = ty[k + 1], m0 = tm[k] * h, m1 = tm[k + 1] * h;
  switch (derivative) {
    case 0: {
      const double t2 = t * t, t3 = t2 * t;
      return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1;
    }
    case 1: {
      const double t2 = t * t;
      return ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * m0 + (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * m1) / h;
    }
    default:
      return ((12 * t - 6) * y0 + (6 * t - 4) * m0 + (-12 * t + 6) * y1 + (6 * t - 2) * m1) / (h * h);
  }
}

double PhiModel::Impl::tail_uncached(double x) const {
  if (kind == PhiKind::Tabulated) {
    const std::size_t n = tx.size();
    const double xm = tx[n - 1];
    const double p = upper_exponent;
    auto upper_tail = [&](double a) { return a / (ty[n - 1] * std::pow(a / xm, p) * (p - 1.0)); };
    if (x >= xm) return upper_tail(x);
    double sum = upper_tail(xm);
    auto inv = [this](double t) { return 1.0 / table_phi(t, 0); };
    for (std::size_t k = n - 1; k-- > 0;) {
      const double a = std::max(x, tx[k]);
      const double b = tx[k + 1];
      if (a < b) sum += boost::math::quadrature::gauss_kronrod<double, 21>::integrate(inv, a, b, 15, 1e-14);
      if (x >= tx[k]) return sum;
    }
    // Below the table: Phi = y0 (t/x0)^q.
    const double q = lower_exponent;
    const double r = x / tx[0];
    const double scale = tx[0] / ty[0];
    sum += (std::abs(q - 1.0) < 1e-12) ? -scale * std::log(r) : scale * (1.0 - std::pow(r, 1.0 - q)) / (1.0 - q);
    return sum;
  }

  // t = x / u maps (x, inf) onto (0, 1].
  auto integrand = [&](double u) {
    const double t = x / u;
    const double p = phi_fn(t);
    if (!std::isfinite(p)) return 0.0;
    return t / (u * p);
  };
  double err = 0.0, l1 = 0.0;
  double value = 0.0;
  try {
    boost::math::quadrature::tanh_sinh<double> integrator;
    value = integrator.integrate(integrand, 0.0, 1.0, 1e-12, &err, &l1);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::TailDivergence, "tail integral at x = " + format_double(x) + " failed: " + e.what());
  }
  if (!std::isfinite(value) || !(err <= 1e-6 * std::abs(value))) {
    throw Error(ErrorCode::TailDivergence, "tail integral at x = " + format_double(x) +
                                               " does not converge (estimate " + format_double(value) +
                                               ", error " + format_double(err) + ")");
  }
  return value;
}

PhiModel::PhiModel(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

PhiModel PhiModel::power_law(double alpha) {
  if (!std::isfinite(alpha)) throw Error(ErrorCode::InvalidArgument, "alpha must be finite");
  if (!(alpha > 1.0)) {
    throw Error(ErrorCode::TailDivergence,
                "power law alpha = " + format_double(alpha) + " has a divergent tail integral (need alpha > 1)");
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = PhiKind::PowerLaw;
  impl->alpha = alpha;
  impl->name = "x^" + format_double(alpha);
  return PhiModel(std::move(impl));
}

PhiModel PhiModel::custom(Scalar phi, Scalar dphi, Scalar d2phi, std::string name) {
  if (!phi) throw Error(ErrorCode::InvalidArgument, "custom kernel needs a phi function");
  auto impl = std::make_shared<Impl>();
  impl->kind = PhiKind::Custom;
  impl->name = std::move(name);
  impl->phi_fn = std::move(phi);
  impl->dphi_fn = std::move(dphi);
  impl->d2phi_fn = std::move(d2phi);
  return PhiModel(std::move(impl));
}

PhiModel PhiModel::tabulated(std::vector<double> x, std::vector<double> phi) {
  if (x.size() != phi.size()) throw Error(ErrorCode::Format, "kernel table columns differ in length");
  if (x.size() < 3) throw Error(ErrorCode::Format, "kernel table needs at least 3 rows");
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!std::isfinite(x[k]) || !(x[k] > 0.0)) {
      throw Error(ErrorCode::Format, "kernel table row " + std::to_string(k + 1) + ": x must be positive");
    }
    if (!std::isfinite(phi[k]) || !(phi[k] > 0.0)) {
      throw Error(ErrorCode::Format, "kernel table row " + std::to_string(k + 1) + ": phi must be positive");
    }
    if (k > 0 && !(x[k] > x[k - 1])) {
      throw Error(ErrorCode::Format, "kernel table row " + std::to_string(k + 1) + ": x must be strictly increasing");
    }
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = PhiKind::Tabulated;
  impl->name = "tabulated";
  impl->tm = pchip_slopes(x, phi);
  const std::size_t n = x.size();
  impl->upper_exponent = x[n - 1] * impl->tm[n - 1] / phi[n - 1];
  impl->lower_exponent = x[0] * impl->tm[0] / phi[0];
  if (!(impl->upper_exponent > 1.0)) {
    throw Error(ErrorCode::TailDivergence, "kernel table ends with log-slope " + format_double(impl->upper_exponent) +
                                               " <= 1, so its power-law extension has a divergent tail");
  }
  impl->tx = std::move(x);
  impl->ty = std::move(phi);
  return PhiModel(std::move(impl));
}

PhiKind PhiModel::kind() const { return impl_->kind; }

std::optional<double> PhiModel::alpha() const {
  if (impl_->kind == PhiKind::PowerLaw) return impl_->alpha;
  return std::nullopt;
}

const std::string& PhiModel::name() const { return impl_->name; }

bool PhiModel::has_dphi() const { return impl_->kind != PhiKind::Custom || static_cast<bool>(impl_->dphi_fn); }
bool PhiModel::has_d2phi() const { return impl_->kind != PhiKind::Custom || static_cast<bool>(impl_->d2phi_fn); }

double PhiModel::phi(double x) const {
  switch (impl_->kind) {
    case PhiKind::PowerLaw:
      return std::pow(x, impl_->alpha);
    case PhiKind::Tabulated:
      check_positive(x, "tabulated phi");
      return impl_->table_phi(x, 0);
    case PhiKind::Custom:
      break;
  }
  return impl_->phi_fn(x);
}

double PhiModel::dphi(double x) const {
  switch (impl_->kind) {
    case PhiKind::PowerLaw:
      return impl_->alpha * std::pow(x, impl_->alpha - 1.0);
    case PhiKind::Tabulated:
      check_positive(x, "tabulated phi");
      return impl_->table_phi(x, 1);
    case PhiKind::Custom:
      break;
  }
  if (!impl_->dphi_fn) throw Error(ErrorCode::MissingDerivative, "kernel '" + impl_->name + "' has no first derivative");
  return impl_->dphi_fn(x);
}

double PhiModel::d2phi(double x) const {
  switch (impl_->kind) {
    case PhiKind::PowerLaw:
      return impl_->alpha * (impl_->alpha - 1.0) * std::pow(x, impl_->alpha - 2.0);
    case PhiKind::Tabulated:
      check_positive(x, "tabulated phi");
      return impl_->table_phi(x, 2);
    case PhiKind::Custom:
      break;
  }
  if (!impl_->d2phi_fn) {
    throw Error(ErrorCode::MissingDerivative, "kernel '" + impl_->name + "' has no second derivative");
  }
  return impl_->d2phi_fn(x);
}

double PhiModel::tail(double x) const {
  check_positive(x, "tail");
  if (impl_->kind == PhiKind::PowerLaw) return std::pow(x, 1.0 - impl_->alpha) / (impl_->alpha - 1.0);
  {
    std::lock_guard lock(impl_->mutex);
    if (auto it = impl_->tail_cache.find(x); it != impl_->tail_cache.end()) return it->second;
  }
  const double value = impl_->tail_uncached(x);
  std::lock_guard lock(impl_->mutex);
  impl_->tail_cache.emplace(x, value);
  return value;
}

double PhiModel::lambda(double x) const {
  if (impl_->kind == PhiKind::PowerLaw) return -std::pow(x, -impl_->alpha) / (impl_->alpha - 1.0);
  return -tail(x) / x;
}

double PhiModel::dlambda_sq(double x) const {
  check_positive(x, "dlambda_sq");
  const double y = std::sqrt(x);
  // Lambda'(y) = (1/Phi(y) - Lambda(y)) / y, chain rule with dy/dx = 1/(2y).
  return (1.0 / phi(y) - lambda(y)) / (2.0 * x);
}

double derived_phi_j(const PhiModel& model, int j, double x) {
  check_j(j);
  check_positive(x, "derived_phi_j");
  if (j == 1) return 2.0 * model.phi(x);
  return -4.0 / (1.0 / model.phi(x) - model.lambda(x));
}

double xi_j(const PhiModel& model, int j, double x) {
  check_j(j);
  check_positive(x, "xi_j");
  if (auto a = model.alpha()) return *a;
  const KernelJet jet = assemble_jet(x, model.phi(x), model.dphi(x), 0.0, model.tail(x), 1);
  return jet.xi[j - 1];
}

double singular_exponent(const PhiModel& model, double x) {
  if (auto a = model.alpha()) return *a - 2.0;
  if (model.has_dphi()) return x * model.dphi(x) / model.phi(x) - 2.0;
  const double r = 1.01;
  return (std::log(model.phi(x * r)) - std::log(model.phi(x / r))) / (2.0 * std::log(r)) - 2.0;
}

KernelEvaluator::KernelEvaluator(PhiModel model, double x_max) : model_(std::move(model)) {
  check_positive(x_max, "kernel evaluator range");
  if (auto a = model_.alpha()) {
    power_ = true;
    alpha_ = *a;
    return;
  }
  constexpr double kDecades = 9.0;
  constexpr int kPerDecade = 400;
  const int count = static_cast<int>(kDecades) * kPerDecade + 1;
  log_step_ = std::log(10.0) / kPerDecade;
  log_lo_ = std::log(x_max) - kDecades * std::log(10.0);
  grid_.resize(static_cast<std::size_t>(count));
  tail_table_.resize(grid_.size());
  slope_table_.resize(grid_.size());
  for (int k = 0; k < count; ++k) grid_[static_cast<std::size_t>(k)] = std::exp(log_lo_ + k * log_step_);
  grid_.back() = x_max;

  auto inv = [this](double t) { return 1.0 / model_.phi(t); };
  tail_table_.back() = model_.tail(x_max);
  slope_table_.back() = -inv(x_max);
  for (std::size_t k = grid_.size() - 1; k-- > 0;) {
    tail_table_[k] = tail_table_[k + 1] +
                     boost::math::quadrature::gauss<double, 10>::integrate(inv, grid_[k], grid_[k + 1]);
    slope_table_[k] = -inv(grid_[k]);
    if (!std::isfinite(tail_table_[k])) {
      throw Error(ErrorCode::TailDivergence, "tail integral is not finite near x = " + format_double(grid_[k]));
    }
  }
}

double KernelEvaluator::inv_phi(double x) const {
  if (power_) return std::pow(x, -alpha_);
  return 1.0 / model_.phi(x);
}

double KernelEvaluator::tail(double x) const {
  if (power_) return std::pow(x, 1.0 - alpha_) / (alpha_ - 1.0);
  if (!(x >= grid_.front() && x <= grid_.back())) return model_.tail(x);
  auto k = static_cast<std::size_t>((std::log(x) - log_lo_) / log_step_);
  k = std::min(k, grid_.size() - 2);
  while (k > 0 && grid_[k] > x) --k;
  while (k + 2 < grid_.size() && grid_[k + 1] < x) ++k;
  const double h = grid_[k + 1] - grid_[k];
  const double t = (x - grid_[k]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * tail_table_[k] + (t3 - 2 * t2 + t) * h * slope_table_[k] +
         (-2 * t3 + 3 * t2) * tail_table_[k + 1] + (t3 - t2) * h * slope_table_[k + 1];
}

KernelJet KernelEvaluator::jet(double x, int order) const {
  if (power_) return power_jet(x, alpha_, order);
  const double phi = model_.phi(x);
  const double dphi = order >= 1 ? model_.dphi(x) : 0.0;
  const double d2phi = order >= 2 ? model_.d2phi(x) : 0.0;
  return assemble_jet(x, phi, dphi, d2phi, tail(x), order);
}

}  // namespace knotenergy
