#include "knotenergy/audit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "knotenergy/error.hpp"

namespace knotenergy {

namespace {

constexpr std::size_t kMaxWitnesses = 5;
constexpr int kInnerSamples = 16;

std::vector<double> log_space(double lo, double hi, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  const double a = std::log(lo), b = std::log(hi);
  for (int k = 0; k < count; ++k) out[static_cast<std::size_t>(k)] = std::exp(a + (b - a) * k / (count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

Witness witness(std::vector<std::pair<std::string, double>> at, double value) { return Witness{std::move(at), value}; }

ConditionResult make(std::string id, Verdict verdict, std::string note = {}, std::vector<Witness> witnesses = {}) {
  ConditionResult r;
  r.id = std::move(id);
  r.verdict = verdict;
  r.note = std::move(note);
  r.witnesses = std::move(witnesses);
  return r;
}

bool at_most(double a, double b, double slack) { return a <= b + slack * std::max(1.0, std::abs(b)); }

// Limit-type rule: the tracked values, ordered toward the limit, must not grow over the last three.
bool settles(const std::vector<double>& q, double slack) {
  const std::size_t n = q.size();
  if (n < 3) return false;
  return at_most(q[n - 2], q[n - 3], slack) && at_most(q[n - 1], q[n - 2], slack);
}

// Runs a check, mapping a failed tail integral to an indeterminate verdict.
ConditionResult guarded(const std::string& id, const std::function<ConditionResult()>& check) {
  try {
    return check();
  } catch (const Error& e) {
    return make(id, Verdict::Indeterminate, std::string("not evaluable: ") + e.what());
  }
}

ConditionResult derive(const std::string& id, const std::vector<const ConditionResult*>& sufficient,
                       bool extra_ok, const std::string& extra_note) {
  std::string missing;
  for (const auto* c : sufficient) {
    if (c->verdict != Verdict::Pass) missing += (missing.empty() ? "" : ", ") + c->id;
  }
  if (missing.empty() && extra_ok) {
    return make(id, Verdict::Pass, "implied by its sufficient conditions");
  }
  std::string note = "sufficient conditions not all confirmed";
  if (!missing.empty()) note += " (" + missing + ")";
  if (!extra_ok) note += "; " + extra_note;
  return make(id, Verdict::Indeterminate, note);
}

void add_derived(std::vector<ConditionResult>& out, bool density_known) {
  auto find = [&](const std::string& id) -> const ConditionResult* {
    for (const auto& c : out) {
      if (c.id == id) return &c;
    }
    return nullptr;
  };
  ConditionResult a3 = derive("A3", {find("A1"), find("A6"), find("A7a"), find("A7b"), find("A7c")}, density_known,
                              "density of smooth curves (A7d) is not numerically checkable");
  ConditionResult a4 = derive("A4", {find("A1"), find("A2"), find("A9"), find("A10")}, true, "");
  // Keep the report ordered by condition number.
  out.insert(out.begin() + 2, std::move(a3));
  out.insert(out.begin() + 3, std::move(a4));
}

std::vector<ConditionResult> power_law_audit(double alpha, double length, const AuditGrid& grid) {
  std::vector<ConditionResult> out;
  const double half = 0.5 * length;
  const double x_min = grid.x.front();
  const bool at_least_two = alpha >= 2.0;

  out.push_back(make("A1", Verdict::Pass, "x^alpha is increasing"));
  out.push_back(make("A2", Verdict::Pass, "T(x) = x^(1-alpha)/(alpha-1)",
                     {witness({{"x", x_min}}, std::pow(x_min, 1.0 - alpha) / (alpha - 1.0))}));
  {
    std::vector<Witness> w;
    for (double l : grid.lambdas) w.push_back(witness({{"lambda", l}}, std::pow(l, alpha)));
    out.push_back(make("A5a", Verdict::Pass, "Phi(lambda x)/Phi(x) = lambda^alpha", std::move(w)));
  }
  {
    const double value = (alpha - 2.0) / ((alpha - 1.0) * std::pow(half, alpha));
    out.push_back(make("A5b", at_least_two ? Verdict::Pass : Verdict::Fail,
                       "1/Phi + Lambda = (alpha-2)/((alpha-1) x^alpha)", {witness({{"x", half}}, value)}));
  }
  out.push_back(make("A6", at_least_two ? Verdict::Pass : Verdict::Fail, "Phi(x)/x^2 = x^(alpha-2)",
                     {witness({{"x", x_min}}, std::pow(x_min, alpha - 2.0))}));
  {
    const double y = half * half;
    const double curvature = 0.5 * alpha * (0.5 * alpha - 1.0) * std::pow(y, 0.5 * alpha - 2.0);
    out.push_back(make("A7a", at_least_two ? Verdict::Pass : Verdict::Fail, "Phi(sqrt y) = y^(alpha/2)",
                       {witness({{"y", y}}, curvature)}));
  }
  out.push_back(make("A7b", Verdict::Pass, "x Phi'/Phi = alpha", {witness({{"x", half}}, alpha)}));
  {
    std::vector<Witness> w;
    for (std::size_t k = grid.eps.size() - 3; k < grid.eps.size(); ++k) {
      const double f = grid.eps[k];
      w.push_back(witness({{"eps", f}}, std::pow(f, alpha - 1.0) / alpha));
    }
    out.push_back(make("A7c", Verdict::Pass, "chi(t) = t^(alpha-1), (1/eps) int_0^eps chi = eps^(alpha-1)/alpha",
                       std::move(w)));
  }
  {
    ConditionResult d = make("A7d", Verdict::Indeterminate, "density of smooth curves is not numerically checkable");
    d.checkable = false;
    out.push_back(std::move(d));
  }
  out.push_back(make("A8a", Verdict::Pass, "1/Phi(sqrt y) = y^(-alpha/2) is convex"));
  out.push_back(make("A8b", at_least_two ? Verdict::Pass : Verdict::Fail, "Phi'(x)/x = alpha x^(alpha-2)",
                     {witness({{"x", x_min}}, alpha * std::pow(x_min, alpha - 2.0))}));
  {
    std::vector<Witness> w;
    for (double l : grid.lambdas) {
      w.push_back(witness({{"lambda", l}}, alpha * std::pow(l, -alpha - 2.0) / (2.0 * (alpha - 1.0))));
    }
    out.push_back(make("A9", Verdict::Pass, "the tracked product is constant in eps", std::move(w)));
  }
  {
    std::vector<Witness> w;
    for (double l : grid.lambdas) w.push_back(witness({{"lambda", l}}, std::pow(l, -alpha) / (alpha - 1.0)));
    out.push_back(make("A10", Verdict::Pass, "the tracked product is constant in eps", std::move(w)));
  }
  add_derived(out, at_least_two && alpha < 3.0);
  if (!(at_least_two && alpha < 3.0)) {
    out[2].verdict = Verdict::Indeterminate;
    out[2].note = "the power-law corollary covers alpha in [2, 3) only";
  } else {
    out[2].note = "power-law corollary, alpha in [2, 3)";
  }
  return out;
}

std::vector<ConditionResult> numeric_audit(const PhiModel& model, double length, const AuditGrid& grid,
                                           double slack) {
  std::vector<ConditionResult> out;
  const auto& xs = grid.x;
  const double half = 0.5 * length;
  auto phi = [&](double x) { return model.phi(x); };

  out.push_back(guarded("A1", [&] {
    std::vector<Witness> bad;
    for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
      const double a = phi(xs[k]), b = phi(xs[k + 1]);
      if (!at_most(a, b, slack) && bad.size() < kMaxWitnesses) {
        bad.push_back(witness({{"x", xs[k]}, {"x_next", xs[k + 1]}}, b - a));
      }
    }
    if (!bad.empty()) return make("A1", Verdict::Fail, "Phi decreases on the grid", std::move(bad));
    return make("A1", Verdict::Pass, "nondecreasing on the grid");
  }));

  out.push_back([&] {
    try {
      const double t = model.tail(xs.front());
      if (std::isfinite(t)) return make("A2", Verdict::Pass, "", {witness({{"x", xs.front()}}, t)});
      return make("A2", Verdict::Fail, "tail integral is not finite",
                  {witness({{"x", xs.front()}}, std::numeric_limits<double>::infinity())});
    } catch (const Error& e) {
      return make("A2", Verdict::Fail, e.what(), {witness({{"x", xs.front()}}, std::numeric_limits<double>::infinity())});
    }
  }());

  out.push_back(guarded("A5a", [&] {
    std::vector<Witness> w;
    bool ok = true;
    for (double l : grid.lambdas) {
      double best = std::numeric_limits<double>::infinity();
      double at = xs.front();
      for (double x : xs) {
        const double r = phi(l * x) / phi(x);
        if (r < best) {
          best = r;
          at = x;
        }
      }
      ok = ok && best > 0.0;
      w.push_back(witness({{"lambda", l}, {"x", at}}, best));
    }
    return make("A5a", ok ? Verdict::Pass : Verdict::Fail, "minimum of Phi(lambda x)/Phi(x) per lambda", std::move(w));
  }));

  out.push_back(guarded("A5b", [&] {
    double best = std::numeric_limits<double>::infinity();
    double at = xs.front();
    for (double x : xs) {
      const double v = 1.0 / phi(x) + model.lambda(x);
      if (v < best) {
        best = v;
        at = x;
      }
    }
    return make("A5b", best >= -slack ? Verdict::Pass : Verdict::Fail, "minimum of 1/Phi + Lambda",
                {witness({{"x", at}}, best)});
  }));

  // Limit as x -> 0 of a ratio: values at the three smallest grid points, in the order x decreases.
  auto toward_zero = [&](const std::string& id, const std::function<double(double)>& f, const std::string& what) {
    std::vector<double> q;
    std::vector<Witness> w;
    for (std::size_t k = 3; k-- > 0;) {
      q.push_back(f(xs[k]));
      w.push_back(witness({{"x", xs[k]}}, q.back()));
    }
    return make(id, settles(q, slack) ? Verdict::Pass : Verdict::Indeterminate, what + " as x -> 0", std::move(w));
  };

  out.push_back(guarded("A6", [&] { return toward_zero("A6", [&](double x) { return phi(x) / (x * x); }, "Phi(x)/x^2"); }));

  auto convex_in_square = [&](const std::string& id, const std::function<double(double)>& g, const std::string& what) {
    std::vector<Witness> bad;
    double prev_slope = 0.0;
    for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
      const double y0 = xs[k] * xs[k], y1 = xs[k + 1] * xs[k + 1];
      const double slope = (g(xs[k + 1]) - g(xs[k])) / (y1 - y0);
      if (k > 0 && !at_most(prev_slope, slope, slack) && bad.size() < kMaxWitnesses) {
        bad.push_back(witness({{"y", y0}}, slope - prev_slope));
      }
      prev_slope = slope;
    }
    if (!bad.empty()) return make(id, Verdict::Fail, what + " has decreasing slopes", std::move(bad));
    return make(id, Verdict::Pass, what + " has nondecreasing slopes on the squared grid");
  };

  out.push_back(guarded("A7a", [&] { return convex_in_square("A7a", phi, "Phi(sqrt y)"); }));

  out.push_back(guarded("A7b", [&] {
    if (!model.has_dphi()) return make("A7b", Verdict::Indeterminate, "kernel has no derivative data");
    double best = std::numeric_limits<double>::infinity();
    double at = xs.front();
    for (double x : xs) {
      const double v = x * model.dphi(x) / phi(x);
      if (v < best) {
        best = v;
        at = x;
      }
    }
    return make("A7b", best > slack ? Verdict::Pass : Verdict::Fail, "infimum of x Phi'/Phi",
                {witness({{"x", at}}, best)});
  }));

  out.push_back(guarded("A7c", [&] {
    auto chi = [&](double t) {
      double best = 0.0;
      for (double x : xs) best = std::max(best, phi(x) / (t * phi(x / t)));
      return best;
    };
    std::vector<double> q;
    std::vector<Witness> w;
    for (double eps : grid.eps) {
      // Trapezoid on the t grid up to eps; chi is taken constant below the first sample.
      std::vector<double> ts;
      for (double t : grid.t) {
        if (t < eps) ts.push_back(t);
      }
      ts.push_back(eps);
      double integral = ts.front() * chi(ts.front());
      double prev = chi(ts.front());
      for (std::size_t k = 1; k < ts.size(); ++k) {
        const double c = chi(ts[k]);
        integral += 0.5 * (prev + c) * (ts[k] - ts[k - 1]);
        prev = c;
      }
      q.push_back(integral / eps);
      w.push_back(witness({{"eps", eps}}, q.back()));
    }
    if (w.size() > 3) w.erase(w.begin(), w.end() - 3);
    return make("A7c", settles(q, slack) ? Verdict::Pass : Verdict::Indeterminate,
                "(1/eps) int_0^eps chi(t) dt along the eps sequence", std::move(w));
  }));

  {
    ConditionResult d = make("A7d", Verdict::Indeterminate, "density of smooth curves is not numerically checkable");
    d.checkable = false;
    out.push_back(std::move(d));
  }

  out.push_back(guarded("A8a", [&] { return convex_in_square("A8a", [&](double x) { return 1.0 / phi(x); }, "1/Phi(sqrt y)"); }));

  out.push_back(guarded("A8b", [&] {
    if (!model.has_dphi()) return make("A8b", Verdict::Indeterminate, "kernel has no derivative data");
    return toward_zero("A8b", [&](double x) { return model.dphi(x) / x; }, "Phi'(x)/x");
  }));

  auto sup_phi_below = [&](double eps) {
    double best = phi(eps);
    for (double x : xs) {
      if (x <= eps) best = std::max(best, phi(x));
    }
    return best;
  };

  auto limsup = [&](const std::string& id, const std::function<double(double, double)>& tracked,
                    const std::string& what) {
    std::vector<Witness> w;
    bool ok = true;
    for (double l : grid.lambdas) {
      std::vector<double> q;
      for (double f : grid.eps) q.push_back(tracked(l, f * half));
      ok = ok && settles(q, slack);
      w.push_back(witness({{"lambda", l}, {"eps", grid.eps.back() * half}}, q.back()));
    }
    return make(id, ok ? Verdict::Pass : Verdict::Indeterminate, what, std::move(w));
  };

  out.push_back(guarded("A9", [&] {
    return limsup("A9", [&](double l, double eps) {
      double best = 0.0;
      for (double y : log_space(l * l * eps * eps, eps * eps, kInnerSamples)) {
        best = std::max(best, std::abs(model.dlambda_sq(y)));
      }
      return eps * eps * best * sup_phi_below(eps);
    }, "eps^2 sup|d/dx Lambda(sqrt x)| sup Phi along the eps sequence");
  }));

  out.push_back(guarded("A10", [&] {
    return limsup("A10", [&](double l, double eps) {
      double best = 0.0;
      for (double y : log_space(l * eps, eps, kInnerSamples)) best = std::max(best, std::abs(model.lambda(y)));
      return sup_phi_below(eps) * best;
    }, "sup Phi sup|Lambda| along the eps sequence");
  }));

  add_derived(out, false);
  return out;
}

}  // namespace

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    case Verdict::Indeterminate:
      return "indeterminate";
  }
  return "indeterminate";
}

AuditGrid AuditGrid::standard(double length) {
  AuditGrid grid;
  const double half = 0.5 * length;
  grid.x = log_space(1e-6 * half, half, 96);
  grid.lambdas = {0.1, 0.25, 0.5, 0.75, 0.9};
  grid.t = log_space(1e-6, 1.0, 64);
  for (int k = 1; k <= 12; ++k) grid.eps.push_back(std::ldexp(1.0, -k));
  return grid;
}

const ConditionResult& AuditReport::condition(const std::string& id) const {
  for (const auto& c : conditions) {
    if (c.id == id) return c;
  }
  throw Error(ErrorCode::InvalidArgument, "audit report has no condition " + id);
}

bool AuditReport::all_checkable_pass() const {
  return std::all_of(conditions.begin(), conditions.end(),
                     [](const ConditionResult& c) { return !c.checkable || c.verdict == Verdict::Pass; });
}

bool AuditReport::basic_assumptions_hold() const {
  for (const char* id : {"A1", "A2", "A3", "A4", "A5a", "A5b"}) {
    if (condition(id).verdict != Verdict::Pass) return false;
  }
  return true;
}

AuditReport audit(const PhiModel& model, double length, const AuditGrid& grid) {
  if (!(length > 0.0) || !std::isfinite(length)) throw Error(ErrorCode::InvalidArgument, "audit length must be positive");
  if (grid.x.size() < 8) {
    throw Error(ErrorCode::InsufficientGrid,
                "audit grid has " + std::to_string(grid.x.size()) + " x samples, at least 8 are needed");
  }
  for (std::size_t k = 0; k < grid.x.size(); ++k) {
    if (!(grid.x[k] > 0.0) || grid.x[k] > 0.5 * length * (1.0 + 1e-12) || (k > 0 && !(grid.x[k] > grid.x[k - 1]))) {
      throw Error(ErrorCode::InvalidArgument, "audit x samples must increase within (0, L/2]");
    }
  }
  if (grid.lambdas.empty() || grid.t.empty() || grid.eps.size() < 3) {
    throw Error(ErrorCode::InsufficientGrid, "audit grid needs lambda and t samples and at least 3 eps values");
  }
  AuditReport report;
  report.model = model.name();
  report.length = length;
  report.grid = grid;
  if (auto a = model.alpha()) {
    report.conditions = power_law_audit(*a, length, grid);
  } else {
    report.conditions = numeric_audit(model, length, grid, report.slack);
  }
  return report;
}

AuditReport audit(const PhiModel& model, double length) { return audit(model, length, AuditGrid::standard(length)); }

}  // namespace knotenergy
