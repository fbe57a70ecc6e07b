#include "knotenergy_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "knotenergy/audit.hpp"
#include "knotenergy/curves.hpp"
#include "knotenergy/energy.hpp"
#include "knotenergy/error.hpp"
#include "knotenergy/flow.hpp"
#include "knotenergy/io.hpp"
#include "knotenergy/variation.hpp"

namespace knotenergy::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ordered_json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round_significant(v);
}

struct KernelFlags {
  std::optional<double> alpha;
  std::string phi_csv;
};

struct EnergyFlags {
  std::string quadrature = "zeta";
  unsigned threads = 0;

  EnergyOptions options() const {
    EnergyOptions o;
    o.scheme = quadrature == "skip" ? QuadratureScheme::SkipDiagonal : QuadratureScheme::ZetaCorrected;
    o.threads = threads;
    return o;
  }
};

struct Flags {
  KernelFlags kernel;
  EnergyFlags energy;
  std::string curve;
  Index n = 0;
  std::string which = "total";
  double length = kTwoPi;
  bool no_timing = false;
  std::string field = "builtin:random";
  std::string psi;
  std::uint64_t seed = 1;
  int steps = 200;
  std::string out_dir;
  double dt = 0.0;
  double grad_tol = 1e-8;
  int snapshot_every = 10;
};

void add_kernel(CLI::App* cmd, KernelFlags& k, bool allow_csv) {
  auto* a = cmd->add_option("--alpha", k.alpha, "Power-law exponent, Phi(x) = x^alpha");
  if (allow_csv) {
    auto* p = cmd->add_option("--phi", k.phi_csv, "CSV table of x,phi for a tabulated kernel")->check(CLI::ExistingFile);
    a->excludes(p);
  } else {
    a->required();
  }
}

void add_energy(CLI::App* cmd, EnergyFlags& e) {
  cmd->add_option("--quadrature", e.quadrature, "Diagonal treatment")
      ->check(CLI::IsMember({"zeta", "skip"}))
      ->capture_default_str();
  cmd->add_option("--threads", e.threads, "Worker threads for the double sums (0: all cores)");
}

void add_curve(CLI::App* cmd, Flags& f) {
  cmd->add_option("--curve", f.curve, "Curve JSON file or builtin:NAME (circle, ellipse[:A:B], trefoil, perturbed[:K:EPS])")
      ->required();
  cmd->add_option("--n", f.n, "Number of arclength nodes")->required()->check(CLI::Range(Index{8}, Index{1} << 20));
}

PhiModel make_model(const KernelFlags& k) {
  if (k.alpha) return PhiModel::power_law(*k.alpha);
  if (!k.phi_csv.empty()) return read_phi_csv(k.phi_csv);
  throw Error(ErrorCode::InvalidArgument, "one of --alpha or --phi is required");
}

ClosedCurve make_curve(const std::string& spec, Index n) {
  constexpr std::string_view prefix = "builtin:";
  NodeMatrix points;
  if (spec.rfind(prefix, 0) == 0) {
    points = builtin_curve(std::string_view(spec).substr(prefix.size()), std::max<Index>(2048, 2 * n));
  } else {
    points = read_curve_file(spec).points;
  }
  return resample_arclength(points, n);
}

std::string with_which(const std::string& report_json, const std::string& which, double value) {
  auto j = ordered_json::parse(report_json);
  j["which"] = which;
  j["value"] = number(value);
  return j.dump(2) + "\n";
}

Which parse_which(const std::string& s) {
  if (s == "m1") return Which::M1;
  if (s == "m2") return Which::M2;
  return Which::Total;
}

double selected(const EnergyReport& r, Which w) {
  switch (w) {
    case Which::M1: return r.e1;
    case Which::M2: return r.e2;
    case Which::Total: break;
  }
  return r.e_total;
}

int cmd_energy(const Flags& f, std::ostream& out, bool decompose) {
  const PhiModel model = make_model(f.kernel);
  const ClosedCurve curve = make_curve(f.curve, f.n);
  const EnergyOptions options = f.energy.options();
  const Which which = decompose ? Which::Total : parse_which(f.which);

  EnergyReport report = check_decomposition(curve, model, options);
  const double value = selected(report, which);
  report.divergence_suspected = divergence_suspected(curve, model, which, value, options);
  std::string text = energy_report_json(report, !f.no_timing);
  if (decompose) {
    auto j = ordered_json::parse(text);
    j["relative_residual"] = number(std::abs(report.residual) / std::max(1.0, std::abs(report.e_total)));
    out << j.dump(2) << "\n";
  } else {
    out << with_which(text, f.which, value);
  }
  return kExitOk;
}

int cmd_circle_oracle(const Flags& f, std::ostream& out) {
  if (!(f.length > 0.0)) throw Error(ErrorCode::InvalidArgument, "--length must be positive");
  const CircleEnergies c = circle_closed_form(*f.kernel.alpha, f.length);
  ordered_json j;
  j["format_version"] = kFormatVersion;
  j["alpha"] = number(*f.kernel.alpha);
  j["length"] = number(f.length);
  j["e_total"] = number(c.e_total);
  j["e1"] = number(c.e1);
  j["e2"] = number(c.e2);
  j["constant_term"] = number(decomposition_constant(PhiModel::power_law(*f.kernel.alpha), f.length));
  out << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_audit(const Flags& f, std::ostream& out) {
  if (!(f.length > 0.0)) throw Error(ErrorCode::InvalidArgument, "--length must be positive");
  const PhiModel model = make_model(f.kernel);
  out << audit_report_json(audit(model, f.length));
  return kExitOk;
}

// Test fields for variation-check, all O(1) in size.
NodeMatrix make_field(const std::string& spec, const ClosedCurve& curve, std::uint64_t seed) {
  constexpr std::string_view prefix = "builtin:";
  if (spec.rfind(prefix, 0) != 0) {
    throw Error(ErrorCode::InvalidArgument, "--field: expected builtin:(const|scale|radial:K|random), got '" + spec + "'");
  }
  const std::string name = spec.substr(prefix.size());
  const Index dim = curve.dim();
  const Index count = curve.size();
  NodeMatrix phi(dim, count);
  if (name == "const") {
    Eigen::VectorXd c(dim);
    for (Index d = 0; d < dim; ++d) c[d] = 1.0 / static_cast<double>(d + 1);
    phi.colwise() = c;
  } else if (name == "scale") {
    phi = curve.points();
  } else if (name.rfind("radial:", 0) == 0) {
    int k = 0;
    std::istringstream in(name.substr(7));
    if (!(in >> k) || !in.eof() || k < 0 || 2 * k >= count) {
      throw Error(ErrorCode::InvalidArgument, "--field: radial mode must be an integer in [0, N/2), got '" + name + "'");
    }
    const Eigen::VectorXd c = curve.centroid();
    for (Index i = 0; i < count; ++i) {
      const Eigen::VectorXd r = curve.point(i) - c;
      const double norm = r.norm();
      if (norm == 0.0) throw Error(ErrorCode::DegenerateInput, "--field: radial field undefined at the centroid");
      phi.col(i) = std::cos(kTwoPi * k * static_cast<double>(i) / static_cast<double>(count)) * r / norm;
    }
  } else if (name == "random") {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    phi.setZero();
    for (int m = 1; m <= 4; ++m) {
      Eigen::VectorXd a(dim), b(dim);
      for (Index d = 0; d < dim; ++d) {
        a[d] = normal(rng);
        b[d] = normal(rng);
      }
      for (Index i = 0; i < count; ++i) {
        const double t = kTwoPi * m * static_cast<double>(i) / static_cast<double>(count);
        phi.col(i) += (std::cos(t) * a + std::sin(t) * b) / static_cast<double>(m * m);
      }
    }
  } else {
    throw Error(ErrorCode::InvalidArgument, "--field: unknown builtin field '" + name + "'");
  }
  return phi;
}

ordered_json compare(double analytic, const FdEstimate& fd) {
  const double abs_error = std::abs(analytic - fd.value);
  const double scale = std::max(std::abs(analytic), std::abs(fd.value));
  ordered_json j;
  j["analytic"] = number(analytic);
  j["fd"] = number(fd.value);
  j["abs_error"] = number(abs_error);
  j["rel_error"] = scale > 0.0 ? number(abs_error / scale) : ordered_json(0.0);
  j["order_estimate"] = number(fd.order_estimate);
  return j;
}

int cmd_variation(const Flags& f, std::ostream& out) {
  const PhiModel model = make_model(f.kernel);
  const ClosedCurve curve = make_curve(f.curve, f.n);
  const NodeMatrix phi = make_field(f.field, curve, f.seed);
  std::optional<NodeMatrix> psi;
  if (!f.psi.empty()) psi = make_field(f.psi, curve, f.seed + 1);
  const EnergyOptions options = f.energy.options();
  const double step = 1e-4 * curve.diameter();

  const VariationField vphi = VariationField::on(curve, phi);
  ordered_json j;
  j["format_version"] = kFormatVersion;
  j["field"] = f.field;
  j["N"] = curve.size();
  j.update(compare(first_variation(Part::Sum, curve, vphi, model, options),
                   fd_first_variation(curve, phi, model, FdTarget::Sum, step, options)));
  if (f.field == "builtin:scale" && model.alpha()) {
    const Energies e = energies(curve, model, options);
    j["homogeneity_value"] = number((2.0 - *model.alpha()) * (e.m1 + e.m2));
  }
  if (psi) {
    const VariationField vpsi = VariationField::on(curve, *psi);
    const double ab = second_variation(Part::Sum, curve, vphi, vpsi, model, options);
    const double ba = second_variation(Part::Sum, curve, vpsi, vphi, model, options);
    ordered_json second = compare(ab, fd_second_variation(curve, phi, *psi, model, FdTarget::Sum, step, options));
    second["psi"] = f.psi;
    second["symmetry_error"] = number(std::abs(ab - ba));
    j["second"] = std::move(second);
  }
  out << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_flow(const Flags& f, std::ostream& out) {
  if (f.dt < 0.0) throw Error(ErrorCode::InvalidArgument, "--dt must be nonnegative");
  const PhiModel model = make_model(f.kernel);
  const ClosedCurve curve = make_curve(f.curve, f.n);
  FlowConfig config;
  config.dt0 = f.dt;
  config.max_steps = f.steps;
  config.grad_tol = f.grad_tol;
  config.snapshot_every = f.snapshot_every;
  config.energy = f.energy.options();

  const FlowTrace trace = run_flow(curve, model, config, f.out_dir);
  const auto& first = trace.rows.front();
  const auto& last = trace.rows.back();
  ordered_json j;
  j["format_version"] = kFormatVersion;
  j["N"] = curve.size();
  j["steps"] = last.step;
  j["termination"] = trace.termination;
  j["dt0"] = number(first.dt);
  j["e_total_initial"] = number(first.e_total);
  j["e_total_final"] = number(last.e_total);
  j["e1_final"] = number(last.e1);
  j["e2_final"] = number(last.e2);
  j["residual_final"] = number(last.residual);
  j["gradient_norm_final"] = number(trace.final_state.gradient_norm);
  j["max_length_drift"] = number(trace.max_length_drift);
  if (!f.out_dir.empty()) j["out"] = f.out_dir;
  out << j.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generalized O'Hara knot energies of discretized closed curves", "knotenergy"};
  app.require_subcommand(1, 1);
  Flags f;

  auto* energy = app.add_subcommand("energy", "Energy report for one curve");
  add_curve(energy, f);
  add_kernel(energy, f.kernel, true);
  add_energy(energy, f.energy);
  energy->add_option("--which", f.which, "Energy reported as 'value'")
      ->check(CLI::IsMember({"total", "m1", "m2"}))
      ->capture_default_str();
  energy->add_flag("--no-timing", f.no_timing, "Omit runtime_ms so output is reproducible");

  auto* decompose = app.add_subcommand("decompose", "E, E1, E2, the constant term and the decomposition residual");
  add_curve(decompose, f);
  add_kernel(decompose, f.kernel, true);
  add_energy(decompose, f.energy);
  decompose->add_flag("--no-timing", f.no_timing, "Omit runtime_ms so output is reproducible");

  auto* circle = app.add_subcommand("circle-oracle", "Closed-form energies of a round circle");
  add_kernel(circle, f.kernel, false);
  circle->add_option("--length", f.length, "Circle length")->capture_default_str();

  auto* audit_cmd = app.add_subcommand("audit-phi", "Check a kernel against the structural conditions");
  add_kernel(audit_cmd, f.kernel, true);
  audit_cmd->add_option("--length", f.length, "Curve length the conditions refer to")->capture_default_str();

  auto* variation = app.add_subcommand("variation-check", "Analytic first (and second) variation against finite differences");
  add_curve(variation, f);
  add_kernel(variation, f.kernel, true);
  add_energy(variation, f.energy);
  variation->add_option("--field", f.field, "builtin:const|scale|radial:K|random")->capture_default_str();
  variation->add_option("--psi", f.psi, "Second field; adds a second-variation comparison");
  variation->add_option("--seed", f.seed, "Seed of the random fields")->capture_default_str();

  auto* flow = app.add_subcommand("flow", "L2 gradient descent at fixed length");
  add_curve(flow, f);
  add_kernel(flow, f.kernel, true);
  add_energy(flow, f.energy);
  flow->add_option("--steps", f.steps, "Maximum number of steps")->check(CLI::NonNegativeNumber)->capture_default_str();
  flow->add_option("--out", f.out_dir, "Directory for snapshots and energy.csv");
  flow->add_option("--dt", f.dt, "Initial and maximal step (0: estimated stable step)")->capture_default_str();
  flow->add_option("--grad-tol", f.grad_tol, "Stop below this gradient norm")->capture_default_str();
  flow->add_option("--snapshot-every", f.snapshot_every, "Snapshot period in steps (0: first and last only)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (energy->parsed()) return cmd_energy(f, out, false);
    if (decompose->parsed()) return cmd_energy(f, out, true);
    if (circle->parsed()) return cmd_circle_oracle(f, out);
    if (audit_cmd->parsed()) return cmd_audit(f, out);
    if (variation->parsed()) return cmd_variation(f, out);
    if (flow->parsed()) return cmd_flow(f, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_validation_error(e.code()) ? kExitValidation : kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitValidation;
}

}  // namespace knotenergy::cli
