#include "knotenergy/flow.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "knotenergy/audit.hpp"
#include "knotenergy/error.hpp"
#include "knotenergy/io.hpp"
#include "knotenergy/variation.hpp"

namespace knotenergy {

namespace {

EnergyReport evaluate(const ClosedCurve& curve, const PhiModel& model, const EnergyOptions& options,
                      bool assumptions_verified) {
  EnergyReport r;
  const Energies e = energies(curve, model, options);
  r.e_total = e.total;
  r.e1 = e.m1;
  r.e2 = e.m2;
  r.constant_term = decomposition_constant(model, curve.total_length());
  r.residual = e.total - (e.m1 + e.m2 + r.constant_term);
  r.n = curve.size();
  r.model = model.name();
  r.alpha = model.alpha();
  r.scheme = options.scheme;
  r.assumptions_verified = assumptions_verified;
  return r;
}

// Removes the translation and scaling components, which the flow undoes by recentering and rescaling.
void project_rigid(NodeMatrix& g, const ClosedCurve& curve) {
  const Eigen::VectorXd mean = g.rowwise().mean();
  g.colwise() -= mean;
  const NodeMatrix radial = curve.points().colwise() - curve.centroid();
  const double norm2 = radial.squaredNorm();
  if (norm2 > 0.0) g -= ((g.cwiseProduct(radial)).sum() / norm2) * radial;
}

ClosedCurve normalize(const NodeMatrix& moved, Index count, double length, const Eigen::VectorXd& center) {
  const ClosedCurve c = resample_arclength(moved, count);
  const double scale = length / c.total_length();
  return c.similarity(scale, center - scale * c.centroid());
}

std::string snapshot_name(int step) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snapshot_%06d.json", step);
  return buf;
}

}  // namespace

double stable_step(const ClosedCurve& curve, const PhiModel& model, const EnergyOptions& options) {
  const double cell = curve.total_length() / static_cast<double>(curve.size());
  double lambda = 0.0;
  for (Index axis = 0; axis < curve.dim(); ++axis) {
    NodeMatrix zig = NodeMatrix::Zero(curve.dim(), curve.size());
    for (Index k = 0; k < curve.size(); ++k) zig(axis, k) = (k % 2 == 0) ? 1.0 : -1.0;
    const double norm2 = zig.squaredNorm() * cell;
    const VariationField field = VariationField::on(curve, std::move(zig));
    lambda = std::max(lambda, second_variation(Part::Sum, curve, field, field, model, options) / norm2);
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::NumericFailure, "cannot estimate a stable flow step; pass dt0 explicitly");
  }
  return 1.0 / lambda;
}

FlowState start_flow(const ClosedCurve& curve, const PhiModel& model, const FlowConfig& config) {
  if (!(config.dt0 >= 0.0) || !std::isfinite(config.dt0)) {
    throw Error(ErrorCode::InvalidArgument, "flow dt0 must be nonnegative (0 selects a stable step)");
  }
  if (config.max_steps < 0) throw Error(ErrorCode::InvalidArgument, "flow max_steps must be nonnegative");
  if (config.max_halvings < 1) throw Error(ErrorCode::InvalidArgument, "flow max_halvings must be positive");
  const bool verified = audit(model, curve.total_length()).basic_assumptions_hold();
  const double dt0 = config.dt0 > 0.0 ? config.dt0 : stable_step(curve, model, config.energy);
  FlowState state{curve, 0, evaluate(curve, model, config.energy, verified), dt0, {}, 0.0, dt0};
  state.history.push_back(state.energies.e_total);
  return state;
}

FlowState step(const FlowState& state, const PhiModel& model, const FlowConfig& config) {
  const ClosedCurve& curve = state.curve;
  NodeMatrix g = assemble_gradient(curve, model, Part::Sum, config.energy);
  project_rigid(g, curve);
  const double cell = curve.total_length() / static_cast<double>(curve.size());

  FlowState next = state;
  next.step_index = state.step_index + 1;
  next.gradient_norm = std::sqrt(g.squaredNorm() * cell);
  if (next.gradient_norm <= config.grad_tol) return next;

  const Eigen::VectorXd center = curve.centroid();
  double dt = state.dt;
  int lost = 0;
  for (int attempt = 0; attempt < config.max_halvings; ++attempt, dt *= 0.5) {
    try {
      ClosedCurve candidate = normalize(curve.points() - dt * g, curve.size(), curve.total_length(), center);
      EnergyReport report = evaluate(candidate, model, config.energy, state.energies.assumptions_verified);
      if (std::isfinite(report.e_total) && report.e_total < state.energies.e_total) {
        next.curve = std::move(candidate);
        next.energies = std::move(report);
        next.dt = std::min(2.0 * dt, state.max_dt);
        next.history.push_back(next.energies.e_total);
        while (next.history.size() > config.history) next.history.pop_front();
        return next;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateInput && e.code() != ErrorCode::NumericFailure) throw;
      ++lost;
    }
  }
  if (lost == config.max_halvings) {
    throw Error(ErrorCode::FlowAbort, "every trial step at step " + std::to_string(next.step_index) +
                                          " lost embedding");
  }
  throw Error(ErrorCode::Stagnation, "no energy decrease after " + std::to_string(config.max_halvings) +
                                         " step halvings at step " + std::to_string(next.step_index));
}

FlowTrace run_flow(const ClosedCurve& initial, const PhiModel& model, const FlowConfig& config,
                   const std::string& out_dir) {
  FlowState state = start_flow(initial, model, config);
  FlowTrace trace{{}, state, "max_steps", initial.total_length(), 0.0};
  auto record = [&](const FlowState& s) {
    trace.rows.push_back(TraceRow{s.step_index, s.energies.e_total, s.energies.e1, s.energies.e2,
                                  s.energies.residual, s.dt});
    const double drift = std::abs(s.curve.total_length() - trace.initial_length) / trace.initial_length;
    trace.max_length_drift = std::max(trace.max_length_drift, drift);
  };
  const bool write = !out_dir.empty();
  if (write) std::filesystem::create_directories(out_dir);
  auto snapshot = [&](const FlowState& s) {
    if (write) {
      write_text_file((std::filesystem::path(out_dir) / snapshot_name(s.step_index)).string(),
                      curve_json(s.curve, "flow step " + std::to_string(s.step_index)));
    }
  };

  record(state);
  snapshot(state);
  while (state.step_index < config.max_steps) {
    try {
      state = step(state, model, config);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Stagnation) throw;
      trace.termination = "stagnation";
      break;
    }
    record(state);
    if (state.gradient_norm <= config.grad_tol) {
      trace.termination = "grad_tol";
      break;
    }
    if (config.snapshot_every > 0 && state.step_index % config.snapshot_every == 0) snapshot(state);
  }
  if (config.snapshot_every <= 0 || state.step_index % config.snapshot_every != 0 || trace.termination == "grad_tol") {
    snapshot(state);
  }
  trace.final_state = state;
  if (write) write_text_file((std::filesystem::path(out_dir) / "energy.csv").string(), trace_csv(trace));
  return trace;
}

std::string trace_csv(const FlowTrace& trace) {
  std::ostringstream out;
  out << "step,e_total,e1,e2,residual,dt\n";
  char buf[256];
  for (const auto& r : trace.rows) {
    std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,%.12g,%.12g,%.12g\n", r.step, r.e_total, r.e1, r.e2, r.residual,
                  r.dt);
    out << buf;
  }
  return out.str();
}

}  // namespace knotenergy
