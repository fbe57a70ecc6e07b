#pragma once

#include <deque>
#include <string>
#include <vector>

#include "knotenergy/energy.hpp"
#include "knotenergy/geometry.hpp"
#include "knotenergy/phi_model.hpp"

namespace knotenergy {

struct FlowConfig {
  /// Initial and maximal step. 0 selects stable_step() of the initial curve.
  double dt0 = 0.0;
  int max_steps = 200;
  /// Stop when the L2 norm of the gradient, with translation and scaling removed, drops below this.
  double grad_tol = 1e-8;
  /// Write a snapshot every this many steps (0 disables snapshots).
  int snapshot_every = 10;
  int max_halvings = 8;
  std::size_t history = 16;
  EnergyOptions energy;
};

struct FlowState {
  ClosedCurve curve;
  int step_index = 0;
  EnergyReport energies;
  double dt = 0.0;
  /// Most recent accepted total energies, oldest first.
  std::deque<double> history;
  double gradient_norm = 0.0;
  /// Cap for step growth: config.dt0, or stable_step() of the initial curve.
  double max_dt = 0.0;
};

/// 1 / lambda, where lambda is the largest Rayleigh quotient of the second variation over
/// node-scale zigzag fields along the coordinate axes. Explicit Euler on the L2 gradient is
/// stable below 2 / lambda_max and the zigzag modes carry the largest eigenvalues (growing
/// like N^(alpha+1)). Needs the second kernel derivative.
double stable_step(const ClosedCurve& curve, const PhiModel& model, const EnergyOptions& options = {});

/// Starts a flow at `curve`: evaluates its energies and sets dt = config.dt0 (or stable_step()).
FlowState start_flow(const ClosedCurve& curve, const PhiModel& model, const FlowConfig& config);

/// One explicit Euler step against the nodal gradient of E1 + E2, followed by resampling,
/// rescaling to the initial length and recentering. The move is retried with half the step
/// while the total energy does not decrease. Returns the state unchanged except for
/// step_index when the gradient is below grad_tol.
/// Throws Stagnation after max_halvings rejections, FlowAbort when every retry lost embedding.
FlowState step(const FlowState& state, const PhiModel& model, const FlowConfig& config);

struct TraceRow {
  int step = 0;
  double e_total = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
  double residual = 0.0;
  double dt = 0.0;
};

struct FlowTrace {
  std::vector<TraceRow> rows;
  FlowState final_state;
  /// "grad_tol", "max_steps" or "stagnation".
  std::string termination;
  double initial_length = 0.0;
  double max_length_drift = 0.0;
};

/// Iterates step() until grad_tol or max_steps; a step that stagnates ends the run with
/// termination "stagnation". When `out_dir` is non-empty writes snapshot_%06d.json and energy.csv.
FlowTrace run_flow(const ClosedCurve& initial, const PhiModel& model, const FlowConfig& config,
                   const std::string& out_dir = {});

/// The energy.csv text for a trace.
std::string trace_csv(const FlowTrace& trace);

}  // namespace knotenergy
