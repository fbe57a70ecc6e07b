#pragma once

#include "knotenergy/energy.hpp"
#include "knotenergy/geometry.hpp"
#include "knotenergy/phi_model.hpp"

namespace knotenergy {

/// Geometry of one off-diagonal cell (i, k): point 1 is node i, point 2 is node k and
/// differences are taken as (value at 1) - (value at 2).
struct PairFrame {
  Index i = 0;
  Index k = 0;
  Vec delta;
  double chord = 0.0;
  /// Signed parameter difference s_i - s_k wrapped into (-L/2, L/2].
  double ds = 0.0;
  Vec u;
  /// R_1 f = sign(ds) u.
  Vec r1_direction;
  Vec tau1;
  Vec tau2;
  KernelJet jet;
};

/// Values and arclength derivatives of a field at the two nodes of a cell.
struct PairField {
  Vec v1;
  Vec v2;
  Vec d1;
  Vec d2;
};

/// `order` selects the kernel derivatives evaluated (see KernelJet). Throws DiagonalSingularity for i = k.
PairFrame pair_frame(const ClosedCurve& curve, Index i, Index k, const PhiModel& model, int order = 2);
PairFrame pair_frame(const ClosedCurve& curve, Index i, Index k, const KernelEvaluator& kernel, int order);

/// The curve itself as a field: values f, derivatives tau.
PairField curve_pair(const ClosedCurve& curve, Index i, Index k);
PairField field_pair(const VariationField& field, Index i, Index k);

/// Q_{j,i} v for j, i in {1, 2}.
Vec q_op(int j, int i, const PairFrame& frame, const PairField& v);
Vec r1_op(const PairFrame& frame, const PairField& v);
Vec r2_op(const PairField& v);
double s_op(int j, int i, const PairFrame& frame, const PairField& v, const PairField& w);

/// M_j = Q_{j,1} f . Q_{j,2} f / Phi_j(chord). Frame needs order >= 0.
double m_via_operators(int j, const PairFrame& frame, const PairField& f);

/// First-variation density of M_j ds1 ds2 along phi. Frame needs order >= 1.
double g_integrand(int j, const PairFrame& frame, const PairField& f, const PairField& phi);

/// Second-variation density of M_j ds1 ds2 along (phi, psi); symmetric. Frame needs order 2.
double h_integrand(int j, const PairFrame& frame, const PairField& f, const PairField& phi, const PairField& psi);

enum class Part { M1, M2, Sum };

/// Off-diagonal double sums of g_integrand / h_integrand with the energy quadrature weights.
/// These are the exact directional derivatives of the discrete energies E1, E2 (Sum: E1 + E2).
/// Throws DimensionMismatch when the fields do not live on the curve's grid.
double first_variation(Part part, const ClosedCurve& curve, const VariationField& phi, const PhiModel& model,
                       const EnergyOptions& options = {});
double second_variation(Part part, const ClosedCurve& curve, const VariationField& phi, const VariationField& psi,
                        const PhiModel& model, const EnergyOptions& options = {});

/// Nodal gradient g of the discrete E1 + E2 (or one part) with
/// sum_k g_k . phi_k * L/N = first_variation(part, curve, phi).
NodeMatrix assemble_gradient(const ClosedCurve& curve, const PhiModel& model, Part part = Part::Sum,
                             const EnergyOptions& options = {});

/// Energy functional differentiated by the finite-difference oracles.
enum class FdTarget { Total, M1, M2, Sum };

struct FdEstimate {
  /// Richardson extrapolation of the step-h and step-h/2 differences.
  double value = 0.0;
  double at_step = 0.0;
  double at_half_step = 0.0;
  /// Observed order from the steps 2h, h, h/2 (NaN when the differences are at roundoff level).
  double order_estimate = 0.0;
};

/// Central differences of the energy of the perturbed polygon, re-splined on the same
/// parameter grid (arclength, tangents and measure are recomputed from the perturbed nodes).
/// `step` is absolute; a common choice is 1e-4 * diameter. Throws StepTooLarge when a
/// perturbed polygon loses embedding.
FdEstimate fd_first_variation(const ClosedCurve& curve, const NodeMatrix& phi, const PhiModel& model, FdTarget target,
                              double step, const EnergyOptions& options = {});

/// Mixed second central difference of the same functional along (phi, psi).
FdEstimate fd_second_variation(const ClosedCurve& curve, const NodeMatrix& phi, const NodeMatrix& psi,
                               const PhiModel& model, FdTarget target, double step, const EnergyOptions& options = {});

/// Energy of the functional used by the oracles.
double target_energy(const ClosedCurve& curve, const PhiModel& model, FdTarget target, const EnergyOptions& options = {});

}  // namespace knotenergy
