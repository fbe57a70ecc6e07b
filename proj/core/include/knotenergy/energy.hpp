#pragma once

#include <optional>
#include <string>
#include <vector>

#include "knotenergy/geometry.hpp"
#include "knotenergy/phi_model.hpp"

namespace knotenergy {

enum class Which { Total, M1, M2 };

/// How the singular cells next to the diagonal are treated.
///
/// Both schemes skip the cells i = k. SkipDiagonal uses unit weight everywhere else.
/// ZetaCorrected reweights the two cells at cyclic offset 1 by 1 - zeta(beta), where beta is
/// the local singular exponent of the densities (alpha - 2 for power laws): for a density
/// c |ds|^(-beta) near the diagonal this cancels the leading O(h^(1 - beta)) error of the
/// truncated row sum. The weights depend on the offset only, so the discrete energy stays a
/// smooth function of the nodes.
enum class QuadratureScheme { ZetaCorrected, SkipDiagonal };

struct EnergyOptions {
  QuadratureScheme scheme = QuadratureScheme::ZetaCorrected;
  /// 0 uses all hardware threads.
  unsigned threads = 0;
};

/// Cell weights by cyclic offset m = 0..N-1 (m = 0 is the skipped diagonal).
std::vector<double> offset_weights(Index count, const PhiModel& model, double length, QuadratureScheme scheme);

/// 1/Phi(chord) - 1/Phi(intrinsic distance). Throws DiagonalSingularity for i = j.
double density_total(const ClosedCurve& curve, Index i, Index j, const PhiModel& model);
/// |tau_i - tau_j|^2 / (2 Phi(chord)).
double density_m1(const ClosedCurve& curve, Index i, Index j, const PhiModel& model);
/// (1/Phi - Lambda)(chord) <tau_i ^ u, tau_j ^ u> with u the unit chord.
double density_m2(const ClosedCurve& curve, Index i, Index j, const PhiModel& model);

struct Energies {
  double total = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
};

/// Off-diagonal double sum of the densities against ds1 ds2 = speed_i speed_k h^2.
/// Throws NumericFailure naming the first non-finite cell.
Energies energies(const ClosedCurve& curve, const PhiModel& model, const EnergyOptions& options = {});
double energy(const ClosedCurve& curve, const PhiModel& model, Which which, const EnergyOptions& options = {});

/// 2 L T(L/2).
double decomposition_constant(const PhiModel& model, double length);

struct EnergyReport {
  double e_total = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
  double constant_term = 0.0;
  double residual = 0.0;
  Index n = 0;
  std::string model;
  std::optional<double> alpha;
  QuadratureScheme scheme = QuadratureScheme::ZetaCorrected;
  /// False when the kernel audit could not confirm every kernel condition; the numbers are still reported.
  bool assumptions_verified = true;
  bool divergence_suspected = false;
  double runtime_ms = 0.0;
};

/// All three energies on one grid plus the decomposition residual.
EnergyReport check_decomposition(const ClosedCurve& curve, const PhiModel& model, const EnergyOptions& options = {});

/// True when resampling the curve's own nodes at 2N grows `value` by more than 25%.
bool divergence_suspected(const ClosedCurve& curve, const PhiModel& model, Which which, double value,
                          const EnergyOptions& options = {});

struct CircleEnergies {
  double e_total = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
};

/// Closed-form energies of a round circle of length L under Phi = x^alpha.
/// Throws Pole for alpha >= 3 and TailDivergence for alpha <= 1.
CircleEnergies circle_closed_form(double alpha, double length);

std::string to_string(QuadratureScheme scheme);
std::string to_string(Which which);

}  // namespace knotenergy
