#pragma once

#include <string>
#include <utility>
#include <vector>

#include "knotenergy/phi_model.hpp"

namespace knotenergy {

enum class Verdict { Pass, Fail, Indeterminate };

std::string to_string(Verdict verdict);

struct Witness {
  /// Named coordinates of the sample, e.g. {"x", 0.5} or {"lambda", 0.1}, {"eps", 1e-3}.
  std::vector<std::pair<std::string, double>> at;
  double value = 0.0;
};

struct ConditionResult {
  /// A1, A2, A3, A4, A5a, A5b, A6, A7a..A7d, A8a, A8b, A9, A10.
  std::string id;
  Verdict verdict = Verdict::Indeterminate;
  /// False only for conditions no finite computation can decide.
  bool checkable = true;
  std::string note;
  std::vector<Witness> witnesses;
};

/// Sample points for the numeric audit.
struct AuditGrid {
  /// Increasing points in (0, L/2].
  std::vector<double> x;
  /// Points in (0, 1).
  std::vector<double> lambdas;
  /// Increasing points in (0, 1].
  std::vector<double> t;
  /// Decreasing fractions in (0, 1]: eps = fraction * L/2 for the limsup conditions and
  /// eps = fraction for the chi-integral.
  std::vector<double> eps;

  /// 96 log-spaced x from 1e-6 L/2 to L/2, lambdas {0.1, 0.25, 0.5, 0.75, 0.9}, 64 log-spaced t
  /// from 1e-6 to 1 and eps fractions 2^-1 .. 2^-12.
  static AuditGrid standard(double length);
};

struct AuditReport {
  std::string model;
  double length = 0.0;
  AuditGrid grid;
  double slack = 1e-9;
  std::vector<ConditionResult> conditions;

  const ConditionResult& condition(const std::string& id) const;
  /// Every checkable condition passes.
  bool all_checkable_pass() const;
  /// A1, A2, A3, A4, A5a and A5b all pass.
  bool basic_assumptions_hold() const;
};

/// Checks the kernel against the assumptions. Power laws get analytic verdicts; other kernels are
/// sampled on the grid. Limit-type conditions pass only when the tracked quantity is nonincreasing
/// over the last three samples toward the limit, and are indeterminate otherwise. A3 and A4 are
/// derived from their sufficient conditions (A1, A6, A7 and A1, A2, A9, A10).
/// Throws InsufficientGrid for fewer than 8 x samples.
AuditReport audit(const PhiModel& model, double length, const AuditGrid& grid);
AuditReport audit(const PhiModel& model, double length);

}  // namespace knotenergy
