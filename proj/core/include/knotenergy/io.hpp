#pragma once

#include <string>
#include <string_view>

#include "knotenergy/audit.hpp"
#include "knotenergy/energy.hpp"
#include "knotenergy/geometry.hpp"
#include "knotenergy/phi_model.hpp"

namespace knotenergy {

inline constexpr int kFormatVersion = 1;

/// Rounds to 12 significant digits, the precision of every number this library writes.
double round_significant(double value);

struct CurveFile {
  NodeMatrix points;
  std::string name;
};

/// Parses {"points": [[x, y, ...], ...], "name": optional}. Other fields are ignored.
/// Throws Format with the offending field path, e.g. "points[3][1]".
CurveFile parse_curve_json(std::string_view text);
CurveFile read_curve_file(const std::string& path);

/// {"format_version", "name", "n", "N", "total_length", "points"}.
std::string curve_json(const ClosedCurve& curve, const std::string& name);

/// Energy report; runtime_ms is omitted when `timing` is false so output can be byte-compared.
std::string energy_report_json(const EnergyReport& report, bool timing = true);

std::string audit_report_json(const AuditReport& report);

/// CSV rows "x,phi"; blank lines, '#' comments and one non-numeric header row are skipped.
/// Throws Format naming the line.
PhiModel parse_phi_csv(std::string_view text);
PhiModel read_phi_csv(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace knotenergy
