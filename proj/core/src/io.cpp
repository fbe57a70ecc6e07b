#include "knotenergy/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "knotenergy/error.hpp"

namespace knotenergy {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round_significant(v);
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  return out;
}

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return end == text.c_str() + text.size() && std::isfinite(out);
}

}  // namespace

double round_significant(double value) {
  if (!std::isfinite(value) || value == 0.0) return value;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return std::strtod(buf, nullptr);
}

CurveFile parse_curve_json(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Format, std::string("curve JSON does not parse: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::Format, "curve JSON must be an object");
  if (!doc.contains("points")) throw Error(ErrorCode::Format, "curve JSON: missing field 'points'");
  const auto& pts = doc["points"];
  if (!pts.is_array() || pts.empty()) throw Error(ErrorCode::Format, "curve JSON: 'points' must be a non-empty array");

  CurveFile out;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw Error(ErrorCode::Format, "curve JSON: 'name' must be a string");
    out.name = doc["name"].get<std::string>();
  }
  const std::size_t count = pts.size();
  std::size_t dim = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const std::string where = "points[" + std::to_string(k) + "]";
    const auto& p = pts[k];
    if (!p.is_array()) throw Error(ErrorCode::Format, "curve JSON: '" + where + "' must be an array of numbers");
    if (k == 0) {
      dim = p.size();
      if (dim < 2 || dim > static_cast<std::size_t>(kMaxDim)) {
        throw Error(ErrorCode::Format, "curve JSON: '" + where + "' has dimension " + std::to_string(dim) +
                                           ", expected 2.." + std::to_string(kMaxDim));
      }
      out.points.resize(static_cast<Index>(dim), static_cast<Index>(count));
    } else if (p.size() != dim) {
      throw Error(ErrorCode::Format, "curve JSON: '" + where + "' has dimension " + std::to_string(p.size()) +
                                         " but points[0] has " + std::to_string(dim));
    }
    for (std::size_t c = 0; c < dim; ++c) {
      if (!p[c].is_number() || !std::isfinite(p[c].get<double>())) {
        throw Error(ErrorCode::Format, "curve JSON: '" + where + "[" + std::to_string(c) + "]' is not a finite number");
      }
      out.points(static_cast<Index>(c), static_cast<Index>(k)) = p[c].get<double>();
    }
  }
  return out;
}

CurveFile read_curve_file(const std::string& path) { return parse_curve_json(read_text_file(path)); }

std::string curve_json(const ClosedCurve& curve, const std::string& name) {
  ordered_json j;
  j["format_version"] = kFormatVersion;
  j["name"] = name;
  j["n"] = curve.dim();
  j["N"] = curve.size();
  j["total_length"] = number(curve.total_length());
  ordered_json pts = ordered_json::array();
  for (Index k = 0; k < curve.size(); ++k) {
    ordered_json p = ordered_json::array();
    for (Index c = 0; c < curve.dim(); ++c) p.push_back(number(curve.points()(c, k)));
    pts.push_back(std::move(p));
  }
  j["points"] = std::move(pts);
  return dump(j);
}

std::string energy_report_json(const EnergyReport& report, bool timing) {
  ordered_json j;
  j["format_version"] = kFormatVersion;
  j["e_total"] = number(report.e_total);
  j["e1"] = number(report.e1);
  j["e2"] = number(report.e2);
  j["constant_term"] = number(report.constant_term);
  j["residual"] = number(report.residual);
  j["N"] = report.n;
  if (report.alpha) {
    j["alpha"] = number(*report.alpha);
  } else {
    j["model"] = "custom";
    j["kernel"] = report.model;
  }
  j["quadrature"] = to_string(report.scheme);
  j["assumptions_verified"] = report.assumptions_verified;
  j["divergence_suspected"] = report.divergence_suspected;
  if (timing) j["runtime_ms"] = number(report.runtime_ms);
  return dump(j);
}

std::string audit_report_json(const AuditReport& report) {
  ordered_json j;
  j["format_version"] = kFormatVersion;
  j["model"] = report.model;
  j["length"] = number(report.length);
  ordered_json grid;
  grid["x"] = {{"count", report.grid.x.size()},
               {"min", number(report.grid.x.front())},
               {"max", number(report.grid.x.back())},
               {"spacing", "log"}};
  ordered_json lambdas = ordered_json::array();
  for (double l : report.grid.lambdas) lambdas.push_back(number(l));
  grid["lambda"] = std::move(lambdas);
  grid["t"] = {{"count", report.grid.t.size()},
               {"min", number(report.grid.t.front())},
               {"max", number(report.grid.t.back())}};
  ordered_json eps = ordered_json::array();
  for (double e : report.grid.eps) eps.push_back(number(e));
  grid["eps_fractions"] = std::move(eps);
  j["grid"] = std::move(grid);
  j["tolerances"] = {{"slack", report.slack}, {"limit_rule", "nonincreasing over the last three samples"}};
  ordered_json conditions = ordered_json::array();
  for (const auto& c : report.conditions) {
    ordered_json entry;
    entry["condition"] = c.id;
    entry["verdict"] = to_string(c.verdict);
    entry["checkable"] = c.checkable;
    if (!c.note.empty()) entry["note"] = c.note;
    ordered_json witnesses = ordered_json::array();
    for (const auto& w : c.witnesses) {
      ordered_json at = ordered_json::object();
      for (const auto& [key, value] : w.at) at[key] = number(value);
      witnesses.push_back({{"at", std::move(at)}, {"value", number(w.value)}});
    }
    entry["witnesses"] = std::move(witnesses);
    conditions.push_back(std::move(entry));
  }
  j["conditions"] = std::move(conditions);
  return dump(j);
}

PhiModel parse_phi_csv(std::string_view text) {
  std::vector<double> xs, phis;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto fields = split_fields(line);
    double x = 0.0, phi = 0.0;
    const bool numeric = fields.size() == 2 && parse_double(fields[0], x) && parse_double(fields[1], phi);
    if (!numeric) {
      if (!header_seen && xs.empty() && fields.size() == 2) {
        header_seen = true;
        continue;
      }
      throw Error(ErrorCode::Format, "kernel CSV line " + std::to_string(line_no) + ": expected two numbers 'x,phi'");
    }
    xs.push_back(x);
    phis.push_back(phi);
  }
  return PhiModel::tabulated(std::move(xs), std::move(phis));
}

PhiModel read_phi_csv(const std::string& path) { return parse_phi_csv(read_text_file(path)); }

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Format, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Format, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorCode::Format, "write to '" + path + "' failed");
}

}  // namespace knotenergy
