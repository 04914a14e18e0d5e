#pragma once

// Run reports. Structure is built as ordered JSON; numbers are written with
// 17 significant digits so reports diff cleanly and round-trip exactly.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "saddle/minimax.hpp"
#include "saddle/phi.hpp"
#include "saddle/quadratic.hpp"

namespace saddle {

inline constexpr const char* kLibraryVersion = "1.0.0";
inline constexpr int kReportFormatVersion = 1;

inline std::string format_double(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  if (v == 0.0) return "0";  // drop the sign of negative zero
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void write_json(std::ostream& os, const nlohmann::ordered_json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case nlohmann::ordered_json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) os << ",\n";
        first = false;
        os << pad_in << nlohmann::ordered_json(k).dump() << ": ";
        write_json(os, v, indent + 1);
      }
      os << "\n" << pad << "}";
      return;
    }
    case nlohmann::ordered_json::value_t::array: {
      // Numeric arrays (points) stay on one line.
      bool flat = true;
      for (const auto& v : j) flat = flat && (v.is_number() || v.is_string());
      if (flat) {
        os << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          write_json(os, j[i], indent + 1);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad_in;
        write_json(os, j[i], indent + 1);
      }
      os << "\n" << pad << "]";
      return;
    }
    case nlohmann::ordered_json::value_t::number_float: os << format_double(j.get<double>()); return;
    default: os << j.dump(); return;
  }
}

}  // namespace detail

inline std::string render_report(const nlohmann::ordered_json& j) {
  std::ostringstream os;
  detail::write_json(os, j, 0);
  os << "\n";
  return os.str();
}

inline nlohmann::ordered_json to_json(const MinimaxEstimate& e) {
  return {{"sup_inf", e.sup_inf},
          {"inf_sup", e.inf_sup},
          {"outer_max_arg", e.outer_max_arg},
          {"outer_min_arg", e.outer_min_arg},
          {"resolution", e.resolution},
          {"x_nodes", e.x_nodes},
          {"y_nodes", e.y_nodes},
          {"continuity_bound", e.continuity_bound},
          {"gap", e.gap()}};
}

inline nlohmann::ordered_json to_json(const SaddleCandidate& c) {
  return {{"x_star", c.x_star},       {"y_star", c.y_star},
          {"value", c.value},         {"max_violation", c.max_violation},
          {"min_violation", c.min_violation}, {"tol", c.tol},
          {"resolution", c.resolution}, {"verified", c.verified}};
}

inline nlohmann::ordered_json to_json(const PhiSolveResult& r) {
  nlohmann::ordered_json j{{"x_star", r.x_star},
                           {"y_star", r.y_star},
                           {"phi_value", r.phi_value},
                           {"iterations", r.iterations},
                           {"converged", r.converged},
                           {"stop_reason", to_string(r.stop_reason)},
                           {"failure", to_string(r.failure)}};
  if (r.diagnosis) {
    j["convexity_diagnosis"] = {{"samples", r.diagnosis->samples},
                                {"concavity_violation_x", r.diagnosis->concavity_violation_x},
                                {"convexity_violation_y", r.diagnosis->convexity_violation_y},
                                {"no_violation_found", r.diagnosis->no_violation_found()}};
  }
  return j;
}

inline nlohmann::ordered_json to_json(const QuadraticSolveReport& r) {
  return {{"x_star", r.x_star},
          {"y_star", r.y_star},
          {"value_sup_inf", r.value_sup_inf},
          {"value_inf_sup", r.value_inf_sup},
          {"R", r.R},
          {"x0_members_checked", r.x0_members_checked},
          {"x0_rejections", r.x0_rejections},
          {"ascent_iterations", r.ascent_iterations},
          {"ascent_stagnated", r.ascent_stagnated},
          {"cross_check_resolution", r.cross_check_resolution},
          {"degenerate", r.degenerate},
          {"chain_ok", r.chain_ok},
          {"diagnostics", r.diagnostics}};
}

inline nlohmann::ordered_json to_json(const ChainCheck& c) {
  return {{"min_max", c.min_max},
          {"max_at_y_star", c.max_at_y_star},
          {"value", c.value},
          {"min_at_x_star", c.min_at_x_star},
          {"max_min_restricted", c.max_min_restricted},
          {"x0_nodes", c.x0_nodes},
          {"tol", c.tol},
          {"ok", c.ok}};
}

/// CSV rows iter,x...,y...,phi with a header line.
inline void write_trajectory(std::ostream& os, const PhiSolveResult& r) {
  const std::size_t d = r.x_star.size(), k = r.y_star.size();
  os << "iter";
  for (std::size_t i = 0; i < d; ++i) os << ",x" << i;
  for (std::size_t j = 0; j < k; ++j) os << ",y" << j;
  os << ",phi\n";
  for (const auto& p : r.trajectory) {
    os << p.iter;
    for (double v : p.x) os << "," << format_double(v);
    for (double v : p.y) os << "," << format_double(v);
    os << "," << format_double(p.phi) << "\n";
  }
}

}  // namespace saddle
