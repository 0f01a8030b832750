#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "hsflow/error.hpp"
#include "hsflow/flow.hpp"
#include "hsflow/models.hpp"

namespace hsflow {

struct AnalysisConfig {
  double fixed_point_tol = 1e-6;
  double degeneracy_tol = 1e-8;
};

enum class OutputFormat { csv, json };

inline OutputFormat parse_output_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  fail(Errc::parse_error, "unknown output format '" + s + "'");
}

/// Everything a command needs: model, flow policy, analysis tolerances,
/// output destination, and the sweep grid.
struct RunConfig {
  ModelSpec model{ModelKind::tight_binding, 20, 1.0, 0.5, -0.5, 0.5, 20.0, ""};
  FlowConfig flow;
  AnalysisConfig analysis;
  OutputFormat format = OutputFormat::csv;
  std::string out_path;
  unsigned workers = 1;
  std::vector<std::size_t> sweep_n;
  std::vector<double> sweep_g0;
};

namespace detail {

inline double parse_real(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(Errc::parse_error, where + ": '" + s + "' is not a number");
  }
}

inline long parse_int(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(Errc::parse_error, where + ": '" + s + "' is not an integer");
  }
}

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace detail

/// Comma-separated values, each either a scalar or a lo:hi:step range
/// (inclusive endpoints): "1,20" or "2:10:2,15".
inline std::vector<double> parse_real_list(const std::string& text,
                                           const std::string& where) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    std::string item = detail::trim(
        text.substr(start, comma == std::string::npos ? comma : comma - start));
    if (!item.empty()) {
      const std::size_t c1 = item.find(':');
      if (c1 == std::string::npos) {
        out.push_back(detail::parse_real(item, where));
      } else {
        const std::size_t c2 = item.find(':', c1 + 1);
        if (c2 == std::string::npos)
          fail(Errc::parse_error, where + ": range needs lo:hi:step");
        const double lo = detail::parse_real(item.substr(0, c1), where);
        const double hi = detail::parse_real(item.substr(c1 + 1, c2 - c1 - 1), where);
        const double step = detail::parse_real(item.substr(c2 + 1), where);
        if (!(step > 0.0) || hi < lo)
          fail(Errc::parse_error, where + ": bad range '" + item + "'");
        for (double v = lo; v <= hi + 1e-12 * step; v += step) out.push_back(v);
      }
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) fail(Errc::parse_error, where + ": empty list");
  return out;
}

inline std::vector<std::size_t> parse_index_list(const std::string& text,
                                                 const std::string& where) {
  std::vector<std::size_t> out;
  for (double v : parse_real_list(text, where)) {
    if (v < 0 || v != std::floor(v))
      fail(Errc::parse_error, where + ": expected non-negative integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

/// One parsed `key = value` line.
struct IniEntry {
  std::string value;
  std::size_t line = 0;
};

/// Flat INI text: [section] headers, key = value pairs, # or ; comments.
inline std::map<std::string, std::map<std::string, IniEntry>> parse_ini(
    const std::string& text, const std::string& origin) {
  std::map<std::string, std::map<std::string, IniEntry>> sections;
  std::string section;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string line = text.substr(
        start, nl == std::string::npos ? std::string::npos : nl - start);
    ++line_no;
    start = (nl == std::string::npos) ? text.size() + 1 : nl + 1;

    const std::size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        fail(Errc::parse_error, origin + ":" + std::to_string(line_no) +
                                    ": unterminated section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(Errc::parse_error, origin + ":" + std::to_string(line_no) +
                                  ": expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty())
      fail(Errc::parse_error,
           origin + ":" + std::to_string(line_no) + ": empty key");
    sections[section][key] = {value, line_no};
  }
  return sections;
}

/// Apply an INI config file to a RunConfig. Unknown sections or keys are
/// errors, reported with their line number.
inline void apply_ini(RunConfig& rc, const std::string& text,
                      const std::string& origin) {
  auto sections = parse_ini(text, origin);
  auto where = [&](const std::string& sec, const std::string& key,
                   const IniEntry& e) {
    return origin + ":" + std::to_string(e.line) + ": [" + sec + "] " + key;
  };
  for (const auto& [sec, entries] : sections) {
    for (const auto& [key, e] : entries) {
      const std::string ctx = where(sec, key, e);
      if (sec == "model") {
        if (key == "kind") rc.model.kind = parse_model_kind(e.value);
        else if (key == "n") rc.model.n = std::size_t(detail::parse_int(e.value, ctx));
        else if (key == "beta") rc.model.beta = detail::parse_real(e.value, ctx);
        else if (key == "gamma") rc.model.gamma = detail::parse_real(e.value, ctx);
        else if (key == "g0") rc.model.g0 = detail::parse_real(e.value, ctx);
        else if (key == "diag") rc.model.diag_val = detail::parse_real(e.value, ctx);
        else if (key == "offdiag") rc.model.offdiag_val = detail::parse_real(e.value, ctx);
        else if (key == "file") rc.model.source_path = e.value;
        else fail(Errc::parse_error, ctx + ": unknown key");
      } else if (sec == "flow") {
        if (key == "n_min") rc.flow.n_min = std::size_t(detail::parse_int(e.value, ctx));
        else if (key == "track") rc.flow.m_track = std::size_t(detail::parse_int(e.value, ctx));
        else if (key == "mode") rc.flow.target_mode = parse_target_mode(e.value);
        else if (key == "anchor") rc.flow.anchor_index = std::size_t(detail::parse_int(e.value, ctx));
        else if (key == "elimination") rc.flow.elimination_order = parse_elimination_order(e.value);
        else if (key == "residual_tol") rc.flow.residual_tol = detail::parse_real(e.value, ctx);
        else fail(Errc::parse_error, ctx + ": unknown key");
      } else if (sec == "analysis") {
        if (key == "fixed_point_tol") rc.analysis.fixed_point_tol = detail::parse_real(e.value, ctx);
        else if (key == "degeneracy_tol") rc.analysis.degeneracy_tol = detail::parse_real(e.value, ctx);
        else fail(Errc::parse_error, ctx + ": unknown key");
      } else if (sec == "output") {
        if (key == "format") rc.format = parse_output_format(e.value);
        else if (key == "out") rc.out_path = e.value;
        else fail(Errc::parse_error, ctx + ": unknown key");
      } else if (sec == "sweep") {
        if (key == "workers") rc.workers = unsigned(detail::parse_int(e.value, ctx));
        else if (key == "n") rc.sweep_n = parse_index_list(e.value, ctx);
        else if (key == "g0") rc.sweep_g0 = parse_real_list(e.value, ctx);
        else fail(Errc::parse_error, ctx + ": unknown key");
      } else {
        fail(Errc::parse_error, origin + ": unknown section [" + sec + "]");
      }
    }
  }
}

}  // namespace hsflow
