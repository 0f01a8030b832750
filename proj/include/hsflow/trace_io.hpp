#pragma once

#include <cstdio>
#include <fstream>
#include <string>

#include "hsflow/analysis.hpp"
#include "hsflow/error.hpp"
#include "hsflow/flow.hpp"
#include "hsflow/models.hpp"

#include "json.hpp"

namespace hsflow {

/// Shortest round-trip decimal form of a double (17 significant digits).
inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void to_json(nlohmann::json& j, const ModelSpec& m) {
  j = nlohmann::json{{"kind", model_kind_name(m.kind)},
                     {"n", m.n},
                     {"beta", m.beta},
                     {"gamma", m.gamma},
                     {"diag_val", m.diag_val},
                     {"offdiag_val", m.offdiag_val},
                     {"g0", m.g0},
                     {"source_path", m.source_path}};
}

inline void from_json(const nlohmann::json& j, ModelSpec& m) {
  m.kind = parse_model_kind(j.at("kind").get<std::string>());
  j.at("n").get_to(m.n);
  j.at("beta").get_to(m.beta);
  j.at("gamma").get_to(m.gamma);
  j.at("diag_val").get_to(m.diag_val);
  j.at("offdiag_val").get_to(m.offdiag_val);
  j.at("g0").get_to(m.g0);
  j.at("source_path").get_to(m.source_path);
}

inline void to_json(nlohmann::json& j, const FlowConfig& c) {
  j = nlohmann::json{
      {"n_min", c.n_min},
      {"m_track", c.m_track},
      {"target_mode", target_mode_name(c.target_mode)},
      {"anchor_index", c.anchor_index},
      {"elimination_order", elimination_order_name(c.elimination_order)},
      {"residual_tol", c.residual_tol}};
}

inline void from_json(const nlohmann::json& j, FlowConfig& c) {
  j.at("n_min").get_to(c.n_min);
  j.at("m_track").get_to(c.m_track);
  c.target_mode = parse_target_mode(j.at("target_mode").get<std::string>());
  j.at("anchor_index").get_to(c.anchor_index);
  c.elimination_order =
      parse_elimination_order(j.at("elimination_order").get<std::string>());
  j.at("residual_tol").get_to(c.residual_tol);
}

inline void to_json(nlohmann::json& j, const QuadraticBuild& q) {
  j = nlohmann::json{{"f1n", q.f1n},
                     {"sn", q.sn},
                     {"g1n", q.g1n},
                     {"h_nn", q.h_nn},
                     {"h_1n", q.h_1n},
                     {"a_coef", q.a_coef},
                     {"b_coef", q.b_coef},
                     {"c_coef", q.c_coef},
                     {"lambda1", q.lambda1},
                     {"eps_anchor", q.eps_anchor},
                     {"eps_elim", q.eps_elim},
                     {"a11", q.a11}};
}

inline void from_json(const nlohmann::json& j, QuadraticBuild& q) {
  j.at("f1n").get_to(q.f1n);
  j.at("sn").get_to(q.sn);
  j.at("g1n").get_to(q.g1n);
  j.at("h_nn").get_to(q.h_nn);
  j.at("h_1n").get_to(q.h_1n);
  j.at("a_coef").get_to(q.a_coef);
  j.at("b_coef").get_to(q.b_coef);
  j.at("c_coef").get_to(q.c_coef);
  j.at("lambda1").get_to(q.lambda1);
  j.at("eps_anchor").get_to(q.eps_anchor);
  j.at("eps_elim").get_to(q.eps_elim);
  j.at("a11").get_to(q.a11);
}

inline void to_json(nlohmann::json& j, const FlowStep& s) {
  j = nlohmann::json{{"dim_before", s.dim_before},
                     {"dim_after", s.dim_after},
                     {"elim_index", s.elim_index},
                     {"g_before", s.g_before},
                     {"g_after", s.g_after},
                     {"build", s.build},
                     {"discriminant", s.discriminant},
                     {"roots", s.roots},
                     {"chosen_root_index", s.chosen_root_index},
                     {"residual", s.residual},
                     {"spectrum_after", s.spectrum_after},
                     {"lambda1_target_next", s.lambda1_target_next}};
}

inline void from_json(const nlohmann::json& j, FlowStep& s) {
  j.at("dim_before").get_to(s.dim_before);
  j.at("dim_after").get_to(s.dim_after);
  j.at("elim_index").get_to(s.elim_index);
  j.at("g_before").get_to(s.g_before);
  j.at("g_after").get_to(s.g_after);
  j.at("build").get_to(s.build);
  j.at("discriminant").get_to(s.discriminant);
  j.at("roots").get_to(s.roots);
  j.at("chosen_root_index").get_to(s.chosen_root_index);
  j.at("residual").get_to(s.residual);
  j.at("spectrum_after").get_to(s.spectrum_after);
  j.at("lambda1_target_next").get_to(s.lambda1_target_next);
}

inline void to_json(nlohmann::json& j, const FlowTrace& t) {
  j = nlohmann::json{{"model", t.model},
                     {"config", t.config},
                     {"initial_spectrum", t.initial_spectrum},
                     {"steps", t.steps},
                     {"completed", t.completed},
                     {"termination", t.termination}};
}

inline void from_json(const nlohmann::json& j, FlowTrace& t) {
  j.at("model").get_to(t.model);
  j.at("config").get_to(t.config);
  j.at("initial_spectrum").get_to(t.initial_spectrum);
  j.at("steps").get_to(t.steps);
  j.at("completed").get_to(t.completed);
  j.at("termination").get_to(t.termination);
}

inline std::string trace_to_json_text(const FlowTrace& t) {
  nlohmann::json j = t;
  return j.dump(2) + "\n";
}

inline FlowTrace trace_from_json_text(const std::string& text) {
  try {
    return nlohmann::json::parse(text).get<FlowTrace>();
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse_error, std::string("trace JSON: ") + e.what());
  }
}

/// CSV trace: one header row, one row for the initial spectrum (step-only
/// columns empty), one row per step. Reals carry 17 significant digits.
inline std::string trace_to_csv(const FlowTrace& t) {
  const std::size_t m = t.initial_spectrum.size();
  std::string out = "dimension,g";
  for (std::size_t k = 1; k <= m; ++k)
    out += ",lambda_" + std::to_string(k);
  out += ",discriminant,residual,chosen_root,other_root\n";

  const std::size_t dim0 =
      t.steps.empty() ? t.model.n : t.steps.front().dim_before;
  out += std::to_string(dim0) + "," + format_real(t.model.g0);
  for (double v : t.initial_spectrum) out += "," + format_real(v);
  out += ",,,,\n";

  for (const FlowStep& s : t.steps) {
    out += std::to_string(s.dim_after) + "," + format_real(s.g_after);
    for (double v : s.spectrum_after) out += "," + format_real(v);
    for (std::size_t k = s.spectrum_after.size(); k < m; ++k) out += ",";
    out += "," + format_real(s.discriminant);
    out += "," + format_real(s.residual);
    out += "," + format_real(s.g_after);
    if (s.roots.size() == 2)
      out += "," + format_real(s.roots[1 - s.chosen_root_index]);
    else
      out += ",";
    out += "\n";
  }
  if (!t.completed) out += "# termination = " + t.termination + "\n";
  return out;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io_error, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) fail(Errc::io_error, "failed to write '" + path + "'");
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace hsflow
