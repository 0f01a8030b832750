#pragma once

#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>

#include "hsflow/error.hpp"
#include "hsflow/matrix.hpp"

#include "json.hpp"

namespace hsflow {

/// H = diag(eps) + g * h1. eps carries the diagonal operator, h1 the
/// dimensionless interaction matrix, g the coupling strength.
struct Hamiltonian {
  Vec eps;
  Matrix h1;
  double g = 0.0;

  std::size_t dim() const { return eps.size(); }

  void validate() const {
    if (dim() < 2) fail(Errc::invalid_dimension, "Hamiltonian dimension must be >= 2");
    if (h1.size() != dim())
      fail(Errc::shape_mismatch, "eps length and h1 dimension differ");
    if (!all_finite(eps) || !h1.all_finite() || !std::isfinite(g))
      fail(Errc::not_finite, "Hamiltonian entries must be finite");
    if (max_relative_asymmetry(h1) > 1e-12)
      fail(Errc::not_symmetric, "h1 is not symmetric");
  }
};

enum class ModelKind { tight_binding, degenerate_fixed_point, custom };

inline const char* model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::tight_binding: return "tight_binding";
    case ModelKind::degenerate_fixed_point: return "degenerate_fixed_point";
    case ModelKind::custom: return "custom";
  }
  return "unknown";
}

inline ModelKind parse_model_kind(const std::string& s) {
  if (s == "tight_binding") return ModelKind::tight_binding;
  if (s == "degenerate_fixed_point" || s == "degenerate")
    return ModelKind::degenerate_fixed_point;
  if (s == "custom") return ModelKind::custom;
  fail(Errc::parse_error, "unknown model kind '" + s + "'");
}

/// Parameters sufficient to rebuild a model; recorded in every trace.
struct ModelSpec {
  ModelKind kind = ModelKind::custom;
  std::size_t n = 0;
  double beta = 1.0;
  double gamma = 0.5;
  double diag_val = -0.5;
  double offdiag_val = 0.5;
  double g0 = 0.0;
  std::string source_path;  // required for kind == custom built from a file

  void validate() const {
    if (n < 2) fail(Errc::invalid_dimension, "model dimension must be >= 2");
  }
};

/// Chain with uniform diagonal beta and nearest-neighbour coupling gamma;
/// the diagonal operator is zero.
inline Hamiltonian build_tight_binding(std::size_t n, double beta,
                                       double gamma, double g0) {
  if (n < 2) fail(Errc::invalid_dimension, "tight_binding: n must be >= 2");
  Hamiltonian h{Vec(n, 0.0), Matrix(n), g0};
  for (std::size_t i = 0; i < n; ++i) {
    h.h1(i, i) = beta;
    if (i + 1 < n) {
      h.h1(i, i + 1) = gamma;
      h.h1(i + 1, i) = gamma;
    }
  }
  return h;
}

/// Fully connected model with equal diagonal (-1/2) and off-diagonal (+1/2)
/// elements; its coupling sits at a fixed point of the reduction flow.
inline Hamiltonian build_degenerate_fixed_point(std::size_t n, double g0,
                                                double diag_val = -0.5,
                                                double offdiag_val = 0.5) {
  if (n < 2) fail(Errc::invalid_dimension, "degenerate_fixed_point: n must be >= 2");
  Hamiltonian h{Vec(n, 0.0), Matrix(n), g0};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      h.h1(i, j) = (i == j) ? diag_val : offdiag_val;
  return h;
}

/// User-supplied matrix. Near-symmetric input (relative asymmetry <= 1e-9)
/// is symmetrised by averaging; anything worse is rejected.
inline Hamiltonian build_custom(Vec eps, const Matrix& h1, double g0) {
  if (h1.size() != eps.size())
    fail(Errc::shape_mismatch,
         "custom model: eps has length " + std::to_string(eps.size()) +
             " but h1 is " + std::to_string(h1.size()) + "x" +
             std::to_string(h1.size()));
  if (eps.size() < 2) fail(Errc::invalid_dimension, "custom model: n must be >= 2");
  if (!all_finite(eps) || !h1.all_finite() || !std::isfinite(g0))
    fail(Errc::not_finite, "custom model: entries must be finite");
  double asym = max_relative_asymmetry(h1);
  if (asym > 1e-9)
    fail(Errc::not_symmetric,
         "custom model: h1 asymmetry " + std::to_string(asym) +
             " exceeds 1e-9");
  Hamiltonian h{std::move(eps), symmetrized(h1), g0};
  return h;
}

/// diag(eps) + g * h1 as a plain matrix.
inline Matrix full_matrix(const Hamiltonian& h) {
  Matrix m(h.dim());
  for (std::size_t i = 0; i < h.dim(); ++i)
    for (std::size_t j = 0; j < h.dim(); ++j)
      m(i, j) = h.g * h.h1(i, j) + (i == j ? h.eps[i] : 0.0);
  return m;
}

namespace detail {

inline std::pair<std::size_t, std::size_t> line_col_at(const std::string& text,
                                                       std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace detail

/// Parse a custom model from JSON text: {"eps": [...], "h1": [[...]...],
/// "g0": x}. Malformed JSON is reported with line and column.
inline Hamiltonian parse_model_text(const std::string& text,
                                    const std::string& origin) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    auto [line, col] = detail::line_col_at(text, e.byte > 0 ? e.byte - 1 : 0);
    fail(Errc::parse_error, origin + ": JSON parse error at line " +
                                std::to_string(line) + ", column " +
                                std::to_string(col) + ": " + e.what());
  }
  if (!j.is_object()) fail(Errc::parse_error, origin + ": expected a JSON object");
  for (const char* key : {"eps", "h1", "g0"})
    if (!j.contains(key))
      fail(Errc::parse_error, origin + ": missing required field '" +
                                  std::string(key) + "'");
  if (!j["eps"].is_array())
    fail(Errc::parse_error, origin + ": 'eps' must be an array of reals");
  Vec eps;
  for (std::size_t i = 0; i < j["eps"].size(); ++i) {
    if (!j["eps"][i].is_number())
      fail(Errc::parse_error, origin + ": eps[" + std::to_string(i) +
                                  "] is not a number");
    eps.push_back(j["eps"][i].get<double>());
  }
  if (!j["h1"].is_array())
    fail(Errc::parse_error, origin + ": 'h1' must be an array of rows");
  std::size_t n = j["h1"].size();
  if (n != eps.size())
    fail(Errc::shape_mismatch, origin + ": h1 has " + std::to_string(n) +
                                   " rows but eps has length " +
                                   std::to_string(eps.size()));
  Matrix h1(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = j["h1"][i];
    if (!row.is_array() || row.size() != n)
      fail(Errc::shape_mismatch, origin + ": h1 row " + std::to_string(i) +
                                     " does not have " + std::to_string(n) +
                                     " entries");
    for (std::size_t k = 0; k < n; ++k) {
      if (!row[k].is_number())
        fail(Errc::parse_error, origin + ": h1[" + std::to_string(i) + "][" +
                                    std::to_string(k) + "] is not a number");
      h1(i, k) = row[k].get<double>();
    }
  }
  if (!j["g0"].is_number())
    fail(Errc::parse_error, origin + ": 'g0' must be a number");
  return build_custom(std::move(eps), h1, j["g0"].get<double>());
}

inline Hamiltonian load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open model file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model_text(ss.str(), path);
}

/// Build the Hamiltonian described by a ModelSpec.
inline Hamiltonian build_model(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::tight_binding:
      return build_tight_binding(spec.n, spec.beta, spec.gamma, spec.g0);
    case ModelKind::degenerate_fixed_point:
      return build_degenerate_fixed_point(spec.n, spec.g0, spec.diag_val,
                                          spec.offdiag_val);
    case ModelKind::custom:
      if (spec.source_path.empty())
        fail(Errc::invalid_config, "custom model requires a source path");
      return load_model_file(spec.source_path);
  }
  fail(Errc::invalid_config, "unknown model kind");
}

/// Build from a spec and write back the dimension and coupling the model
/// actually has; file-backed custom models get both from the file.
inline Hamiltonian build_model_synced(ModelSpec& spec) {
  Hamiltonian h = build_model(spec);
  spec.n = h.dim();
  spec.g0 = h.g;
  return h;
}

/// Spec describing an in-memory Hamiltonian (no file backing).
inline ModelSpec in_memory_spec(const Hamiltonian& h) {
  ModelSpec spec;
  spec.kind = ModelKind::custom;
  spec.n = h.dim();
  spec.g0 = h.g;
  return spec;
}

}  // namespace hsflow
