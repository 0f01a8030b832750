#pragma once

#include <stdexcept>
#include <string>

namespace hsflow {

enum class Errc {
  invalid_dimension,
  shape_mismatch,
  not_symmetric,
  not_finite,
  eigen_no_convergence,
  degenerate_anchor,
  complex_roots,
  no_real_solution,
  near_singular_denominator,
  residual_out_of_tolerance,
  unsorted_spectrum,
  invalid_config,
  parse_error,
  io_error,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::invalid_dimension: return "invalid_dimension";
    case Errc::shape_mismatch: return "shape_mismatch";
    case Errc::not_symmetric: return "not_symmetric";
    case Errc::not_finite: return "not_finite";
    case Errc::eigen_no_convergence: return "eigen_no_convergence";
    case Errc::degenerate_anchor: return "degenerate_anchor";
    case Errc::complex_roots: return "complex_roots";
    case Errc::no_real_solution: return "no_real_solution";
    case Errc::near_singular_denominator: return "near_singular_denominator";
    case Errc::residual_out_of_tolerance: return "residual_out_of_tolerance";
    case Errc::unsorted_spectrum: return "unsorted_spectrum";
    case Errc::invalid_config: return "invalid_config";
    case Errc::parse_error: return "parse_error";
    case Errc::io_error: return "io_error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace hsflow
