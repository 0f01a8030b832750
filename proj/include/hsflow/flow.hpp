#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "hsflow/eigen.hpp"
#include "hsflow/error.hpp"
#include "hsflow/models.hpp"

namespace hsflow {

/// Which eigenvalue the per-step constraint pins.
///  - frozen:  every step pins the ground eigenvalue of the *initial*
///    Hamiltonian. This is the mode that actually deforms the coupling.
///  - running: every step pins the ground eigenvalue of the *current*
///    reduced Hamiltonian. The current coupling then solves the constraint
///    exactly (eliminating one basis state at the exact eigenvalue is an
///    identity), so the flow is stationary up to round-off.
enum class TargetMode { running, frozen };

enum class EliminationOrder { highest_index_first, highest_eps_first };

inline const char* target_mode_name(TargetMode m) {
  return m == TargetMode::running ? "running" : "frozen";
}

inline TargetMode parse_target_mode(const std::string& s) {
  if (s == "running") return TargetMode::running;
  if (s == "frozen") return TargetMode::frozen;
  fail(Errc::parse_error, "unknown target mode '" + s + "'");
}

inline const char* elimination_order_name(EliminationOrder o) {
  return o == EliminationOrder::highest_index_first ? "highest_index_first"
                                                    : "highest_eps_first";
}

inline EliminationOrder parse_elimination_order(const std::string& s) {
  if (s == "highest_index_first" || s == "highest_index")
    return EliminationOrder::highest_index_first;
  if (s == "highest_eps_first" || s == "highest_eps")
    return EliminationOrder::highest_eps_first;
  fail(Errc::parse_error, "unknown elimination order '" + s + "'");
}

struct FlowConfig {
  std::size_t n_min = 5;    // stop once this dimension is reached
  std::size_t m_track = 5;  // eigenvalues recorded per step (<= n_min)
  TargetMode target_mode = TargetMode::frozen;
  std::size_t anchor_index = 0;  // 0-based basis index the constraint is
                                 // projected on; default: first basis state
  EliminationOrder elimination_order = EliminationOrder::highest_index_first;
  double residual_tol = 1e-8;  // relative; scaled by the per-step spectrum

  void validate() const {
    if (n_min < 2) fail(Errc::invalid_config, "n_min must be >= 2");
    if (m_track < 1 || m_track > n_min)
      fail(Errc::invalid_config, "m_track must be in [1, n_min]");
    if (!(residual_tol > 0.0))
      fail(Errc::invalid_config, "residual_tol must be positive");
  }
};

/// Intermediates of the per-step constraint, kept for diagnostics.
/// The renormalised coupling solves
///   a_coef * g^2 + b_coef * g + c_coef = 0
/// which is the cleared-denominator form of
///   eps_anchor*a11 + g*f1n + g^2*h_1n*sn / (lambda1 - eps_elim - g*h_nn)
///     = lambda1 * a11.
struct QuadraticBuild {
  double f1n = 0.0;   // sum_{i != elim} a_{1i} h1(anchor, i)
  double sn = 0.0;    // sum_{i != elim} a_{1i} h1(elim, i)
  double g1n = 0.0;   // h1(anchor, elim) * sn
  double h_nn = 0.0;  // h1(elim, elim)
  double h_1n = 0.0;  // h1(anchor, elim)
  double a_coef = 0.0;
  double b_coef = 0.0;
  double c_coef = 0.0;
  double lambda1 = 0.0;  // pinned eigenvalue
  double eps_anchor = 0.0;
  double eps_elim = 0.0;
  double a11 = 0.0;  // ground-state amplitude on the anchor state
};

/// Assemble the constraint quadratic for eliminating basis state `elim`
/// while projecting on basis state `anchor` (both 0-based). `es` must be the
/// decomposition of full_matrix(h) and `lambda1` the eigenvalue to pin.
inline QuadraticBuild build_quadratic(const Hamiltonian& h,
                                      const EigenSystem& es, double lambda1,
                                      std::size_t anchor, std::size_t elim) {
  const std::size_t k = h.dim();
  if (es.dim() != k)
    fail(Errc::shape_mismatch, "build_quadratic: eigen system dimension mismatch");
  if (anchor >= k || elim >= k)
    fail(Errc::shape_mismatch, "build_quadratic: index out of range");
  if (anchor == elim)
    fail(Errc::invalid_config, "build_quadratic: anchor and elim must differ");

  const Vec amp = es.ground_components();
  QuadraticBuild qb;
  qb.lambda1 = lambda1;
  qb.eps_anchor = h.eps[anchor];
  qb.eps_elim = h.eps[elim];
  qb.a11 = amp[anchor];
  if (std::abs(qb.a11) < 1e-12)
    fail(Errc::degenerate_anchor,
         "ground state has no overlap with anchor state " +
             std::to_string(anchor) + " (|a11| = " + std::to_string(qb.a11) +
             "); the projected constraint is vacuous");

  for (std::size_t i = 0; i < k; ++i) {
    if (i == elim) continue;
    qb.f1n += amp[i] * h.h1(anchor, i);
    qb.sn += amp[i] * h.h1(elim, i);
  }
  qb.h_1n = h.h1(anchor, elim);
  qb.h_nn = h.h1(elim, elim);
  qb.g1n = qb.h_1n * qb.sn;

  qb.a_coef = qb.g1n - qb.h_nn * qb.f1n;
  qb.b_coef = qb.a11 * qb.h_nn * (lambda1 - qb.eps_anchor) +
              qb.f1n * (lambda1 - qb.eps_elim);
  qb.c_coef = -qb.a11 * (lambda1 - qb.eps_anchor) * (lambda1 - qb.eps_elim);
  return qb;
}

struct RootSelection {
  std::vector<double> roots;  // ascending; one entry in the linear case
  std::size_t chosen_index = 0;
  double chosen = 0.0;
  double discriminant = 0.0;
};

/// Solve a*g^2 + b*g + c = 0 and pick the real root closest to g_prev.
/// Ties go to the root of smaller magnitude, then to the smaller root.
/// A negligible leading coefficient falls back to the linear equation.
inline RootSelection solve_continuity(double a, double b, double c,
                                      double g_prev) {
  RootSelection sel;
  sel.discriminant = b * b - 4.0 * a * c;

  const double abs_a = std::abs(a), abs_b = std::abs(b), abs_c = std::abs(c);
  if (abs_a == 0.0 && abs_b == 0.0 && abs_c == 0.0)
    fail(Errc::no_real_solution, "all quadratic coefficients are zero");

  if (abs_a <= 1e-14 * std::max(abs_b, abs_c)) {
    if (abs_b <= 1e-14 * abs_c)
      fail(Errc::no_real_solution,
           "leading and linear coefficients vanish but constant term does not");
    sel.roots = {-c / b};
  } else {
    const double scale_sq = std::max(b * b, std::abs(4.0 * a * c));
    if (sel.discriminant < -1e-12 * scale_sq)
      fail(Errc::complex_roots,
           "constraint quadratic has complex roots (discriminant " +
               std::to_string(sel.discriminant) + ")");
    const double sd = std::sqrt(std::max(sel.discriminant, 0.0));
    const double q = -0.5 * (b + std::copysign(sd, b));
    double r1, r2;
    if (q == 0.0) {
      r1 = r2 = 0.0;  // b == 0 and disc == 0
    } else {
      r1 = q / a;
      r2 = c / q;
    }
    sel.roots = {std::min(r1, r2), std::max(r1, r2)};
  }

  auto key = [&](double r) {
    return std::make_tuple(std::abs(r - g_prev), std::abs(r), r);
  };
  sel.chosen_index = 0;
  for (std::size_t i = 1; i < sel.roots.size(); ++i)
    if (key(sel.roots[i]) < key(sel.roots[sel.chosen_index]))
      sel.chosen_index = i;
  sel.chosen = sel.roots[sel.chosen_index];
  return sel;
}

struct FlowStep {
  std::size_t dim_before = 0;
  std::size_t dim_after = 0;
  std::size_t elim_index = 0;  // index eliminated, in the current basis
  double g_before = 0.0;
  double g_after = 0.0;
  QuadraticBuild build;
  double discriminant = 0.0;
  std::vector<double> roots;
  std::size_t chosen_root_index = 0;
  double residual = 0.0;  // unexpanded constraint evaluated at g_after
  Vec spectrum_after;     // lowest m_track eigenvalues of the reduced H
  double lambda1_target_next = 0.0;
};

struct FlowTrace {
  ModelSpec model;
  FlowConfig config;
  Vec initial_spectrum;
  std::vector<FlowStep> steps;
  bool completed = true;
  std::string termination;  // empty when completed

  void check_contiguous() const {
    for (std::size_t i = 0; i < steps.size(); ++i) {
      if (steps[i].dim_after != steps[i].dim_before - 1 ||
          (i > 0 && steps[i].dim_before != steps[i - 1].dim_after))
        fail(Errc::invalid_dimension, "flow steps are not contiguous");
    }
  }
};

namespace detail {

inline std::size_t select_elimination(const Hamiltonian& h,
                                      const FlowConfig& cfg) {
  const std::size_t k = h.dim();
  const std::size_t anchor = cfg.anchor_index;
  if (cfg.elimination_order == EliminationOrder::highest_index_first) {
    std::size_t e = k - 1;
    if (e == anchor) e = k - 2;
    return e;
  }
  // highest eps wins; ties go to the larger index; the anchor survives
  std::size_t best = (anchor == 0) ? 1 : 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (i == anchor) continue;
    if (h.eps[i] >= h.eps[best]) best = i;
  }
  return best;
}

inline double step_scale(double lambda1_target, const EigenSystem& es) {
  return std::max({1.0, std::abs(lambda1_target), std::abs(es.values.front()),
                   std::abs(es.values.back())});
}

}  // namespace detail

/// One elimination step: fix the renormalised coupling by pinning
/// `lambda1_target`, then drop the selected basis state. Returns the reduced
/// Hamiltonian and the step record.
inline std::pair<Hamiltonian, FlowStep> reduction_step(
    const Hamiltonian& h, double lambda1_target, const FlowConfig& cfg) {
  cfg.validate();
  h.validate();
  const std::size_t k = h.dim();
  if (k <= cfg.n_min)
    fail(Errc::invalid_dimension,
         "reduction_step: dimension already at or below n_min");
  if (cfg.anchor_index >= k)
    fail(Errc::invalid_config, "anchor index out of range");

  const EigenSystem es = eigen_decompose(full_matrix(h));
  const std::size_t anchor = cfg.anchor_index;
  const std::size_t elim = detail::select_elimination(h, cfg);
  const std::string ctx = " (dim " + std::to_string(k) + ", eliminating index " +
                          std::to_string(elim) + ")";

  FlowStep step;
  step.dim_before = k;
  step.dim_after = k - 1;
  step.elim_index = elim;
  step.g_before = h.g;

  try {
    step.build = build_quadratic(h, es, lambda1_target, anchor, elim);
    const RootSelection sel = solve_continuity(
        step.build.a_coef, step.build.b_coef, step.build.c_coef, h.g);
    step.roots = sel.roots;
    step.chosen_root_index = sel.chosen_index;
    step.discriminant = sel.discriminant;
    step.g_after = sel.chosen;
  } catch (const Error& e) {
    fail(e.code(), std::string(e.what()) + ctx);
  }

  const double scale = detail::step_scale(lambda1_target, es);
  const double denom =
      lambda1_target - step.build.eps_elim - step.g_after * step.build.h_nn;
  if (std::abs(denom) < 1e-12 * scale)
    fail(Errc::near_singular_denominator,
         "effective-interaction denominator " + std::to_string(denom) +
             " is below 1e-12 * scale" + ctx);

  step.residual = step.build.eps_anchor * step.build.a11 +
                  step.g_after * step.build.f1n +
                  step.g_after * step.g_after * step.build.h_1n *
                      step.build.sn / denom -
                  lambda1_target * step.build.a11;
  if (std::abs(step.residual) > cfg.residual_tol * scale)
    fail(Errc::residual_out_of_tolerance,
         "constraint residual " + std::to_string(step.residual) +
             " exceeds tolerance" + ctx);

  Hamiltonian next;
  next.g = step.g_after;
  next.h1 = h.h1.without_index(elim);
  next.eps.reserve(k - 1);
  for (std::size_t i = 0; i < k; ++i)
    if (i != elim) next.eps.push_back(h.eps[i]);

  const EigenSystem es_next = eigen_decompose(full_matrix(next));
  const std::size_t m = std::min<std::size_t>(cfg.m_track, k - 1);
  step.spectrum_after.assign(es_next.values.begin(),
                             es_next.values.begin() + m);
  step.lambda1_target_next = (cfg.target_mode == TargetMode::running)
                                 ? es_next.values.front()
                                 : lambda1_target;
  return {std::move(next), std::move(step)};
}

/// Iterate reduction steps from dim(h0) down to cfg.n_min. A step failure
/// stops the flow; the partial trace carries the termination reason.
inline FlowTrace run_flow(const Hamiltonian& h0, const FlowConfig& cfg,
                          ModelSpec model = ModelSpec{}) {
  cfg.validate();
  h0.validate();
  if (h0.dim() <= cfg.n_min)
    fail(Errc::invalid_dimension, "run_flow: initial dimension must exceed n_min");
  if (model.n == 0) model = in_memory_spec(h0);

  FlowTrace trace;
  trace.model = model;
  trace.config = cfg;

  const EigenSystem es0 = eigen_decompose(full_matrix(h0));
  const std::size_t m0 = std::min<std::size_t>(cfg.m_track, h0.dim());
  trace.initial_spectrum.assign(es0.values.begin(), es0.values.begin() + m0);

  double target = es0.values.front();
  Hamiltonian cur = h0;
  while (cur.dim() > cfg.n_min) {
    try {
      auto [next, step] = reduction_step(cur, target, cfg);
      target = step.lambda1_target_next;
      trace.steps.push_back(std::move(step));
      cur = std::move(next);
    } catch (const Error& e) {
      trace.completed = false;
      trace.termination = std::string(errc_name(e.code())) + ": " + e.what();
      break;
    }
  }
  return trace;
}

/// Per-step coupling increments g_after - g_before, in step order.
inline Vec flow_derivative(const FlowTrace& trace) {
  Vec dg;
  dg.reserve(trace.steps.size());
  for (const FlowStep& s : trace.steps) dg.push_back(s.g_after - s.g_before);
  return dg;
}

}  // namespace hsflow
