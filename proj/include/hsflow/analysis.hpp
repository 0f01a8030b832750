#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "hsflow/error.hpp"
#include "hsflow/flow.hpp"

namespace hsflow {

struct FixedPointFlag {
  std::size_t dimension = 0;  // dimension before the step
  double g = 0.0;             // coupling after the step
  double abs_dg = 0.0;
};

struct FixedPointReport {
  std::vector<FixedPointFlag> flagged_steps;
  bool is_global_fixed_point = false;
  double tolerance_used = 0.0;
};

/// Flag every step whose coupling change satisfies
/// |dg| <= rel_tol * max(1, |g_before|). The flow sits at a global fixed
/// point when every step is flagged.
inline FixedPointReport detect_fixed_points(const FlowTrace& trace,
                                            double rel_tol = 1e-6) {
  if (trace.steps.empty())
    fail(Errc::invalid_dimension, "detect_fixed_points: empty trace");
  FixedPointReport rep;
  rep.tolerance_used = rel_tol;
  for (const FlowStep& s : trace.steps) {
    const double dg = std::abs(s.g_after - s.g_before);
    if (dg <= rel_tol * std::max(1.0, std::abs(s.g_before)))
      rep.flagged_steps.push_back({s.dim_before, s.g_after, dg});
  }
  rep.is_global_fixed_point = rep.flagged_steps.size() == trace.steps.size();
  return rep;
}

struct DegeneratePair {
  std::size_t i = 0;
  std::size_t j = 0;  // i < j
  double gap = 0.0;
};

/// Maximal run of consecutive indices chained by below-tolerance gaps.
struct Multiplet {
  std::size_t first = 0;
  std::size_t last = 0;
  std::size_t size() const { return last - first + 1; }
};

struct DegeneracyReport {
  std::vector<DegeneratePair> pairs;  // every pair with gap <= tolerance
  std::vector<Multiplet> multiplets;  // adjacent runs, transitively merged
  double gap_tolerance = 0.0;         // absolute, already scaled
};

/// Scan an ascending spectrum for near-degenerate levels. Listed pairs all
/// satisfy |lambda_j - lambda_i| <= rel_tol * max(1, max|lambda|);
/// multiplets chain adjacent below-tolerance gaps.
inline DegeneracyReport detect_degeneracies(const Vec& spectrum,
                                            double rel_tol = 1e-8) {
  const std::size_t n = spectrum.size();
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (spectrum[i] > spectrum[i + 1])
      fail(Errc::unsorted_spectrum,
           "detect_degeneracies: spectrum must be ascending");

  double scale = 1.0;
  for (double v : spectrum) scale = std::max(scale, std::abs(v));

  DegeneracyReport rep;
  rep.gap_tolerance = rel_tol * scale;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double gap = spectrum[j] - spectrum[i];
      if (gap > rep.gap_tolerance) break;  // ascending input
      rep.pairs.push_back({i, j, gap});
    }

  std::size_t start = 0;
  for (std::size_t i = 0; i + 1 <= n; ++i) {
    const bool chained =
        i + 1 < n && spectrum[i + 1] - spectrum[i] <= rep.gap_tolerance;
    if (!chained) {
      if (i > start) rep.multiplets.push_back({start, i});
      start = i + 1;
    }
  }
  return rep;
}

struct DriftRow {
  std::size_t dimension = 0;  // dimension after the step
  Vec drift;                  // lambda_k(dimension) - lambda_k(initial)
  double max_rel_drift = 0.0;
};

/// Per-step drift of each tracked eigenvalue relative to the initial
/// spectrum. The relative summary divides by max(|lambda_k(initial)|, floor)
/// with floor = 1e-12 * max(1, max|initial|).
inline std::vector<DriftRow> spectrum_drift(const FlowTrace& trace) {
  double scale = 1.0;
  for (double v : trace.initial_spectrum) scale = std::max(scale, std::abs(v));
  const double floor = 1e-12 * scale;

  std::vector<DriftRow> rows;
  rows.reserve(trace.steps.size());
  for (const FlowStep& s : trace.steps) {
    DriftRow row;
    row.dimension = s.dim_after;
    const std::size_t m =
        std::min(s.spectrum_after.size(), trace.initial_spectrum.size());
    for (std::size_t k = 0; k < m; ++k) {
      const double d = s.spectrum_after[k] - trace.initial_spectrum[k];
      row.drift.push_back(d);
      row.max_rel_drift =
          std::max(row.max_rel_drift,
                   std::abs(d) / std::max(std::abs(trace.initial_spectrum[k]),
                                          floor));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

struct OverlapRow {
  std::size_t dimension = 0;  // dimension before the step
  double a11_abs = 0.0;
};

/// |a11| per step: how much of the ground state sits on the anchor basis
/// state. A sharp drop means the ground state is migrating away from the
/// anchor, the symptom of a level crossing.
inline std::vector<OverlapRow> anchor_overlap_profile(const FlowTrace& trace) {
  std::vector<OverlapRow> rows;
  rows.reserve(trace.steps.size());
  for (const FlowStep& s : trace.steps)
    rows.push_back({s.dim_before, std::abs(s.build.a11)});
  return rows;
}

}  // namespace hsflow
