#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <string>
#include <thread>
#include <vector>

#include "hsflow/analysis.hpp"
#include "hsflow/flow.hpp"
#include "hsflow/models.hpp"
#include "hsflow/trace_io.hpp"

#include "json.hpp"

namespace hsflow {

struct SweepRequest {
  ModelSpec base;                  // kind and shape parameters; n/g0 ignored
  std::vector<std::size_t> n_values;
  std::vector<double> g0_values;
  FlowConfig flow;
  double fixed_point_tol = 1e-6;
  unsigned workers = 1;
};

struct SweepPointResult {
  std::size_t n = 0;
  double g0 = 0.0;
  FlowTrace trace;
  bool global_fixed_point = false;
  std::string status = "ok";  // "ok" or an error code string
};

/// Run one flow per (n, g0) grid point. Points execute concurrently up to
/// `workers` threads; results are merged by grid order, never by completion
/// order, so output is deterministic. Per-point failures are recorded and
/// the sweep continues.
inline std::vector<SweepPointResult> run_sweep(const SweepRequest& req) {
  if (req.n_values.empty() || req.g0_values.empty())
    fail(Errc::invalid_config, "sweep grid is empty");
  req.flow.validate();

  std::vector<SweepPointResult> results;
  std::vector<std::size_t> ns = req.n_values;
  std::vector<double> g0s = req.g0_values;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  std::sort(g0s.begin(), g0s.end());
  g0s.erase(std::unique(g0s.begin(), g0s.end()), g0s.end());

  for (std::size_t n : ns)
    for (double g0 : g0s) {
      SweepPointResult r;
      r.n = n;
      r.g0 = g0;
      results.push_back(std::move(r));
    }

  auto run_point = [&](SweepPointResult& r) {
    ModelSpec spec = req.base;
    spec.n = r.n;
    spec.g0 = r.g0;
    try {
      const Hamiltonian h = build_model_synced(spec);
      r.trace = run_flow(h, req.flow, spec);
      if (!r.trace.completed)
        r.status = r.trace.termination.substr(0, r.trace.termination.find(':'));
      if (!r.trace.steps.empty())
        r.global_fixed_point =
            detect_fixed_points(r.trace, req.fixed_point_tol)
                .is_global_fixed_point;
    } catch (const Error& e) {
      r.status = errc_name(e.code());
      r.trace.model = spec;
      r.trace.config = req.flow;
      r.trace.completed = false;
      r.trace.termination = std::string(errc_name(e.code())) + ": " + e.what();
    }
  };

  const unsigned workers =
      std::max(1u, std::min<unsigned>(req.workers, results.size()));
  if (workers == 1) {
    for (auto& r : results) run_point(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < results.size();
             i = next.fetch_add(1))
          run_point(results[i]);
      });
    for (auto& t : pool) t.join();
  }
  return results;
}

/// Aggregate CSV: one row per (grid point, dimension), sorted by grid
/// coordinates then descending dimension.
inline std::string sweep_to_csv(const std::vector<SweepPointResult>& results) {
  std::string out = "N,g0,n,g,lambda_1,status,global_fixed_point\n";
  for (const SweepPointResult& r : results) {
    const std::string tail = "," + r.status + "," +
                             (r.global_fixed_point ? "true" : "false") + "\n";
    out += std::to_string(r.n) + "," + format_real(r.g0) + "," +
           std::to_string(r.n) + "," + format_real(r.g0);
    if (!r.trace.initial_spectrum.empty())
      out += "," + format_real(r.trace.initial_spectrum.front());
    else
      out += ",";
    out += tail;
    for (const FlowStep& s : r.trace.steps) {
      out += std::to_string(r.n) + "," + format_real(r.g0) + "," +
             std::to_string(s.dim_after) + "," + format_real(s.g_after) + "," +
             format_real(s.spectrum_after.front()) + tail;
    }
  }
  return out;
}

inline void to_json(nlohmann::json& j, const SweepPointResult& r) {
  j = nlohmann::json{{"N", r.n},
                     {"g0", r.g0},
                     {"status", r.status},
                     {"global_fixed_point", r.global_fixed_point},
                     {"trace", r.trace}};
}

inline std::string sweep_to_json_text(
    const std::vector<SweepPointResult>& results) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : results) j.push_back(r);
  return j.dump(2) + "\n";
}

}  // namespace hsflow
