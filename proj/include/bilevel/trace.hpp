#pragma once

#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "bilevel/core.hpp"

namespace bilevel {

enum class RunStatus { ok, budget_exhausted };

inline const char* run_status_name(RunStatus s) {
  return s == RunStatus::ok ? "ok" : "budget_exhausted";
}

// One per-iteration record. The column meanings are fixed per solver:
// raf2ba/pragda use step_norm = UL step length and grad_est_norm = ||u||;
// sgm uses step_norm = LL step length, grad_est_norm = feasibility slack and
// k-column epoch = branch (1 = objective step, 0 = constraint step);
// igfm uses step_norm = UL step length and grad_est_norm = ||grad estimate||.
struct TraceRow {
  std::uint64_t iter = 0;
  std::int64_t epoch = 0;
  std::int64_t k = 0;
  double step_norm = 0.0;
  double grad_est_norm = 0.0;
  OracleCounter counters;  // cumulative
  std::uint64_t wall_ns = 0;
  // Solver-specific extra (minimax runs store the minimum Hessian eigenvalue
  // here when the instance carries an analytic Hessian). Not part of the
  // versioned CSV schema; persisted as a side artifact instead.
  double aux = std::numeric_limits<double>::quiet_NaN();
};

// Convergence trace plus run metadata. CSV schema is versioned through the
// library version recorded in the metadata; all numeric columns are printed
// with round-trip precision so identical runs serialize identically
// (wall_ns is the one clock-dependent column).
struct Trace {
  static constexpr const char* kCsvHeader =
      "iter,epoch,k,step_norm,grad_est_norm,gc_f,gc_g,jv_g,hv_g,val_f,val_g,zo_phi,"
      "wall_ns";

  std::vector<TraceRow> rows;
  std::vector<std::pair<std::string, std::string>> metadata;

  void set_meta(const std::string& key, const std::string& value);
  void set_meta(const std::string& key, double value);
  void set_meta(const std::string& key, std::uint64_t value);
  const std::string* find_meta(const std::string& key) const;

  // Metadata as '# key = value' comment lines, then header, then rows.
  void write_csv(std::ostream& os, bool with_metadata = true) const;
};

// Row-by-row equality over everything except wall clocks.
bool semantically_equal(const Trace& a, const Trace& b);

// Round-trip double formatting used by all file outputs ("%.17g").
std::string format_double(double v);

}  // namespace bilevel
