#pragma once

#include <optional>
#include <string>
#include <vector>

#include "loopsim/metrics.hpp"
#include "loopsim/trajectory.hpp"

namespace loopsim {

// shortest round-trip decimal form; identical across runs
std::string fmt_double(double v);

struct SummaryRow {
  std::string metric;
  std::string entity;
  double value = 0.0;
};

// CSV with header run_id,seed,horizon,metric,entity,value; rows sorted by
// (metric, entity) so re-export of the same trajectory is byte-identical.
std::string export_summary(const std::string& run_id, uint64_t seed, long horizon,
                           std::vector<SummaryRow> rows);

// The scalar digest written by `simulate`: fixed-point tick per entity,
// engagement and welfare per user, drift, homogenization, departure rate.
std::vector<SummaryRow> standard_summary(const Trajectory& traj, double fp_tol, long fp_window);

// CSV with header metric,entity,t,value (t empty for scalars), rows sorted by
// (metric, entity, t).
std::string export_metrics_csv(const std::vector<metrics::MetricReport>& reports);

// Per-tick series plus scalars recomputable from a trajectory alone.
// `active_slot` enables the departure metric for tag-less (file-loaded)
// trajectories: the given vec slot is read as the active flag.
std::vector<metrics::MetricReport> standard_metric_reports(const Trajectory& traj,
                                                           std::optional<int> active_slot);

}  // namespace loopsim
