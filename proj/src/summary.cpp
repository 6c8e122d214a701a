#include "loopsim/summary.hpp"

#include <algorithm>
#include <charconv>

namespace loopsim {

std::string fmt_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string export_summary(const std::string& run_id, uint64_t seed, long horizon,
                           std::vector<SummaryRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const SummaryRow& a, const SummaryRow& b) {
    return a.metric != b.metric ? a.metric < b.metric : a.entity < b.entity;
  });
  std::string out = "run_id,seed,horizon,metric,entity,value\n";
  for (const SummaryRow& r : rows) {
    out += run_id + "," + std::to_string(seed) + "," + std::to_string(horizon) + "," + r.metric +
           "," + r.entity + "," + fmt_double(r.value) + "\n";
  }
  return out;
}

std::vector<SummaryRow> standard_summary(const Trajectory& traj, double fp_tol, long fp_window) {
  std::vector<SummaryRow> rows;
  auto all = traj.entities();
  auto viewers = traj.entities(EntityKind::viewer);

  for (EntityId e : all) {
    long n = static_cast<long>(traj.state_series(e).size());
    if (fp_window >= 1 && fp_window <= n) {
      auto fp = detect_fixed_point(traj, e, fp_tol, fp_window);
      rows.push_back({"fixed_point_t", e.str(), fp ? static_cast<double>(*fp) : -1.0});
    }
    if (e.kind != EntityKind::recommender)
      rows.push_back({"cumulative_engagement", e.str(), metrics::cumulative_engagement(traj, e)});
  }
  for (EntityId e : viewers) {
    bool dims_match = true;
    for (const TickRecord& r : traj.records())
      if (r.entity == e && r.x.vec.size() != r.u.size()) {
        dims_match = false;
        break;
      }
    if (dims_match && traj.horizon() > 0)
      rows.push_back({"welfare", e.str(), metrics::welfare(traj, e)});
    auto drift = metrics::preference_drift(traj, e);
    if (!drift.empty()) rows.push_back({"drift_final", e.str(), drift.back()});
  }
  if (viewers.size() >= 2) {
    long last = static_cast<long>(traj.state_series(viewers[0]).size()) - 1;
    rows.push_back({"homogenization_final", "all", metrics::homogenization(traj, last)});
  }
  rows.push_back({"departure_rate", "all", metrics::departure_rate(traj)});
  return rows;
}

std::string export_metrics_csv(const std::vector<metrics::MetricReport>& reports) {
  struct Row {
    std::string metric, entity;
    long t = -1;  // -1: scalar
    double value = 0.0;
  };
  std::vector<Row> rows;
  for (const auto& rep : reports) {
    if (rep.series.empty()) {
      rows.push_back({rep.name, rep.entity, -1, rep.value});
    } else {
      for (const auto& [t, v] : rep.series) rows.push_back({rep.name, rep.entity, t, v});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.metric != b.metric) return a.metric < b.metric;
    if (a.entity != b.entity) return a.entity < b.entity;
    return a.t < b.t;
  });
  std::string out = "metric,entity,t,value\n";
  for (const Row& r : rows) {
    out += r.metric + "," + r.entity + "," + (r.t < 0 ? "" : std::to_string(r.t)) + "," +
           fmt_double(r.value) + "\n";
  }
  return out;
}

std::vector<metrics::MetricReport> standard_metric_reports(const Trajectory& traj,
                                                           std::optional<int> active_slot) {
  std::vector<metrics::MetricReport> reports;
  auto viewers = traj.entities(EntityKind::viewer);

  for (EntityId e : traj.entities()) {
    if (e.kind == EntityKind::recommender) continue;
    metrics::MetricReport engagement;
    engagement.name = "cumulative_engagement";
    engagement.entity = e.str();
    engagement.value = metrics::cumulative_engagement(traj, e);
    reports.push_back(std::move(engagement));
  }

  for (EntityId e : viewers) {
    metrics::MetricReport drift;
    drift.name = "preference_drift";
    drift.entity = e.str();
    auto series = metrics::preference_drift(traj, e);
    for (size_t t = 0; t < series.size(); ++t)
      drift.series.emplace_back(static_cast<long>(t), series[t]);
    reports.push_back(std::move(drift));

    bool dims_match = true;
    for (const TickRecord& r : traj.records())
      if (r.entity == e && r.x.vec.size() != r.u.size()) {
        dims_match = false;
        break;
      }
    if (dims_match && traj.horizon() > 0) {
      metrics::MetricReport w;
      w.name = "welfare";
      w.entity = e.str();
      w.value = metrics::welfare(traj, e);
      reports.push_back(std::move(w));
    }
  }

  if (viewers.size() >= 2) {
    metrics::MetricReport homog;
    homog.name = "homogenization";
    homog.entity = "all";
    long n = static_cast<long>(traj.state_series(viewers[0]).size());
    for (long t = 0; t < n; ++t) homog.series.emplace_back(t, metrics::homogenization(traj, t));
    reports.push_back(std::move(homog));
  }

  metrics::MetricReport dep;
  dep.name = "departure_rate";
  dep.entity = "all";
  dep.value = active_slot ? metrics::departure_rate(traj, *active_slot)
                          : metrics::departure_rate(traj);
  reports.push_back(std::move(dep));
  return reports;
}

}  // namespace loopsim
