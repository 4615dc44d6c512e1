#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "mhl/radar/simulation.hpp"
#include "mhl/radar/tracker.hpp"
#include "json.hpp"

namespace mhl::radar {

struct RunReport {
  std::vector<StepMetrics> rows;
  double meanMicros = 0.0;    // per scan, warm-up scans excluded
  double stddevMicros = 0.0;  // same population
  std::size_t peakClusterLeaves = 0;
  double association = 0.0;   // see associationScore
  std::vector<std::vector<TargetPositionFact>> bestFacts;  // per scan
};

namespace detail {

inline std::ofstream openOut(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(Errc::InvalidConfig, "out_dir: cannot write " + p.string());
  return out;
}

inline void meanStd(const std::vector<double>& xs, double& mean, double& sd) {
  mean = sd = 0.0;
  if (xs.empty()) return;
  mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() < 2) return;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace detail

/// Simulates and tracks one scenario. With an output directory it writes
/// truth.jsonl and tracks.jsonl (one {"tick","id","x","y"} object per line),
/// metrics.csv (deterministic for a seed) and timing.csv (wall clock).
inline RunReport runScenario(const RadarConfig& cfg, const std::optional<std::filesystem::path>& outDir = {}) {
  cfg.validate();
  Simulator sim(cfg);
  Tracker tracker(cfg);
  RunReport report;
  std::vector<std::vector<Association>> assoc;

  std::ofstream truth, tracks, metrics, timing;
  if (outDir) {
    std::filesystem::create_directories(*outDir);
    truth = detail::openOut(*outDir / "truth.jsonl");
    tracks = detail::openOut(*outDir / "tracks.jsonl");
    metrics = detail::openOut(*outDir / "metrics.csv");
    timing = detail::openOut(*outDir / "timing.csv");
    metrics << "tick,cluster_count,total_leaves,max_cluster_leaves,confirmed_events\n";
    timing << "tick,wall_time_us\n";
  }

  std::vector<double> times;
  for (int s = 0; s < cfg.scans; ++s) {
    const Scan scan = sim.step();
    const StepMetrics m = tracker.step(scan);
    report.rows.push_back(m);
    if (s >= cfg.warmup) times.push_back(m.wallMicros);
    report.peakClusterLeaves = std::max(report.peakClusterLeaves, m.maxLeaves);
    auto best = tracker.bestFacts();
    assoc.push_back(associate(scan, best));

    if (outDir) {
      for (const auto& t : sim.truth())
        truth << nlohmann::json{{"tick", t.tick}, {"id", t.index}, {"x", t.x}, {"y", t.y}}.dump() << '\n';
      for (const auto& f : best)
        tracks << nlohmann::json{{"tick", scan.tick}, {"id", f.targetId}, {"x", f.mean[0]}, {"y", f.mean[1]}}.dump()
               << '\n';
      metrics << m.tick << ',' << m.clusters << ',' << m.totalLeaves << ',' << m.maxLeaves << ','
              << m.confirmedEvents << '\n';
      timing << m.tick << ',' << std::llround(m.wallMicros) << '\n';
    }
    report.bestFacts.push_back(std::move(best));
  }
  detail::meanStd(times, report.meanMicros, report.stddevMicros);
  report.association = associationScore(assoc);
  return report;
}

struct SweepRow {
  int targets = 0;
  double meanMicros = 0.0;
  double stddevMicros = 0.0;  // across repetitions
  std::size_t peakClusterLeaves = 0;
};

/// `base` at `targets` = count: the radius grows with the square root of the
/// count and both clutter and birth rates grow linearly, so target density
/// and clutter per unit area stay those of `base` at `referenceCount`.
inline RadarConfig scaledConfig(RadarConfig base, int count, int referenceCount = 10) {
  const double k = static_cast<double>(count) / referenceCount;
  base.targets = count;
  base.radius *= std::sqrt(k);
  base.clutterRate *= k;
  base.newTargetRate *= k;
  base.scripted.clear();
  return base;
}

/// Runs every count `reps` times with seeds base.seed, base.seed + 1, ...
inline std::vector<SweepRow> scalingSweep(const RadarConfig& base, const std::vector<int>& counts, int reps,
                                          int referenceCount = 10) {
  std::vector<SweepRow> rows;
  for (int n : counts) {
    SweepRow row;
    row.targets = n;
    std::vector<double> means;
    for (int r = 0; r < reps; ++r) {
      RadarConfig cfg = scaledConfig(base, n, referenceCount);
      cfg.seed = base.seed + static_cast<std::uint64_t>(r);
      auto rep = runScenario(cfg);
      means.push_back(rep.meanMicros);
      row.peakClusterLeaves = std::max(row.peakClusterLeaves, rep.peakClusterLeaves);
    }
    detail::meanStd(means, row.meanMicros, row.stddevMicros);
    rows.push_back(row);
  }
  return rows;
}

inline void writeSweepCsv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto out = detail::openOut(path);
  out << "target_count,mean_time_us,stddev_us,peak_cluster_leaves\n";
  for (const auto& r : rows)
    out << r.targets << ',' << std::llround(r.meanMicros) << ',' << std::llround(r.stddevMicros) << ','
        << r.peakClusterLeaves << '\n';
}

}  // namespace mhl::radar
