#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <unordered_map>
#include <vector>

#include "mhl/radar/generator.hpp"
#include "mhl/world.hpp"

namespace mhl::radar {

using RadarWorld = World<RadarEvent, TargetPositionFact>;
using RadarCluster = Cluster<RadarEvent, TargetPositionFact>;
using RadarChange = Change<RadarEvent, TargetPositionFact>;

/// Live facts by id and by target, kept current from change notifications.
class FactRegistry {
 public:
  void apply(const RadarChange& ch) {
    if (ch.kind == ChangeKind::FactAdded) {
      facts_[ch.factId] = *ch.fact;
      byTarget_[ch.fact->targetId].insert(ch.factId);
    } else if (ch.kind == ChangeKind::FactRemoved) {
      auto it = facts_.find(ch.factId);
      if (it == facts_.end()) return;
      auto t = byTarget_.find(it->second.targetId);
      t->second.erase(ch.factId);
      if (t->second.empty()) byTarget_.erase(t);
      facts_.erase(it);
    }
  }

  const std::map<FactId, TargetPositionFact>& facts() const { return facts_; }
  const std::map<std::uint64_t, std::set<FactId>>& byTarget() const { return byTarget_; }

  std::vector<TargetPositionFact> payloads() const {
    std::vector<TargetPositionFact> out;
    out.reserve(facts_.size());
    for (const auto& [id, f] : facts_) out.push_back(f);
    return out;
  }

 private:
  std::map<FactId, TargetPositionFact> facts_;
  std::map<std::uint64_t, std::set<FactId>> byTarget_;
};

/// Splits a scan into batches: measurements are tied together when they fall
/// in the gate of any version of the same target. Batches come out ordered
/// by their first measurement.
inline std::vector<Batch> planScan(const RadarConfig& cfg, const Scan& scan, std::span<const TargetPositionFact> facts) {
  const CvModel model{cfg.sigmaA, cfg.sigmaZ};
  const std::size_t nm = scan.detections.size();

  // Measurements sorted by x for range queries around each predicted position.
  std::vector<std::size_t> byX(nm);
  for (std::size_t i = 0; i < nm; ++i) byX[i] = i;
  std::sort(byX.begin(), byX.end(), [&](std::size_t a, std::size_t b) {
    return scan.detections[a].z[0] < scan.detections[b].z[0];
  });

  std::vector<TargetPositionFact> distinct(facts.begin(), facts.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  std::map<std::uint64_t, std::size_t> targetNode;
  std::vector<std::pair<std::size_t, std::uint64_t>> edges;
  for (const auto& f : distinct) {
    const Gaussian pred = predictTo(model, f, scan.tick, cfg.scanPeriod);
    const Mat2 S = pred.cov.topLeftCorner<2, 2>() + model.measurementNoise();
    const double lmax = 0.5 * (S.trace() + std::sqrt(std::pow(S(0, 0) - S(1, 1), 2) + 4 * S(0, 1) * S(0, 1)));
    const double reach = std::sqrt(cfg.gate * lmax) + 1e-9;
    const double px = pred.mean(0), py = pred.mean(1);
    auto lo = std::lower_bound(byX.begin(), byX.end(), px - reach,
                               [&](std::size_t i, double v) { return scan.detections[i].z[0] < v; });
    for (auto it = lo; it != byX.end() && scan.detections[*it].z[0] <= px + reach; ++it) {
      const Point& z = scan.detections[*it].z;
      if (std::abs(z[1] - py) > reach) continue;
      if (inGate(model.innovate(pred, Vec2(z[0], z[1])).d2, cfg.gate)) edges.emplace_back(*it, f.targetId);
    }
  }

  for (const auto& [m, t] : edges) targetNode.emplace(t, 0);
  std::size_t next = nm;
  for (auto& [t, node] : targetNode) node = next++;
  mhl::detail::UnionFind uf(next);
  for (const auto& [m, t] : edges) uf.unite(m, targetNode.at(t));

  std::map<std::size_t, std::size_t> batchOf;  // union-find root -> batch index
  std::vector<Batch> batches;
  for (std::size_t m = 0; m < nm; ++m) {
    auto [it, fresh] = batchOf.emplace(uf.find(m), batches.size());
    if (fresh) batches.push_back(Batch{scan.tick, {}, {}, {}});
    batches[it->second].measurements.push_back(m);
    batches[it->second].z.push_back(scan.detections[m].z);
  }
  for (const auto& [t, node] : targetNode) batches[batchOf.at(uf.find(node))].targets.push_back(t);
  return batches;
}

/// Facts eligible for the timeout branch at `tick`, grouped by target.
inline std::map<std::uint64_t, std::vector<TargetPositionFact>> overdue(const RadarConfig& cfg, Tick tick,
                                                                        std::span<const TargetPositionFact> facts) {
  std::map<std::uint64_t, std::vector<TargetPositionFact>> out;
  for (const auto& f : facts)
    if (tick - f.lastDetection > cfg.timeout) out[f.targetId].push_back(f);
  return out;
}

struct StepMetrics {
  Tick tick = 0;
  double wallMicros = 0.0;  // time spent in Tracker::step
  std::size_t clusters = 0;
  std::size_t totalLeaves = 0;
  std::size_t maxLeaves = 0;
  std::size_t confirmedEvents = 0;  // events flushed as certain during the step
  std::size_t batches = 0;
};

/// The radar application on top of a World: one generation per measurement
/// batch, then one per overdue target.
class Tracker {
 public:
  explicit Tracker(RadarConfig cfg, bool prune = true) : cfg_(std::move(cfg)) {
    cfg_.validate();
    if (prune) {
      std::vector<PruneStrategy> s;
      if (cfg_.pruneRatio > 0) s.push_back(PruneStrategy::ratioThreshold(cfg_.pruneRatio));
      s.push_back(PruneStrategy::bestK(cfg_.pruneK));
      if (cfg_.pruneDepth > 0) s.push_back(PruneStrategy::depthLimit(cfg_.pruneDepth));
      world_.setPruneStrategies(std::move(s));
      world_.setRelevancePredicate([](const RadarCluster& c) { return !c.facts.empty(); });
    }
    world_.subscribeChanges([this](const RadarChange& ch) { registry_.apply(ch); });
    world_.setCertainEventSink([this](const Event<RadarEvent>& e, ClusterId) {
      ++confirmed_;
      certain_.push_back(e);
    });
  }

  /// Replaces the relevance predicate (an empty one disables collapsing).
  void setRelevancePredicate(RelevancePredicate<RadarEvent, TargetPositionFact> p) {
    world_.setRelevancePredicate(std::move(p));
  }

  StepMetrics step(const Scan& scan) {
    const auto start = std::chrono::steady_clock::now();
    confirmed_ = 0;
    const auto payloads = registry_.payloads();
    const auto plan = planScan(cfg_, scan, payloads);
    for (const Batch& b : plan) world_.generate({}, requestFor(b.targets, scan.tick, false), measurementGenerator(cfg_, b));

    const auto after = registry_.payloads();
    for (const auto& [target, fs] : overdue(cfg_, scan.tick, after))
      world_.generate({}, requestFor({target}, scan.tick, true), terminationGenerator(cfg_, scan.tick));
    const auto stop = std::chrono::steady_clock::now();

    StepMetrics m;
    m.tick = scan.tick;
    m.wallMicros = std::chrono::duration<double, std::micro>(stop - start).count();
    m.clusters = world_.clusters().size();
    for (const auto& [cid, c] : world_.clusters()) {
      m.totalLeaves += c.leaves.size();
      m.maxLeaves = std::max(m.maxLeaves, c.leaves.size());
    }
    m.confirmedEvents = confirmed_;
    m.batches = plan.size();
    return m;
  }

  /// Facts of the most probable global hypothesis: the best leaf of every cluster.
  std::vector<TargetPositionFact> bestFacts() const {
    std::vector<TargetPositionFact> out;
    for (const auto& [cid, c] : world_.clusters())
      for (FactId f : c.leaves.at(bestLeaf(c)).facts) out.push_back(c.facts.at(f).data);
    std::sort(out.begin(), out.end());
    return out;
  }

  const RadarWorld& world() const { return world_; }
  const FactRegistry& registry() const { return registry_; }
  const std::vector<Event<RadarEvent>>& certainEvents() const { return certain_; }
  const RadarConfig& config() const { return cfg_; }

 private:
  std::vector<FactId> requestFor(const std::vector<std::uint64_t>& targets, Tick tick, bool overdueOnly) const {
    std::vector<FactId> req;
    for (std::uint64_t t : targets) {
      auto it = registry_.byTarget().find(t);
      if (it == registry_.byTarget().end()) continue;
      for (FactId f : it->second) {
        const auto& fact = registry_.facts().at(f);
        if (fact.lastDetection >= tick) continue;
        if (overdueOnly && tick - fact.lastDetection <= cfg_.timeout) continue;
        req.push_back(f);
      }
    }
    return req;
  }

  RadarConfig cfg_;
  RadarWorld world_;
  FactRegistry registry_;
  std::vector<Event<RadarEvent>> certain_;
  std::size_t confirmed_ = 0;
};

/// Which track, on the best global hypothesis, took each target-originated
/// measurement of a scan.
struct Association {
  int truth;
  std::optional<std::uint64_t> track;
};

inline std::vector<Association> associate(const Scan& scan, std::span<const TargetPositionFact> best) {
  std::vector<Association> out;
  for (const auto& d : scan.detections) {
    if (d.truth < 0) continue;
    Association a{d.truth, std::nullopt};
    for (const auto& f : best)
      if (f.lastDetection == scan.tick && f.lastMeasurement == d.z) a.track = f.targetId;
    out.push_back(a);
  }
  return out;
}

/// Fraction of scans in which every detected target's measurement went to
/// that target's track. A target's track is the one its measurements were
/// most often assigned to over the run.
inline double associationScore(const std::vector<std::vector<Association>>& perScan) {
  std::map<int, std::map<std::uint64_t, std::size_t>> votes;
  for (const auto& scan : perScan)
    for (const auto& a : scan)
      if (a.track) ++votes[a.truth][*a.track];
  std::map<int, std::uint64_t> owner;
  for (const auto& [truth, v] : votes)
    owner[truth] = std::max_element(v.begin(), v.end(), [](auto& a, auto& b) { return a.second < b.second; })->first;
  if (perScan.empty()) return 1.0;
  std::size_t good = 0;
  for (const auto& scan : perScan) {
    bool ok = true;
    for (const auto& a : scan) ok = ok && a.track && owner.count(a.truth) && owner.at(a.truth) == *a.track;
    good += ok;
  }
  return static_cast<double>(good) / static_cast<double>(perScan.size());
}

}  // namespace mhl::radar
