#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "mhl/hypgen.hpp"
#include "mhl/radar/kalman.hpp"
#include "mhl/radar/types.hpp"

namespace mhl::radar {

using RadarHypothesis = Hypothesis<RadarEvent, TargetPositionFact>;
using RadarProvided = Provided<RadarEvent, TargetPositionFact>;
using RadarGenerator = HypothesisGenerator<RadarEvent, TargetPositionFact>;

/// Measurements of one scan whose hypotheses must be generated together.
struct Batch {
  Tick tick = 0;
  std::vector<std::size_t> measurements;  // indices into the scan
  std::vector<Point> z;                   // parallel to `measurements`
  std::vector<std::uint64_t> targets;     // target ids gated by any of them, sorted
};

/// Id given to a track started by measurement `index` of scan `tick`.
inline std::uint64_t newTargetId(Tick tick, std::size_t index) {
  return static_cast<std::uint64_t>(tick) * 100000u + index + 1;
}

struct Densities {
  double falseAlarm;
  double newTarget;
};

inline Densities densities(const RadarConfig& cfg) {
  const double area = std::numbers::pi * cfg.radius * cfg.radius;
  return {cfg.clutterRate / area, cfg.newTargetRate / area};
}

namespace detail {

inline std::vector<TargetPositionFact> sortedFacts(const RadarProvided& p) {
  std::vector<TargetPositionFact> out;
  for (const auto& f : p.facts) out.push_back(f.data);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

/// Enumerates every assignment of the batch's measurements to false alarm,
/// new target or one of the provided targets, each target taking at most one
/// measurement. The generator sorts provided facts by payload, so its output
/// does not depend on the order they arrive in.
inline std::vector<RadarHypothesis> enumerateAssignments(const RadarConfig& cfg, const Batch& batch,
                                                         const RadarProvided& provided) {
  const CvModel model{cfg.sigmaA, cfg.sigmaZ};
  const Densities dens = densities(cfg);
  const auto facts = detail::sortedFacts(provided);
  const std::size_t nm = batch.z.size(), nf = facts.size();

  std::vector<Gaussian> predicted;
  for (const auto& f : facts) predicted.push_back(predictTo(model, f, batch.tick, cfg.scanPeriod));
  // gated[m][j]: innovation of measurement m against target j, if inside the gate.
  std::vector<std::vector<std::optional<Innovation>>> gated(nm, std::vector<std::optional<Innovation>>(nf));
  for (std::size_t m = 0; m < nm; ++m)
    for (std::size_t j = 0; j < nf; ++j) {
      Innovation in = model.innovate(predicted[j], Vec2(batch.z[m][0], batch.z[m][1]));
      if (inGate(in.d2, cfg.gate)) gated[m][j] = in;
    }

  enum : int { FalseAlarm = -2, NewTarget = -1 };
  std::vector<int> role(nm);
  std::vector<bool> used(nf, false);
  std::vector<RadarHypothesis> out;

  // With pd = 1 a provided track that misses every gate in this leaf would
  // make all of the leaf's hypotheses impossible; the floor keeps one admissible.
  const double miss = std::max(1.0 - cfg.pd, 1e-12);
  auto emit = [&](double p) {
    RadarHypothesis h;
    for (std::size_t j = 0; j < nf; ++j)
      if (!used[j]) p *= miss;
    if (!(p > 0.0)) return;
    h.probability = p;
    for (std::size_t m = 0; m < nm; ++m) {
      const Point& z = batch.z[m];
      if (role[m] == FalseAlarm) {
        if (cfg.emitEvents) h.events.push_back({{EventKind::FalseAlarm, 0, {}, z, batch.tick}, batch.tick});
      } else if (role[m] == NewTarget) {
        const auto id = newTargetId(batch.tick, batch.measurements[m]);
        TargetPositionFact f;
        f.targetId = id;
        storeGaussian(model.initiate(Vec2(z[0], z[1]), cfg.initialVelocityStd), f);
        f.lastDetection = batch.tick;
        f.lastMeasurement = z;
        h.facts.push_back(f);
        if (cfg.emitEvents) h.events.push_back({{EventKind::TrackInitiated, id, {}, z, batch.tick}, batch.tick});
      } else {
        const auto& old = facts[static_cast<std::size_t>(role[m])];
        TargetPositionFact f = old;
        storeGaussian(model.update(predicted[static_cast<std::size_t>(role[m])], Vec2(z[0], z[1])), f);
        f.lastDetection = batch.tick;
        f.lastMeasurement = z;
        h.facts.push_back(f);
        if (cfg.emitEvents)
          h.events.push_back({{EventKind::TargetMoved, f.targetId, {old.mean[0], old.mean[1]}, {f.mean[0], f.mean[1]},
                               batch.tick},
                              batch.tick});
      }
    }
    for (std::size_t j = 0; j < nf; ++j)
      if (!used[j]) h.facts.push_back(facts[j]);
    out.push_back(std::move(h));
  };

  auto recurse = [&](auto&& self, std::size_t m, double p) -> void {
    if (m == nm) {
      emit(p);
      return;
    }
    role[m] = FalseAlarm;
    self(self, m + 1, p * dens.falseAlarm);
    role[m] = NewTarget;
    self(self, m + 1, p * dens.newTarget);
    for (std::size_t j = 0; j < nf; ++j) {
      if (used[j] || !gated[m][j]) continue;
      used[j] = true;
      role[m] = static_cast<int>(j);
      self(self, m + 1, p * cfg.pd * gated[m][j]->likelihood);
      used[j] = false;
    }
  };
  recurse(recurse, 0, 1.0);
  return out;
}

inline RadarGenerator measurementGenerator(const RadarConfig& cfg, Batch batch) {
  return [cfg, batch = std::move(batch)](const RadarProvided& p) { return enumerateAssignments(cfg, batch, p); };
}

/// Branches every provided track that has gone `age` scans undetected into
/// terminated and merely missed. Beyond twice the timeout the track is
/// terminated outright.
inline std::vector<RadarHypothesis> terminationHypotheses(const RadarConfig& cfg, Tick tick,
                                                          const RadarProvided& provided) {
  std::vector<RadarHypothesis> out(1);
  out[0].probability = 1.0;
  for (const auto& f : detail::sortedFacts(provided)) {
    const auto age = tick - f.lastDetection;
    const double missed = age > 2 * cfg.timeout ? 0.0 : std::pow(1.0 - cfg.pd, static_cast<double>(age));
    std::vector<RadarHypothesis> next;
    for (const auto& h : out) {
      if (missed < 1.0) {
        RadarHypothesis t = h;
        t.probability *= 1.0 - missed;
        if (cfg.emitEvents)
          t.events.push_back({{EventKind::TrackTerminated, f.targetId, {f.mean[0], f.mean[1]}, {}, tick}, tick});
        next.push_back(std::move(t));
      }
      if (missed > 0.0) {
        RadarHypothesis k = h;
        k.probability *= missed;
        k.facts.push_back(f);
        next.push_back(std::move(k));
      }
    }
    out = std::move(next);
  }
  return out;
}

inline RadarGenerator terminationGenerator(const RadarConfig& cfg, Tick tick) {
  return [cfg, tick](const RadarProvided& p) { return terminationHypotheses(cfg, tick, p); };
}

}  // namespace mhl::radar
