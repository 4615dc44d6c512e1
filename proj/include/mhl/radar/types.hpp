#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "mhl/errors.hpp"

namespace mhl::radar {

using Tick = std::int64_t;
using Point = std::array<double, 2>;

/// The single fact of the tracker: one target's filter state as of its last
/// detection. Covariance is row-major 4x4 over (x, y, vx, vy).
struct TargetPositionFact {
  std::uint64_t targetId = 0;
  std::array<double, 4> mean{};
  std::array<double, 16> cov{};
  Tick lastDetection = 0;
  Point lastMeasurement{};

  auto operator<=>(const TargetPositionFact&) const = default;
};

enum class EventKind : std::uint8_t { TrackInitiated, TrackTerminated, TargetMoved, FalseAlarm };

inline const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::TrackInitiated: return "TrackInitiated";
    case EventKind::TrackTerminated: return "TrackTerminated";
    case EventKind::TargetMoved: return "TargetMoved";
    case EventKind::FalseAlarm: return "FalseAlarm";
  }
  return "?";
}

/// All four event kinds share one payload; unused fields stay zero.
/// `from` is the previous position for TargetMoved, `to` the new position
/// (or the detection for TrackInitiated and FalseAlarm).
struct RadarEvent {
  EventKind kind = EventKind::FalseAlarm;
  std::uint64_t targetId = 0;
  Point from{};
  Point to{};
  Tick tick = 0;

  auto operator<=>(const RadarEvent&) const = default;
};

struct Measurement {
  Point z{};
  int truth = -1;  // index of the simulated target that produced it, -1 for clutter
};

struct Scan {
  Tick tick = 0;
  std::vector<Measurement> detections;
};

/// Initial state of a scripted target.
struct ScriptedTarget {
  double x = 0, y = 0, vx = 0, vy = 0;
};

struct RadarConfig {
  double radius = 5000.0;        // m
  double scanPeriod = 2.0;       // s
  double pd = 0.95;              // detection probability
  double clutterRate = 1.0;      // expected false alarms per scan
  double newTargetRate = 0.1;    // expected new targets per scan
  double sigmaZ = 20.0;          // measurement noise, m
  double sigmaA = 1.0;           // process noise, m/s^2
  double gate = 9.21;            // chi-square, 2 dof
  int timeout = 3;               // scans without detection before termination is considered
  double initialVelocityStd = 15.0;
  double headingStd = 0.05;      // rad per scan
  double speedStd = 0.5;         // m/s per scan
  double minSpeed = 3.0, maxSpeed = 8.0;
  int targets = 5;
  int scans = 100;
  std::uint64_t seed = 1;
  std::size_t pruneK = 10;
  double pruneRatio = 1e-3;
  std::size_t pruneDepth = 4;    // 0 disables
  bool emitEvents = true;
  int warmup = 5;
  std::vector<ScriptedTarget> scripted;  // when non-empty, replaces the random layout

  /// Throws InvalidConfig naming the first offending field.
  void validate() const {
    auto bad = [](const char* field, const std::string& why) {
      throw Error(Errc::InvalidConfig, std::string(field) + ": " + why);
    };
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(radius) || radius <= 0) bad("radius", "must be > 0");
    if (!finite(scanPeriod) || scanPeriod <= 0) bad("scan_period", "must be > 0");
    if (!finite(pd) || pd <= 0 || pd > 1) bad("pd", "must be in (0,1]");
    if (!finite(clutterRate) || clutterRate < 0) bad("clutter", "must be >= 0");
    if (!finite(newTargetRate) || newTargetRate < 0) bad("new_target_rate", "must be >= 0");
    if (clutterRate + newTargetRate <= 0) bad("new_target_rate", "clutter and new target rate cannot both be 0");
    if (!finite(sigmaZ) || sigmaZ < 0) bad("sigma_z", "must be >= 0");
    if (!finite(sigmaA) || sigmaA < 0) bad("sigma_a", "must be >= 0");
    if (!finite(gate) || gate <= 0) bad("gate", "must be > 0");
    if (timeout < 1) bad("timeout", "must be >= 1");
    if (!finite(initialVelocityStd) || initialVelocityStd <= 0) bad("initial_velocity_std", "must be > 0");
    if (!finite(headingStd) || headingStd < 0) bad("heading_std", "must be >= 0");
    if (!finite(speedStd) || speedStd < 0) bad("speed_std", "must be >= 0");
    if (!finite(minSpeed) || minSpeed < 0 || !finite(maxSpeed) || maxSpeed < minSpeed)
      bad("max_speed", "need 0 <= min_speed <= max_speed");
    if (targets < 0) bad("targets", "must be >= 0");
    if (scans < 1) bad("scans", "must be >= 1");
    if (pruneK < 1) bad("prune_k", "must be >= 1");
    if (!finite(pruneRatio) || pruneRatio < 0 || pruneRatio > 1) bad("prune_ratio", "must be in [0,1]");
    if (warmup < 0) bad("warmup", "must be >= 0");
  }
};

}  // namespace mhl::radar
