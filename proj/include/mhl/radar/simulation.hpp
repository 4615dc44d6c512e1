#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "mhl/radar/types.hpp"

namespace mhl::radar {

struct TruthTarget {
  int index = 0;
  double x = 0, y = 0, vx = 0, vy = 0;
  bool scripted = false;
};

struct TruthRecord {
  Tick tick;
  int index;
  double x, y;
};

/// Ground truth and a rotating radar that reports one batch of detections per
/// full turn. All randomness comes from one seeded engine, so a seed fixes the
/// whole scan sequence.
class Simulator {
 public:
  /// The tracker's config checks are not applied here: a simulator with
  /// pd = 0 is meaningful (it sees only clutter) even though a tracker is not.
  explicit Simulator(RadarConfig cfg) : cfg_(std::move(cfg)), rng_(cfg_.seed) {
    if (cfg_.pd < 0 || cfg_.pd > 1) throw Error(Errc::InvalidConfig, "pd: must be in [0,1]");
    if (!cfg_.scripted.empty()) {
      for (const auto& s : cfg_.scripted)
        targets_.push_back({static_cast<int>(targets_.size()), s.x, s.y, s.vx, s.vy, true});
    } else {
      layoutGrid();
    }
  }

  const std::vector<TruthTarget>& targets() const { return targets_; }
  Tick tick() const { return tick_; }

  /// Advances the truth by one scan period and returns that scan.
  Scan step() {
    ++tick_;
    for (auto& t : targets_) move(t);
    Scan scan;
    scan.tick = tick_;
    std::bernoulli_distribution detect(cfg_.pd);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (const auto& t : targets_) {
      if (!detect(rng_)) continue;
      Point z{t.x + cfg_.sigmaZ * noise(rng_), t.y + cfg_.sigmaZ * noise(rng_)};
      if (std::hypot(z[0], z[1]) <= cfg_.radius) scan.detections.push_back({z, t.index});
    }
    std::poisson_distribution<int> clutter(cfg_.clutterRate);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int n = cfg_.clutterRate > 0 ? clutter(rng_) : 0;
    for (int i = 0; i < n; ++i) {
      const double r = cfg_.radius * std::sqrt(unit(rng_));
      const double a = 2 * std::numbers::pi * unit(rng_);
      scan.detections.push_back({{r * std::cos(a), r * std::sin(a)}, -1});
    }
    std::shuffle(scan.detections.begin(), scan.detections.end(), rng_);
    return scan;
  }

  std::vector<TruthRecord> truth() const {
    std::vector<TruthRecord> out;
    for (const auto& t : targets_) out.push_back({tick_, t.index, t.x, t.y});
    return out;
  }

 private:
  // Targets start on a jittered square grid covering the inner part of the disc.
  void layoutGrid() {
    const int n = cfg_.targets;
    if (n == 0) return;
    const int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
    const double extent = 1.4 * cfg_.radius / std::sqrt(2.0);
    const double spacing = extent / side;
    std::uniform_real_distribution<double> jitter(-0.2 * spacing, 0.2 * spacing);
    std::uniform_real_distribution<double> heading(0.0, 2 * std::numbers::pi);
    std::uniform_real_distribution<double> speed(cfg_.minSpeed, cfg_.maxSpeed);
    for (int i = 0; i < n; ++i) {
      const double cx = -extent / 2 + spacing * (i % side + 0.5);
      const double cy = -extent / 2 + spacing * (i / side + 0.5);
      const double h = heading(rng_), s = speed(rng_);
      targets_.push_back({i, cx + jitter(rng_), cy + jitter(rng_), s * std::cos(h), s * std::sin(h), false});
    }
  }

  void move(TruthTarget& t) {
    if (!t.scripted) {
      std::normal_distribution<double> dh(0.0, cfg_.headingStd), ds(0.0, cfg_.speedStd);
      double h = std::atan2(t.vy, t.vx) + dh(rng_);
      double s = std::clamp(std::hypot(t.vx, t.vy) + ds(rng_), cfg_.minSpeed, cfg_.maxSpeed);
      t.vx = s * std::cos(h);
      t.vy = s * std::sin(h);
    }
    t.x += t.vx * cfg_.scanPeriod;
    t.y += t.vy * cfg_.scanPeriod;
    const double r = std::hypot(t.x, t.y);
    if (!t.scripted && r > 0.9 * cfg_.radius) {
      // Reflect the velocity off the boundary circle.
      const double nx = t.x / r, ny = t.y / r;
      const double dot = t.vx * nx + t.vy * ny;
      if (dot > 0) {
        t.vx -= 2 * dot * nx;
        t.vy -= 2 * dot * ny;
      }
    }
  }

  RadarConfig cfg_;
  std::mt19937_64 rng_;
  std::vector<TruthTarget> targets_;
  Tick tick_ = 0;
};

}  // namespace mhl::radar
