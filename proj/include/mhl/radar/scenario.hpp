#pragma once

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "mhl/errors.hpp"
#include "mhl/radar/types.hpp"

namespace mhl::radar {

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] inline void badField(const std::string& field, int line, const std::string& why) {
  throw Error(Errc::InvalidConfig, field + ": " + why + " (line " + std::to_string(line) + ")");
}

template <class T>
T parseNumber(const std::string& field, const std::string& text, int line) {
  T v{};
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) badField(field, line, "cannot parse '" + text + "'");
  return v;
}

}  // namespace detail

/// Reads `key = value` lines on top of `base`. `#` starts a comment. Each
/// `target = x, y, vx, vy` line adds a scripted target. The result is
/// validated; errors name the offending field.
inline RadarConfig parseScenario(std::istream& in, RadarConfig base = {}) {
  using detail::parseNumber;
  RadarConfig cfg = std::move(base);
  std::map<std::string, std::function<void(const std::string&, int)>> setters;
  auto real = [&](const char* key, double& dst) {
    setters[key] = [key, &dst](const std::string& v, int line) { dst = parseNumber<double>(key, v, line); };
  };
  auto integer = [&](const char* key, auto& dst) {
    setters[key] = [key, &dst](const std::string& v, int line) {
      dst = parseNumber<std::remove_reference_t<decltype(dst)>>(key, v, line);
    };
  };
  real("radius", cfg.radius);
  real("scan_period", cfg.scanPeriod);
  real("pd", cfg.pd);
  real("clutter", cfg.clutterRate);
  real("new_target_rate", cfg.newTargetRate);
  real("sigma_z", cfg.sigmaZ);
  real("sigma_a", cfg.sigmaA);
  real("gate", cfg.gate);
  real("initial_velocity_std", cfg.initialVelocityStd);
  real("heading_std", cfg.headingStd);
  real("speed_std", cfg.speedStd);
  real("min_speed", cfg.minSpeed);
  real("max_speed", cfg.maxSpeed);
  real("prune_ratio", cfg.pruneRatio);
  integer("timeout", cfg.timeout);
  integer("targets", cfg.targets);
  integer("scans", cfg.scans);
  integer("seed", cfg.seed);
  integer("prune_k", cfg.pruneK);
  integer("prune_depth", cfg.pruneDepth);
  integer("warmup", cfg.warmup);
  setters["events"] = [&cfg](const std::string& v, int line) {
    if (v == "true" || v == "1")
      cfg.emitEvents = true;
    else if (v == "false" || v == "0")
      cfg.emitEvents = false;
    else
      detail::badField("events", line, "expected true or false");
  };
  bool scripted = false;
  setters["target"] = [&](const std::string& v, int line) {
    double xs[4];
    std::stringstream ss(v);
    std::string part;
    int n = 0;
    while (std::getline(ss, part, ',')) {
      if (n == 4) detail::badField("target", line, "expected x, y, vx, vy");
      xs[n++] = parseNumber<double>("target", detail::trim(part), line);
    }
    if (n != 4) detail::badField("target", line, "expected x, y, vx, vy");
    if (!scripted) cfg.scripted.clear();
    scripted = true;
    cfg.scripted.push_back({xs[0], xs[1], xs[2], xs[3]});
  };

  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string text = detail::trim(raw);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) detail::badField(detail::trim(text), line, "expected key = value");
    const std::string key = detail::trim(std::string_view(text).substr(0, eq));
    const std::string value = detail::trim(std::string_view(text).substr(eq + 1));
    auto it = setters.find(key);
    if (it == setters.end()) detail::badField(key, line, "unknown field");
    if (value.empty()) detail::badField(key, line, "missing value");
    it->second(value, line);
  }
  if (scripted) cfg.targets = static_cast<int>(cfg.scripted.size());
  cfg.validate();
  return cfg;
}

inline RadarConfig loadScenario(const std::string& path, RadarConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::InvalidConfig, "scenario: cannot open " + path);
  return parseScenario(in, std::move(base));
}

}  // namespace mhl::radar
