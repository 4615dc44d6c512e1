// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "mhl/radar/bench.hpp"
#include "mhl/radar/scenario.hpp"
#include "radar_oracle.hpp"

using namespace th;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

double secondsSince(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// ---------------------------------------------------------------------------

Outcome oracleEquivalence() {
  const auto t0 = Clock::now();
  int run = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; run < 60; ++seed) {
    auto [cfg, scans] = microScenario(seed);
    try {
      worst = std::max(worst, radarOracleDistance(cfg, scans));
    } catch (const mhl::Error& e) {
      if (e.code() == mhl::Errc::SizeGuard) continue;
      throw;
    }
    ++run;
  }
  const double secs = secondsSince(t0);
  std::ostringstream os;
  os << run << " micro-scenarios, worst distance " << worst << ", " << secs << " s";
  return {worst <= 1e-9 && secs < 60.0, os.str()};
}

// ---------------------------------------------------------------------------

// Tracks every generation through its group origins, which survive cloning,
// unification and splitting, and checks the clustering rules after each call.
class RuleChecker {
 public:
  explicit RuleChecker(WorldS& w) : w_(w) {
    w.setGenerationLog([this](const mhl::GenerationRecord& rec) {
      const auto& c = w_.store().clusters.at(rec.cluster);
      std::set<std::uint64_t> rule2;
      for (auto g : rec.premiseGroups)
        if (g != c.root) rule2.insert(c.group(g).origin);
      for (auto g : rec.producedGroups) {
        rule2.insert(c.group(g).origin);
        rule1_[rec.generation].insert(c.group(g).origin);
      }
      rule2_.push_back(std::move(rule2));
    });
  }

  // Returns a description of the first violation, empty if none.
  std::string check() const {
    std::map<std::uint64_t, std::set<mhl::ClusterId>> where;
    for (const auto& [cid, c] : w_.clusters())
      for (const auto& [gid, g] : c.groups)
        if (gid != c.root) where[g.origin].insert(cid);
    auto oneCluster = [&](const std::set<std::uint64_t>& origins) {
      std::set<mhl::ClusterId> seen;
      for (auto o : origins) {
        auto it = where.find(o);
        if (it != where.end()) seen.insert(it->second.begin(), it->second.end());
      }
      return seen.size() <= 1;
    };
    for (const auto& [gen, origins] : rule1_)
      if (!oneCluster(origins)) return "rule-1 members of generation " + std::to_string(gen) + " span clusters";
    for (const auto& origins : rule2_)
      if (!oneCluster(origins)) return "rule-2 members span clusters";

    // Constraint-overlap graph over the whole world. Groups have globally
    // unique ids, so overlapping constraints necessarily share a cluster; a
    // cluster without constraints is a component of its own.
    std::vector<std::pair<mhl::ClusterId, const mhl::Constraint*>> nodes;
    for (const auto& [cid, c] : w_.clusters())
      for (const auto& [kid, k] : c.constraints) nodes.emplace_back(cid, &k);
    std::vector<std::size_t> parent(nodes.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
      return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    std::map<mhl::EventGroupId, std::size_t> owner;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      for (auto g : nodes[i].second->groups) {
        auto [it, fresh] = owner.emplace(g, i);
        if (!fresh) parent[find(i)] = find(it->second);
      }
    std::set<std::size_t> comps;
    std::set<mhl::ClusterId> withConstraints;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      comps.insert(find(i));
      withConstraints.insert(nodes[i].first);
    }
    const std::size_t expected = comps.size() + (w_.clusters().size() - withConstraints.size());
    if (expected != w_.clusters().size())
      return std::to_string(w_.clusters().size()) + " clusters but " + std::to_string(expected) + " components";
    return {};
  }

 private:
  WorldS& w_;
  std::map<std::uint64_t, std::set<std::uint64_t>> rule1_;
  std::vector<std::set<std::uint64_t>> rule2_;
};

// One random generate call with fresh payloads.
void randomGenerate(WorldS& w, std::mt19937_64& rng, int step) {
  auto snap = w.requestableInfo();
  std::vector<mhl::FactId> reqF;
  std::vector<mhl::EventId> reqE;
  for (const auto& f : snap.facts)
    if (rng() % 3 == 0) reqF.push_back(f.id);
  for (const auto& e : snap.events)
    if (rng() % 8 == 0) reqE.push_back(e.id);
  const auto n = 1 + rng() % 3;
  std::vector<Hyp> hs;
  for (std::size_t k = 0; k < n; ++k) {
    const std::string tag = std::to_string(step) + "." + std::to_string(k);
    std::vector<S> evs, fs;
    if (rng() % 4) evs.push_back("e" + tag);
    for (auto m = rng() % 3; m > 0; --m) fs.push_back("f" + tag + "." + std::to_string(m));
    hs.push_back(hyp(evs, fs, 0.05 + static_cast<double>(rng() % 20)));
  }
  w.generate(reqE, reqF, constant(hs));
}

Outcome clusteringRules() {
  std::mt19937_64 rng(2024);
  std::size_t checks = 0;
  const int sequences = 10000;
  for (int s = 0; s < sequences; ++s) {
    std::vector<mhl::PruneStrategy> strategies;
    if (rng() % 2) strategies.push_back(mhl::PruneStrategy::bestK(2 + rng() % 6));
    if (rng() % 2) strategies.push_back(mhl::PruneStrategy::ratioThreshold(0.02));
    if (rng() % 3 == 0) strategies.push_back(mhl::PruneStrategy::depthLimit(1 + rng() % 3));
    WorldS w(strategies);
    if (rng() % 2) w.setRelevancePredicate([](const ClusterS& c) { return !c.facts.empty(); });
    RuleChecker checker(w);
    const int steps = 3 + static_cast<int>(rng() % 6);
    for (int i = 0; i < steps; ++i) {
      randomGenerate(w, rng, i);
      ++checks;
      if (auto v = checker.check(); !v.empty())
        return {false, "sequence " + std::to_string(s) + " step " + std::to_string(i) + ": " + v};
    }
  }
  return {true, std::to_string(sequences) + " sequences, " + std::to_string(checks) + " checks, 0 violations"};
}

// ---------------------------------------------------------------------------

Outcome procedureAlgebra() {
  StoreS store;
  auto a = makeCluster(store, {0.5, 0.3, 0.2}, "a");
  const auto tagsOfA = store.constraintTagSerial;
  auto b = makeCluster(store, {0.6, 0.4}, "b");
  std::map<std::vector<std::uint64_t>, std::size_t> sourceSizes;
  for (const auto& [cid, k] : store.cluster(b).constraints) sourceSizes[k.tags] = k.groups.size();
  const std::size_t c1Leaves = store.cluster(a).leaves.size();

  std::vector<mhl::EventId> req{eventIds(store.cluster(a))[0], eventIds(store.cluster(b))[0]};
  auto r = mhl::joinClusters<S, S>(store, req, {});
  const auto& joined = store.cluster(r.cluster);

  // Every joint leaf carries the product of one leaf of each input.
  std::vector<double> want{0.30, 0.20, 0.18, 0.12, 0.12, 0.08};
  auto got = sortedProbs(joined);
  bool ok = got.size() == want.size();
  for (std::size_t i = 0; ok && i < want.size(); ++i) ok = std::abs(got[i] - want[i]) <= 1e-15;
  if (!ok) return {false, "join leaf probabilities differ from the products"};

  // A constraint of the absorbed cluster with |e| groups becomes one with
  // |e| times the leaf count of the absorbing cluster.
  std::size_t unified = 0;
  for (const auto& [cid, k] : joined.constraints) {
    if (k.tags.front() <= tagsOfA) continue;
    ++unified;
    auto it = sourceSizes.find(k.tags);
    if (it == sourceSizes.end() || k.groups.size() != it->second * c1Leaves)
      return {false, "unified constraint has " + std::to_string(k.groups.size()) + " groups"};
  }
  if (unified != sourceSizes.size()) return {false, "unified constraint count mismatch"};

  std::mt19937_64 rng(31);
  int trees = 0;
  while (trees < 10000) {
    StoreS s;
    auto id = randomTree(s, rng);
    auto& c = s.cluster(id);
    if (c.leaves.size() < 2) continue;
    auto it = c.leaves.begin();
    std::advance(it, rng() % c.leaves.size());
    mhl::removeLeaf(s, c, it->first);
    if (auto v = mhl::validateCluster(c); !v.empty()) return {false, "removeLeaf: " + v.front()};
    ++trees;
  }
  return {true, "join 3x2 exact, " + std::to_string(unified) + " unified constraints, removeLeaf valid on " +
                    std::to_string(trees) + " trees"};
}

// ---------------------------------------------------------------------------

std::string massViolation(const StoreS& s) {
  for (const auto& [cid, c] : s.clusters)
    if (std::abs(mhl::leafMass(c) - 1.0) > 1e-9) return "cluster " + std::to_string(cid.value) + " mass off";
  return {};
}

std::map<std::uint64_t, std::string> storeContent(const StoreS& s) {
  std::map<std::uint64_t, std::string> out;
  for (const auto& [cid, c] : s.clusters) {
    std::ostringstream os;
    os << c.groups.size() << '/' << c.leaves.size() << '/' << c.events.size() << '/' << c.facts.size();
    for (const auto& [lid, l] : c.leaves) os << ' ' << l.probability;
    out[cid.value] = os.str();
  }
  return out;
}

Outcome normalizationAndFlush() {
  std::mt19937_64 rng(77);
  std::size_t ops = 0;

  // Public operations on random stores: join, generate, prune, flush, split,
  // removeLeaf, relevance collapse.
  for (int round = 0; round < 2000; ++round) {
    StoreS s;
    std::vector<mhl::ClusterId> ids;
    for (int k = 0; k < 3; ++k) ids.push_back(randomTree(s, rng, 3, 3));
    ops += 3;
    if (auto v = massViolation(s); !v.empty()) return {false, "after hypGen: " + v};

    std::vector<mhl::EventId> reqE;
    std::vector<mhl::FactId> reqF;
    for (auto id : ids) {
      const auto& c = s.cluster(id);
      if (!c.facts.empty()) reqF.push_back(c.facts.begin()->first);
      else if (!c.events.empty()) reqE.push_back(c.events.begin()->first);
    }
    auto j = mhl::joinClusters<S, S>(s, reqE, reqF);
    ++ops;
    if (auto v = massViolation(s); !v.empty()) return {false, "after join: " + v};

    const mhl::PruneStrategy strategies[] = {mhl::PruneStrategy::ratioThreshold(0.05),
                                             mhl::PruneStrategy::bestK(1 + rng() % 5)};
    mhl::pruneLeaves(s, s.cluster(j.cluster), strategies);
    ++ops;
    if (auto v = massViolation(s); !v.empty()) return {false, "after prune: " + v};

    auto& jc = s.cluster(j.cluster);
    if (jc.leaves.size() > 1) {
      auto it = jc.leaves.begin();
      std::advance(it, rng() % jc.leaves.size());
      mhl::removeLeaf(s, jc, it->first);
      ++ops;
      if (auto v = massViolation(s); !v.empty()) return {false, "after removeLeaf: " + v};
    }

    auto f1 = mhl::flushCertainties(s, j.cluster);
    ++ops;
    if (auto v = massViolation(s); !v.empty()) return {false, "after flush: " + v};
    if (!f1.clusterRemoved) {
      // A second flush finds nothing left to promote.
      const auto before = storeContent(s);
      auto f2 = mhl::flushCertainties(s, j.cluster);
      ++ops;
      if (!f2.certainEvents.empty() || !f2.factClusters.empty() || storeContent(s) != before)
        return {false, "flush not idempotent in round " + std::to_string(round)};
      mhl::split(s, j.cluster);
      ++ops;
      if (auto v = massViolation(s); !v.empty()) return {false, "after split: " + v};
    }
    mhl::relevanceCollapse<S, S>(s, [&](const ClusterS&) { return rng() % 2 == 0; });
    ++ops;
    if (auto v = massViolation(s); !v.empty()) return {false, "after collapse: " + v};
    if (auto v = mhl::validateStore(s); !v.empty()) return {false, v.front()};
  }

  // The world facade, with its own pipeline.
  for (int round = 0; round < 300; ++round) {
    WorldS w({mhl::PruneStrategy::ratioThreshold(0.01), mhl::PruneStrategy::bestK(5)});
    for (int i = 0; i < 10; ++i) {
      randomGenerate(w, rng, i);
      ++ops;
      if (auto v = massViolation(w.store()); !v.empty()) return {false, "after generate: " + v};
    }
  }

  // bestK(1): only certain events and singleton fact clusters remain.
  for (int round = 0; round < 2000; ++round) {
    StoreS s;
    auto id = randomTree(s, rng);
    const auto& c = s.cluster(id);
    auto best = c.leaves.begin();
    for (auto it = c.leaves.begin(); it != c.leaves.end(); ++it)
      if (it->second.probability > best->second.probability) best = it;
    std::set<std::uint64_t> pathEvents;
    for (auto g : mhl::pathToRoot(c, best->second.group))
      for (auto e : c.group(g).events) pathEvents.insert(e.value);
    const std::size_t bestFacts = best->second.facts.size();

    const mhl::PruneStrategy one = mhl::PruneStrategy::bestK(1);
    auto r = mhl::prune(s, id, std::span<const mhl::PruneStrategy>(&one, 1));
    ++ops;
    std::set<std::uint64_t> certain;
    for (const auto& e : r.certainEvents) certain.insert(e.id.value);
    if (!r.clusterRemoved || s.clusters.count(id)) return {false, "bestK(1) left the tree in place"};
    if (certain != pathEvents) return {false, "bestK(1) certain events differ from the best path"};
    if (r.factClusters.size() != bestFacts || s.clusters.size() != bestFacts)
      return {false, "bestK(1) fact clusters mismatch"};
    for (const auto& [cid, fc] : s.clusters)
      if (fc.groups.size() != 1 || fc.leaves.size() != 1 || fc.facts.size() != 1 || !fc.events.empty())
        return {false, "bestK(1) left a non-singleton cluster"};
    if (auto v = massViolation(s); !v.empty()) return {false, "after bestK(1): " + v};
  }
  return {true, std::to_string(ops) + " operations checked, flush idempotent, bestK(1) collapses fully"};
}

// ---------------------------------------------------------------------------

std::string scenario(const char* name) { return std::string(SCENARIO_DIR) + "/" + name; }

Outcome trackingSanity() {
  using namespace mhl::radar;
  auto five = runScenario(loadScenario(scenario("five_targets.scn")));
  auto crossing = runScenario(loadScenario(scenario("crossing.scn")));
  std::vector<std::size_t> seq;
  for (const auto& r : crossing.rows)
    if (seq.empty() || seq.back() != r.clusters) seq.push_back(r.clusters);
  auto two = std::find(seq.begin(), seq.end(), 2u);
  auto one = std::find(two, seq.end(), 1u);
  auto again = std::find(one, seq.end(), 2u);
  const bool merged = again != seq.end();
  std::ostringstream os;
  os << "association " << five.association << ", crossing " << (merged ? "2->1->2" : "no merge-then-split");
  return {five.association >= 0.9 && merged, os.str()};
}

Outcome scaling() {
  using namespace mhl::radar;
  const auto t0 = Clock::now();
  RadarConfig base;
  base.scans = 100;
  auto rows = scalingSweep(base, {10, 25, 50, 100}, 3);
  const double secs = secondsSince(t0);
  const double ratio = rows.back().meanMicros / rows.front().meanMicros;
  bool bounded = true;
  std::ostringstream os;
  os << "time ratio 100/10 = " << ratio << ", peak leaves";
  for (const auto& r : rows) {
    os << ' ' << r.peakClusterLeaves;
    bounded = bounded && r.peakClusterLeaves <= base.pruneK;
  }
  os << ", " << secs << " s";
  return {ratio <= 15.0 && bounded && secs < 600.0, os.str()};
}

Outcome eventsOptional() {
  using namespace mhl::radar;
  auto cfg = loadScenario(scenario("five_targets.scn"));
  auto with = runScenario(cfg);
  cfg.emitEvents = false;
  auto without = runScenario(cfg);
  const bool same = with.bestFacts == without.bestFacts;
  return {same, std::to_string(with.bestFacts.size()) + " scans compared"};
}

}  // namespace

// Optional arguments select criteria by number; the default runs all of them.
int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoi(argv[i]));
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"oracle equivalence", oracleEquivalence},
      {"clustering-rule invariants", clusteringRules},
      {"procedure algebra", procedureAlgebra},
      {"normalization and flush", normalizationAndFlush},
      {"tracking sanity", trackingSanity},
      {"scaling", scaling},
      {"events-optional equivalence", eventsOptional},
  };
  int failed = 0;
  int n = 0;
  for (const auto& c : criteria) {
    ++n;
    if (!only.empty() && !only.count(n)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << n << ": " << c.name << " (" << o.detail << ")"
              << std::endl;
  }
  return failed ? 1 : 0;
}
