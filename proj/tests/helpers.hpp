#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "mhl/mhl.hpp"

namespace th {

using S = std::string;
using StoreS = mhl::Store<S, S>;
using ClusterS = mhl::Cluster<S, S>;
using WorldS = mhl::World<S, S>;
using Hyp = mhl::Hypothesis<S, S>;
using Gen = mhl::HypothesisGenerator<S, S>;

inline Hyp hyp(std::vector<S> events, std::vector<S> facts, double p) {
  Hyp h;
  for (auto& e : events) h.events.push_back({std::move(e), std::nullopt});
  h.facts = std::move(facts);
  h.probability = p;
  return h;
}

inline Gen constant(std::vector<Hyp> hs) {
  return [hs](const mhl::Provided<S, S>&) { return hs; };
}

/// Fresh cluster with one hypothesis per probability; hypothesis i carries
/// event "<tag>.e<i>" and fact "<tag>.f<i>".
inline mhl::ClusterId makeCluster(StoreS& store, const std::vector<double>& probs, const S& tag = "c") {
  auto& c = store.createCluster();
  std::vector<Hyp> hs;
  for (std::size_t i = 0; i < probs.size(); ++i)
    hs.push_back(hyp({tag + ".e" + std::to_string(i)}, {tag + ".f" + std::to_string(i)}, probs[i]));
  mhl::hypGen<S, S>(store, c, {}, {}, constant(hs));
  store.commit();
  return c.id;
}

inline std::vector<double> sortedProbs(const ClusterS& c) {
  std::vector<double> out;
  for (const auto& [lid, l] : c.leaves) out.push_back(l.probability);
  std::sort(out.rbegin(), out.rend());
  return out;
}

inline std::vector<mhl::EventId> eventIds(const ClusterS& c) {
  std::vector<mhl::EventId> out;
  for (const auto& [id, e] : c.events) out.push_back(id);
  return out;
}

inline std::vector<mhl::FactId> factIds(const ClusterS& c) {
  std::vector<mhl::FactId> out;
  for (const auto& [id, f] : c.facts) out.push_back(id);
  return out;
}

/// Builds a random tree by repeated generations on one cluster. Each
/// generation consumes a random subset of the facts of the cluster.
inline mhl::ClusterId randomTree(StoreS& store, std::mt19937_64& rng, int maxGenerations = 4, int maxBranch = 3) {
  auto& c = store.createCluster();
  const mhl::ClusterId id = c.id;
  std::uniform_int_distribution<int> gens(1, maxGenerations), branch(1, maxBranch);
  std::uniform_real_distribution<double> prob(0.05, 1.0);
  const int n = gens(rng);
  for (int g = 0; g < n; ++g) {
    auto& cl = store.cluster(id);
    std::vector<mhl::FactId> req;
    for (const auto& [fid, f] : cl.facts)
      if (rng() % 2) req.push_back(fid);
    std::vector<Hyp> hs;
    const int b = branch(rng);
    for (int i = 0; i < b; ++i) {
      std::vector<S> evs, fs;
      const int ne = static_cast<int>(rng() % 3);
      for (int k = 0; k < ne; ++k) evs.push_back("g" + std::to_string(g) + "e" + std::to_string(i) + "." + std::to_string(k));
      if (rng() % 3) fs.push_back("g" + std::to_string(g) + "f" + std::to_string(i));
      hs.push_back(hyp(evs, fs, prob(rng)));
    }
    mhl::hypGen<S, S>(store, cl, {}, req, constant(hs));
    store.commit();
  }
  return id;
}

}  // namespace th
