#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "mhl/cluster_ops.hpp"

namespace mhl {

/// One pruning rule. Rules are applied in list order.
struct PruneStrategy {
  enum class Kind { BestK, RatioThreshold, DepthLimit };

  Kind kind = Kind::BestK;
  std::size_t count = 0;  // k for BestK, d for DepthLimit
  double ratio = 0.0;     // r for RatioThreshold

  static PruneStrategy bestK(std::size_t k) {
    if (k == 0) throw Error(Errc::InvalidConfig, "bestK needs k >= 1");
    return {Kind::BestK, k, 0.0};
  }
  static PruneStrategy ratioThreshold(double r) {
    if (!(r > 0.0 && r <= 1.0)) throw Error(Errc::InvalidConfig, "ratio threshold must be in (0,1]");
    return {Kind::RatioThreshold, 0, r};
  }
  static PruneStrategy depthLimit(std::size_t d) {
    if (d == 0) throw Error(Errc::InvalidConfig, "depth limit needs d >= 1");
    return {Kind::DepthLimit, d, 0.0};
  }
};

namespace detail {

/// Leaf ids ordered best first: higher probability, then smaller (older) id.
template <class E, class F>
std::vector<LeafId> rankLeaves(const Cluster<E, F>& c) {
  std::vector<LeafId> ids;
  ids.reserve(c.leaves.size());
  for (const auto& [lid, l] : c.leaves) ids.push_back(lid);
  std::stable_sort(ids.begin(), ids.end(), [&](LeafId a, LeafId b) {
    return c.leaves.at(a).probability > c.leaves.at(b).probability;
  });
  return ids;
}

}  // namespace detail

template <class E, class F>
LeafId bestLeaf(const Cluster<E, F>& c) {
  LeafId best = c.leaves.begin()->first;
  double p = -1.0;
  for (const auto& [lid, l] : c.leaves) {
    if (l.probability > p) {
      p = l.probability;
      best = lid;
    }
  }
  return best;
}

/// Applies the strategies to the leaves of one cluster, then renormalizes.
/// Does not flush certainties; callers that want that run flushCertainties.
template <class E, class F>
void pruneLeaves(Store<E, F>& store, Cluster<E, F>& c, std::span<const PruneStrategy> strategies) {
  for (const PruneStrategy& s : strategies) {
    switch (s.kind) {
      case PruneStrategy::Kind::BestK: {
        if (c.leaves.size() <= s.count) break;
        auto ranked = detail::rankLeaves(c);
        for (std::size_t i = s.count; i < ranked.size(); ++i) removeLeaf(store, c, ranked[i], false);
        break;
      }
      case PruneStrategy::Kind::RatioThreshold: {
        double top = 0.0;
        for (const auto& [lid, l] : c.leaves) top = std::max(top, l.probability);
        const double cut = s.ratio * top;
        auto ranked = detail::rankLeaves(c);
        for (std::size_t i = 1; i < ranked.size(); ++i)
          if (c.leaves.at(ranked[i]).probability < cut) removeLeaf(store, c, ranked[i], false);
        break;
      }
      case PruneStrategy::Kind::DepthLimit: {
        while (c.leaves.size() > 1 && effectiveDepth(c) > s.count) {
          auto ranked = detail::rankLeaves(c);
          removeLeaf(store, c, ranked.back(), false);
        }
        break;
      }
    }
    normalize(c);
  }
  normalize(c);
}

template <class E, class F>
struct FlushResult {
  std::vector<Event<E>> certainEvents;
  std::vector<ClusterId> factClusters;
  bool clusterRemoved = false;
};

/// Promotes the root's only child while there is one: its events are certain
/// and leave the tree through the certain-event sink, each fact depending on it
/// moves into a singleton cluster of its own. A cluster left holding nothing
/// (bare root, one leaf, no facts) is deleted.
template <class E, class F>
FlushResult<E, F> flushCertainties(Store<E, F>& store, ClusterId id) {
  FlushResult<E, F> out;
  Cluster<E, F>* c = &store.cluster(id);
  while (c->group(c->root).children.size() == 1) {
    const EventGroupId child = c->group(c->root).children.front();
    EventGroup& g = c->group(child);
    for (EventId e : std::vector<EventId>(g.events)) {
      out.certainEvents.push_back(c->events.at(e));
      store.removeEvent(*c, e, true);
    }
    for (FactId f : std::vector<FactId>(g.facts)) {
      for (auto& [lid, leaf] : c->leaves) detail::eraseSorted(leaf.facts, f);
      detail::eraseValue(c->group(child).facts, f);
      auto& single = store.createCluster();
      c = &store.cluster(id);
      store.transferFact(*c, single, f, single.root);
      addLeafFact(single, single.leaves.begin()->second, f);
      out.factClusters.push_back(single.id);
    }
    EventGroup promoted = std::move(c->group(child));
    dropFromConstraints(*c, child);
    EventGroup& root = c->group(c->root);
    root.children = promoted.children;
    for (EventGroupId gc : promoted.children) c->group(gc).parent = c->root;
    if (promoted.leaf) {
      c->leaves.at(*promoted.leaf).group = c->root;
      root.leaf = promoted.leaf;
    }
    c->groups.erase(child);
  }
  const EventGroup& root = c->group(c->root);
  if (root.children.empty() && c->facts.empty() && c->events.empty()) {
    store.dropCluster(id);
    out.clusterRemoved = true;
  }
  return out;
}

/// Prunes and then flushes one cluster.
template <class E, class F>
FlushResult<E, F> prune(Store<E, F>& store, ClusterId id, std::span<const PruneStrategy> strategies) {
  pruneLeaves(store, store.cluster(id), strategies);
  return flushCertainties(store, id);
}

template <class E, class F>
using RelevancePredicate = std::function<bool(const Cluster<E, F>&)>;

/// Collapses the given clusters for which the predicate says they can never be
/// requested again: best-1 pruning followed by a flush, which leaves only
/// certain events and singleton fact clusters behind.
template <class E, class F>
FlushResult<E, F> relevanceCollapse(Store<E, F>& store, std::span<const ClusterId> ids,
                                    const RelevancePredicate<E, F>& relevant) {
  FlushResult<E, F> out;
  if (!relevant) return out;
  const PruneStrategy best1 = PruneStrategy::bestK(1);
  for (ClusterId id : ids) {
    auto it = store.clusters.find(id);
    if (it == store.clusters.end() || relevant(it->second)) continue;
    auto r = prune(store, id, std::span<const PruneStrategy>(&best1, 1));
    out.certainEvents.insert(out.certainEvents.end(), r.certainEvents.begin(), r.certainEvents.end());
    out.factClusters.insert(out.factClusters.end(), r.factClusters.begin(), r.factClusters.end());
  }
  return out;
}

/// Same, over every live cluster.
template <class E, class F>
FlushResult<E, F> relevanceCollapse(Store<E, F>& store, const RelevancePredicate<E, F>& relevant) {
  std::vector<ClusterId> ids;
  for (const auto& [cid, c] : store.clusters) ids.push_back(cid);
  return relevanceCollapse(store, std::span<const ClusterId>(ids), relevant);
}

}  // namespace mhl
