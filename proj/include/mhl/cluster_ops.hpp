#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <span>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mhl/errors.hpp"
#include "mhl/model.hpp"
#include "mhl/store.hpp"

namespace mhl {

/// Deep copy of a cluster with fresh ids, not yet registered in any store.
template <class E, class F>
struct ClonedCluster {
  Cluster<E, F> tree;
  std::unordered_map<EventGroupId, EventGroupId> groups;
  std::unordered_map<EventId, EventId> events;
  std::unordered_map<FactId, FactId> facts;
  std::unordered_map<LeafId, LeafId> leaves;
};

template <class E, class F>
ClonedCluster<E, F> cloneSubtree(Store<E, F>& store, const Cluster<E, F>& source) {
  ClonedCluster<E, F> out;
  // Ids are drawn in map order so that the clone's constraint order matches the source's.
  for (const auto& [gid, g] : source.groups) out.groups.emplace(gid, store.ids.template next<EventGroupId>());
  for (const auto& [eid, e] : source.events) out.events.emplace(eid, store.ids.template next<EventId>());
  for (const auto& [fid, f] : source.facts) out.facts.emplace(fid, store.ids.template next<FactId>());
  for (const auto& [lid, l] : source.leaves) out.leaves.emplace(lid, store.ids.template next<LeafId>());

  Cluster<E, F>& t = out.tree;
  t.root = out.groups.at(source.root);
  for (const auto& [gid, g] : source.groups) {
    EventGroup ng;
    ng.id = out.groups.at(gid);
    for (EventId e : g.events) ng.events.push_back(out.events.at(e));
    if (g.parent) ng.parent = out.groups.at(*g.parent);
    for (EventGroupId ch : g.children) ng.children.push_back(out.groups.at(ch));
    if (g.leaf) ng.leaf = out.leaves.at(*g.leaf);
    for (FactId f : g.facts) ng.facts.push_back(out.facts.at(f));
    ng.generation = g.generation;
    ng.origin = g.origin;
    t.groups.emplace(ng.id, std::move(ng));
  }
  for (const auto& [eid, e] : source.events) {
    Event<E> ne = e;
    ne.id = out.events.at(eid);
    ne.group = out.groups.at(e.group);
    t.events.emplace(ne.id, std::move(ne));
  }
  for (const auto& [fid, f] : source.facts) {
    Fact<F> nf = f;
    nf.id = out.facts.at(fid);
    nf.dependsOn = out.groups.at(f.dependsOn);
    t.facts.emplace(nf.id, std::move(nf));
  }
  for (const auto& [lid, l] : source.leaves) {
    Leaf nl{out.leaves.at(lid), out.groups.at(l.group), {}, l.probability};
    for (FactId f : l.facts) nl.facts.push_back(out.facts.at(f));
    std::sort(nl.facts.begin(), nl.facts.end());
    t.leaves.emplace(nl.id, std::move(nl));
  }
  for (const auto& [cid, c] : source.constraints) {
    Constraint nc{store.ids.template next<ConstraintId>(), {}, c.tags};
    for (EventGroupId g : c.groups) nc.groups.insert(out.groups.at(g));
    t.constraints.emplace(nc.id, std::move(nc));
  }
  return out;
}

/// For every constraint position i of the (parallel) clones, adds to `target`
/// one constraint holding the union of the clones' i-th constraints.
template <class E, class F>
void unifyConstraints(Store<E, F>& store, Cluster<E, F>& target, std::span<const ClonedCluster<E, F>> clones) {
  if (clones.empty()) return;
  const std::size_t count = clones.front().tree.constraints.size();
  for (const auto& cl : clones)
    if (cl.tree.constraints.size() != count)
      throw Error(Errc::MismatchedClones, "clones carry different constraint counts");

  std::vector<std::vector<const Constraint*>> columns(clones.size());
  for (std::size_t k = 0; k < clones.size(); ++k)
    for (const auto& [cid, c] : clones[k].tree.constraints) columns[k].push_back(&c);

  for (std::size_t i = 0; i < count; ++i) {
    Constraint merged{store.ids.template next<ConstraintId>(), {}, {}};
    for (const auto& col : columns) {
      merged.groups.insert(col[i]->groups.begin(), col[i]->groups.end());
      merged.tags.insert(merged.tags.end(), col[i]->tags.begin(), col[i]->tags.end());
    }
    std::sort(merged.tags.begin(), merged.tags.end());
    merged.tags.erase(std::unique(merged.tags.begin(), merged.tags.end()), merged.tags.end());
    target.constraints.emplace(merged.id, std::move(merged));
  }
}

/// Removes a leaf and every event group left without children above it.
template <class E, class F>
void removeLeaf(Store<E, F>& store, Cluster<E, F>& c, LeafId leaf, bool renormalize = true) {
  auto it = c.leaves.find(leaf);
  if (it == c.leaves.end()) throw Error(Errc::UnknownId, "leaf not in cluster");
  if (c.leaves.size() == 1) throw Error(Errc::LastLeaf, "a cluster must keep at least one leaf");

  std::optional<EventGroupId> parent = it->second.group;
  std::vector<FactId> orphaned = detachLeaf(c, leaf);
  while (parent && *parent != c.root && c.group(*parent).children.empty()) {
    std::optional<EventGroupId> up = c.group(*parent).parent;
    store.removeGroup(c, *parent);
    parent = up;
  }
  for (FactId f : orphaned)
    if (c.facts.count(f)) store.removeFact(c, f);
  if (renormalize) normalize(c);
}

template <class E, class F>
using PruneFn = std::function<void(Store<E, F>&, Cluster<E, F>&)>;

template <class E, class F>
struct JoinResult {
  ClusterId cluster;
  // Requested ids translated into the joined cluster (clones replace originals).
  std::vector<EventId> events;
  std::vector<FactId> facts;
  std::size_t joined = 0;  // number of source clusters merged into the target
};

namespace detail {

/// Moves a clone's groups, events, facts and leaves into `target`, hanging the
/// clone root under `attach`. Constraints are handled by unifyConstraints.
template <class E, class F>
void graftClone(Store<E, F>& store, Cluster<E, F>& target, ClonedCluster<E, F>& clone, EventGroupId attach,
                const Leaf& over) {
  Cluster<E, F>& t = clone.tree;
  for (auto& [gid, g] : t.groups) target.groups.emplace(gid, std::move(g));
  target.group(t.root).parent = attach;
  target.group(attach).children.push_back(t.root);
  for (auto& [eid, e] : t.events) {
    target.events.emplace(eid, std::move(e));
    store.indexEvent(target.id, eid);
  }
  for (auto& [fid, f] : t.facts) {
    target.facts.emplace(fid, std::move(f));
    store.indexFact(target.id, fid);
  }
  for (auto& [lid, l] : t.leaves) {
    l.probability *= over.probability;
    Leaf& placed = target.leaves.emplace(lid, std::move(l)).first->second;
    for (FactId f : over.facts) addLeafFact(target, placed, f);
  }
}

}  // namespace detail

/// Merges every cluster holding a requested event or fact into one cluster.
/// With nothing requested a fresh single-leaf cluster is created.
template <class E, class F>
JoinResult<E, F> joinClusters(Store<E, F>& store, std::span<const EventId> reqEvents,
                              std::span<const FactId> reqFacts, const PruneFn<E, F>& prune = {}) {
  std::map<ClusterId, std::vector<EventId>> eventsBy;
  std::map<ClusterId, std::vector<FactId>> factsBy;
  std::set<ClusterId> involved;
  for (EventId e : reqEvents) {
    auto it = store.eventIndex.find(e);
    if (it == store.eventIndex.end()) throw Error(Errc::UnknownId, "requested event is not live");
    eventsBy[it->second].push_back(e);
    involved.insert(it->second);
  }
  for (FactId f : reqFacts) {
    auto it = store.factIndex.find(f);
    if (it == store.factIndex.end()) throw Error(Errc::UnknownId, "requested fact is not live");
    factsBy[it->second].push_back(f);
    involved.insert(it->second);
  }

  JoinResult<E, F> result;
  if (involved.empty()) {
    result.cluster = store.createCluster().id;
    return result;
  }

  // Target: the cluster with the most leaves. Sources: ascending leaf count.
  std::vector<ClusterId> order(involved.begin(), involved.end());
  auto leafCount = [&](ClusterId id) { return store.cluster(id).leaves.size(); };
  ClusterId target = *std::max_element(order.begin(), order.end(), [&](ClusterId a, ClusterId b) {
    return leafCount(a) != leafCount(b) ? leafCount(a) < leafCount(b) : a > b;
  });
  std::vector<ClusterId> sources;
  for (ClusterId id : order)
    if (id != target) sources.push_back(id);
  std::stable_sort(sources.begin(), sources.end(),
                   [&](ClusterId a, ClusterId b) { return leafCount(a) < leafCount(b); });

  result.cluster = target;
  result.events = eventsBy[target];
  result.facts = factsBy[target];
  Cluster<E, F>& c1 = store.cluster(target);

  for (ClusterId sid : sources) {
    const Cluster<E, F>& c2 = store.cluster(sid);
    std::vector<LeafId> c1Leaves;
    for (const auto& [lid, l] : c1.leaves) c1Leaves.push_back(lid);

    std::vector<ClonedCluster<E, F>> clones;
    clones.reserve(c1Leaves.size());
    for (LeafId lid : c1Leaves) {
      clones.push_back(cloneSubtree(store, c2));
      ClonedCluster<E, F>& clone = clones.back();
      for (EventId e : eventsBy[sid]) result.events.push_back(clone.events.at(e));
      for (FactId f : factsBy[sid]) result.facts.push_back(clone.facts.at(f));
      const Leaf over = c1.leaves.at(lid);
      detail::graftClone(store, c1, clone, over.group, over);
      detachLeaf(c1, lid);
    }
    unifyConstraints<E, F>(store, c1, clones);
    store.dropCluster(sid);
    ++result.joined;
    if (prune) prune(store, c1);
  }

  std::erase_if(result.events, [&](EventId e) { return !c1.events.count(e); });
  std::erase_if(result.facts, [&](FactId f) { return !c1.facts.count(f); });
  return result;
}

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::uint8_t> rank_;
};

}  // namespace detail

/// Groups constraints into components of transitive overlap. Component k
/// lists constraint ids; components are ordered by their smallest constraint id.
template <class E, class F>
std::vector<std::vector<ConstraintId>> constraintComponents(const Cluster<E, F>& c) {
  std::vector<ConstraintId> ids;
  for (const auto& [cid, cons] : c.constraints) ids.push_back(cid);
  detail::UnionFind uf(ids.size());
  std::unordered_map<EventGroupId, std::size_t> owner;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (EventGroupId g : c.constraints.at(ids[i]).groups) {
      auto [it, inserted] = owner.emplace(g, i);
      if (!inserted) uf.unite(i, it->second);
    }
  }
  std::vector<std::vector<ConstraintId>> comps;
  std::unordered_map<std::size_t, std::size_t> label;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto [it, inserted] = label.emplace(uf.find(i), comps.size());
    if (inserted) comps.emplace_back();
    comps[it->second].push_back(ids[i]);
  }
  return comps;
}

/// Splits a cluster into one cluster per independent set of constraints.
///
/// Each new cluster keeps only its constraints, the events of their event
/// groups, and the facts depending on those groups. Groups outside the
/// component are elided, and groups that became indistinguishable (same
/// origin, same retained facts, same retained ancestry) are merged, summing
/// the probabilities of leaves that coincide. Records keep their ids when
/// they survive; dropped duplicates are announced as removed.
template <class E, class F>
std::vector<ClusterId> split(Store<E, F>& store, ClusterId id) {
  auto comps = constraintComponents(store.cluster(id));
  if (comps.size() <= 1) return {id};

  Cluster<E, F>& old = store.cluster(id);
  std::unordered_map<EventGroupId, std::size_t> groupComp;
  for (std::size_t k = 0; k < comps.size(); ++k)
    for (ConstraintId cid : comps[k])
      for (EventGroupId g : old.constraints.at(cid).groups) groupComp[g] = k;

  // Per-leaf retained path, keyed before anything is moved out of `old`.
  struct Step {
    EventGroupId group;
    std::uint64_t origin;
    std::vector<std::uint64_t> factOrigins;
    std::vector<FactId> present;
  };
  std::vector<std::pair<LeafId, std::vector<Step>>> paths;
  for (const auto& [lid, leaf] : old.leaves) {
    auto p = pathToRoot(old, leaf.group);
    std::vector<Step> steps;
    for (auto it = p.rbegin(); it != p.rend(); ++it) {
      if (*it == old.root) continue;
      const EventGroup& og = old.group(*it);
      Step st{*it, og.origin, {}, {}};
      for (FactId f : og.facts) {
        if (detail::containsSorted(leaf.facts, f)) {
          st.factOrigins.push_back(old.facts.at(f).origin);
          st.present.push_back(f);
        }
      }
      std::sort(st.factOrigins.begin(), st.factOrigins.end());
      steps.push_back(std::move(st));
    }
    paths.emplace_back(lid, std::move(steps));
  }

  std::vector<ClusterId> result;
  for (std::size_t k = 0; k < comps.size(); ++k) {
    ClusterId nid = store.ids.template next<ClusterId>();
    Cluster<E, F>& n = store.clusters[nid];
    Cluster<E, F>& src = store.cluster(id);
    n.id = nid;
    n.root = store.ids.template next<EventGroupId>();
    const EventGroup& oldRoot = src.group(src.root);
    n.groups.emplace(n.root, EventGroup{n.root, {}, std::nullopt, {}, std::nullopt, {}, 0, oldRoot.origin});
    if (k == 0) {
      for (FactId f : std::vector<FactId>(oldRoot.facts)) {
        detail::eraseValue(src.group(src.root).facts, f);
        store.transferFact(src, n, f, n.root);
      }
    }

    using Key = std::tuple<EventGroupId, std::uint64_t, std::vector<std::uint64_t>>;
    std::map<Key, EventGroupId> trie;
    std::unordered_map<EventGroupId, EventGroupId> mapped;
    std::map<EventGroupId, LeafId> leafAt;

    for (const auto& [lid, steps] : paths) {
      const Leaf& leaf = src.leaves.at(lid);
      EventGroupId node = n.root;
      for (const Step& st : steps) {
        auto gc = groupComp.find(st.group);
        if (gc == groupComp.end() || gc->second != k) continue;
        Key key{node, st.origin, st.factOrigins};
        auto hit = trie.find(key);
        if (hit != trie.end()) {
          mapped.emplace(st.group, hit->second);
          node = hit->second;
          continue;
        }
        const EventGroup& og = src.group(st.group);
        const bool reuse = !mapped.count(st.group);
        EventGroupId fresh = reuse ? st.group : store.ids.template next<EventGroupId>();
        n.groups.emplace(fresh, EventGroup{fresh, {}, node, {}, std::nullopt, {}, og.generation, og.origin});
        n.group(node).children.push_back(fresh);
        if (reuse) {
          for (EventId e : std::vector<EventId>(og.events)) store.transferEvent(src, n, e, fresh);
          src.group(st.group).events.clear();
          for (FactId f : st.present) {
            detail::eraseValue(src.group(st.group).facts, f);
            store.transferFact(src, n, f, fresh);
          }
        }
        trie.emplace(std::move(key), fresh);
        mapped.emplace(st.group, fresh);
        node = fresh;
      }
      auto at = leafAt.find(node);
      if (at != leafAt.end()) {
        n.leaves.at(at->second).probability += leaf.probability;
      } else {
        LeafId nl = store.ids.template next<LeafId>();
        addLeaf(n, nl, node, leaf.probability);
        leafAt.emplace(node, nl);
      }
    }

    for (auto& [nodeId, lid] : leafAt) {
      Leaf& leaf = n.leaves.at(lid);
      for (EventGroupId g : pathToRoot(n, nodeId))
        for (FactId f : n.group(g).facts) addLeafFact(n, leaf, f);
    }
    for (ConstraintId cid : comps[k]) {
      const Constraint& oc = src.constraints.at(cid);
      Constraint nc{store.ids.template next<ConstraintId>(), {}, oc.tags};
      for (EventGroupId g : oc.groups) nc.groups.insert(mapped.at(g));
      n.constraints.emplace(nc.id, std::move(nc));
    }
    normalize(n);
    result.push_back(nid);
  }

  // Whatever was not carried over is gone.
  Cluster<E, F>& src = store.cluster(id);
  std::vector<EventId> leftoverEvents;
  for (const auto& [eid, e] : src.events) leftoverEvents.push_back(eid);
  for (EventId e : leftoverEvents) store.removeEvent(src, e);
  std::vector<FactId> leftoverFacts;
  for (const auto& [fid, f] : src.facts) leftoverFacts.push_back(fid);
  for (FactId f : leftoverFacts) store.removeFact(src, f);
  store.clusters.erase(id);
  return result;
}

}  // namespace mhl
