#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "mhl/ids.hpp"

namespace mhl {

/// A piece of world history. The engine never looks inside `data`.
///
/// `generation` is the serial of the hypothesis generation that produced the
/// event and `origin` identifies the event it was copied from (its own id for
/// an original). Both survive cloning, which is how clones of one event are
/// recognised as the same piece of information.
template <class E>
struct Event {
  EventId id;
  E data;
  std::optional<std::int64_t> timestamp;
  EventGroupId group;
  std::uint64_t generation = 0;
  std::uint64_t origin = 0;
};

/// Current-state assertion stored in leaves. Depends upon exactly one event group.
template <class F>
struct Fact {
  FactId id;
  F data;
  EventGroupId dependsOn;
  std::uint64_t origin = 0;
  std::size_t leafRefs = 0;  // number of leaves holding this fact
};

struct EventGroup {
  EventGroupId id;
  std::vector<EventId> events;
  std::optional<EventGroupId> parent;
  std::vector<EventGroupId> children;  // creation order
  std::optional<LeafId> leaf;          // set iff the group is at the bottom
  std::vector<FactId> facts;           // facts depending upon this group
  std::uint64_t generation = 0;        // 0 for roots
  std::uint64_t origin = 0;
};

struct Leaf {
  LeafId id;
  EventGroupId group;
  std::vector<FactId> facts;  // sorted, unique
  double probability = 1.0;
};

struct Constraint {
  ConstraintId id;
  std::set<EventGroupId> groups;
  // Serials of the generator-created constraints this one descends from.
  // Unification and splitting carry them along.
  std::vector<std::uint64_t> tags;
};

/// One hypothesis tree.
template <class E, class F>
struct Cluster {
  ClusterId id;
  EventGroupId root;
  std::map<EventGroupId, EventGroup> groups;
  std::map<LeafId, Leaf> leaves;
  std::map<ConstraintId, Constraint> constraints;
  std::map<EventId, Event<E>> events;
  std::map<FactId, Fact<F>> facts;

  const EventGroup& group(EventGroupId g) const { return groups.at(g); }
  EventGroup& group(EventGroupId g) { return groups.at(g); }
};

namespace detail {

inline void insertSorted(std::vector<FactId>& v, FactId f) {
  auto it = std::lower_bound(v.begin(), v.end(), f);
  if (it == v.end() || *it != f) v.insert(it, f);
}

inline bool eraseSorted(std::vector<FactId>& v, FactId f) {
  auto it = std::lower_bound(v.begin(), v.end(), f);
  if (it == v.end() || *it != f) return false;
  v.erase(it);
  return true;
}

inline bool containsSorted(const std::vector<FactId>& v, FactId f) {
  return std::binary_search(v.begin(), v.end(), f);
}

template <class Vec, class T>
void eraseValue(Vec& v, const T& value) {
  v.erase(std::remove(v.begin(), v.end(), value), v.end());
}

}  // namespace detail

/// Groups from `g` up to and including the root, bottom first.
template <class E, class F>
std::vector<EventGroupId> pathToRoot(const Cluster<E, F>& cluster, EventGroupId g) {
  std::vector<EventGroupId> path;
  std::optional<EventGroupId> cur = g;
  while (cur) {
    path.push_back(*cur);
    cur = cluster.group(*cur).parent;
  }
  return path;
}

template <class E, class F>
void addLeafFact(Cluster<E, F>& cluster, Leaf& leaf, FactId f) {
  auto it = std::lower_bound(leaf.facts.begin(), leaf.facts.end(), f);
  if (it != leaf.facts.end() && *it == f) return;
  leaf.facts.insert(it, f);
  ++cluster.facts.at(f).leafRefs;
}

template <class E, class F>
LeafId addLeaf(Cluster<E, F>& cluster, LeafId id, EventGroupId group, double probability) {
  cluster.leaves.emplace(id, Leaf{id, group, {}, probability});
  cluster.group(group).leaf = id;
  return id;
}

/// Drops the leaf record and its fact references; leaves the tree untouched.
/// Facts whose reference count drops to zero are returned for the caller to delete.
template <class E, class F>
std::vector<FactId> detachLeaf(Cluster<E, F>& cluster, LeafId id) {
  std::vector<FactId> orphaned;
  auto it = cluster.leaves.find(id);
  if (it == cluster.leaves.end()) return orphaned;
  for (FactId f : it->second.facts) {
    auto& fact = cluster.facts.at(f);
    if (--fact.leafRefs == 0) orphaned.push_back(f);
  }
  auto& g = cluster.group(it->second.group);
  if (g.leaf == id) g.leaf.reset();
  cluster.leaves.erase(it);
  return orphaned;
}

/// Rescales leaf probabilities to sum to one. An all-zero cluster becomes uniform.
template <class E, class F>
void normalize(Cluster<E, F>& cluster) {
  double total = 0.0;
  for (const auto& [id, leaf] : cluster.leaves) total += leaf.probability;
  if (cluster.leaves.empty()) return;
  if (!(total > 0.0)) {
    const double uniform = 1.0 / static_cast<double>(cluster.leaves.size());
    for (auto& [id, leaf] : cluster.leaves) leaf.probability = uniform;
    return;
  }
  for (auto& [id, leaf] : cluster.leaves) leaf.probability /= total;
}

template <class E, class F>
double leafMass(const Cluster<E, F>& cluster) {
  double total = 0.0;
  for (const auto& [id, leaf] : cluster.leaves) total += leaf.probability;
  return total;
}

/// Removes `g` from every constraint and deletes constraints left empty.
template <class E, class F>
void dropFromConstraints(Cluster<E, F>& cluster, EventGroupId g) {
  for (auto it = cluster.constraints.begin(); it != cluster.constraints.end();) {
    it->second.groups.erase(g);
    if (it->second.groups.empty())
      it = cluster.constraints.erase(it);
    else
      ++it;
  }
}

/// Depth in event-group edges from the root, ignoring the chain of
/// single-child groups directly under the root (those are already certain).
template <class E, class F>
std::size_t effectiveDepth(const Cluster<E, F>& cluster) {
  EventGroupId top = cluster.root;
  std::size_t skipped = 0;
  while (cluster.group(top).children.size() == 1) {
    top = cluster.group(top).children.front();
    ++skipped;
  }
  std::size_t deepest = 0;
  for (const auto& [id, leaf] : cluster.leaves) {
    std::size_t d = 0;
    for (EventGroupId g = leaf.group; g != cluster.root; g = *cluster.group(g).parent) ++d;
    deepest = std::max(deepest, d);
  }
  return deepest >= skipped ? deepest - skipped : 0;
}

}  // namespace mhl
