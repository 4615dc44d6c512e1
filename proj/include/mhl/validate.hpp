#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mhl/model.hpp"
#include "mhl/store.hpp"

namespace mhl {

inline constexpr double kNormalizationTolerance = 1e-9;

/// Checks every structural invariant of one cluster. Returns one description
/// per violation; an empty result means the cluster is well formed.
template <class E, class F>
std::vector<std::string> validateCluster(const Cluster<E, F>& c) {
  std::vector<std::string> out;
  auto fail = [&](auto&&... parts) {
    std::ostringstream os;
    (os << ... << parts);
    out.push_back(os.str());
  };

  if (!c.groups.count(c.root)) {
    fail("root ", c.root, " missing");
    return out;
  }
  if (c.group(c.root).parent) fail("root ", c.root, " has a parent");

  // Tree shape: walk from the root, every group reached exactly once.
  std::unordered_set<EventGroupId> seen;
  std::vector<EventGroupId> stack{c.root};
  while (!stack.empty()) {
    EventGroupId g = stack.back();
    stack.pop_back();
    if (!seen.insert(g).second) {
      fail("group ", g, " reachable twice (cycle or shared child)");
      continue;
    }
    auto it = c.groups.find(g);
    if (it == c.groups.end()) {
      fail("child ", g, " missing from group map");
      continue;
    }
    for (EventGroupId ch : it->second.children) {
      auto chIt = c.groups.find(ch);
      if (chIt == c.groups.end()) {
        fail("group ", g, " lists missing child ", ch);
        continue;
      }
      if (chIt->second.parent != g) fail("group ", ch, " parent link does not point back to ", g);
      stack.push_back(ch);
    }
  }
  if (seen.size() != c.groups.size()) fail(c.groups.size() - seen.size(), " group(s) unreachable from root");

  // Leaves sit exactly on the childless groups.
  for (const auto& [gid, g] : c.groups) {
    if (g.children.empty()) {
      if (!g.leaf)
        fail("bottom group ", gid, " has no leaf");
      else if (!c.leaves.count(*g.leaf) || c.leaves.at(*g.leaf).group != gid)
        fail("bottom group ", gid, " leaf link broken");
    } else if (g.leaf) {
      fail("inner group ", gid, " carries a leaf");
    }
    for (EventId e : g.events) {
      auto eIt = c.events.find(e);
      if (eIt == c.events.end() || eIt->second.group != gid) fail("group ", gid, " event ", e, " not owned");
    }
    for (FactId f : g.facts) {
      auto fIt = c.facts.find(f);
      if (fIt == c.facts.end() || fIt->second.dependsOn != gid) fail("group ", gid, " fact ", f, " not owned");
    }
  }
  for (const auto& [eid, ev] : c.events) {
    auto gIt = c.groups.find(ev.group);
    if (gIt == c.groups.end() || std::find(gIt->second.events.begin(), gIt->second.events.end(), eid) == gIt->second.events.end())
      fail("event ", eid, " not listed by its group ", ev.group);
  }

  if (c.leaves.empty()) fail("cluster has no leaves");
  double mass = 0.0;
  std::unordered_map<FactId, std::size_t> refs;
  for (const auto& [lid, leaf] : c.leaves) {
    if (!(leaf.probability >= 0.0 && leaf.probability <= 1.0 + kNormalizationTolerance))
      fail("leaf ", lid, " probability ", leaf.probability, " outside [0,1]");
    mass += leaf.probability;
    auto gIt = c.groups.find(leaf.group);
    if (gIt == c.groups.end()) {
      fail("leaf ", lid, " points at missing group ", leaf.group);
      continue;
    }
    if (!gIt->second.children.empty()) fail("leaf ", lid, " group ", leaf.group, " has children");
    if (!std::is_sorted(leaf.facts.begin(), leaf.facts.end())) fail("leaf ", lid, " fact list unsorted");
    auto path = pathToRoot(c, leaf.group);
    std::unordered_set<EventGroupId> onPath(path.begin(), path.end());
    for (FactId f : leaf.facts) {
      auto fIt = c.facts.find(f);
      if (fIt == c.facts.end()) {
        fail("leaf ", lid, " holds unknown fact ", f);
        continue;
      }
      ++refs[f];
      if (!onPath.count(fIt->second.dependsOn))
        fail("fact ", f, " in leaf ", lid, " depends on ", fIt->second.dependsOn, " which is not an ancestor");
    }
  }
  if (!c.leaves.empty() && std::abs(mass - 1.0) > kNormalizationTolerance)
    fail("leaf probabilities not normalized: sum = ", mass);

  for (const auto& [fid, fact] : c.facts) {
    std::size_t n = refs.count(fid) ? refs.at(fid) : 0;
    if (n == 0) fail("fact ", fid, " held by no leaf");
    if (n != fact.leafRefs) fail("fact ", fid, " reference count ", fact.leafRefs, " but held by ", n, " leaves");
  }
  // A fact lives in every leaf below the group it depends on.
  for (const auto& [lid, leaf] : c.leaves) {
    for (EventGroupId g : pathToRoot(c, leaf.group)) {
      for (FactId f : c.group(g).facts)
        if (!detail::containsSorted(leaf.facts, f))
          fail("leaf ", lid, " lacks fact ", f, " of its ancestor ", g);
    }
  }

  std::unordered_set<EventGroupId> constrained;
  for (const auto& [cid, cons] : c.constraints) {
    if (cons.groups.empty()) fail("constraint ", cid, " is empty");
    for (EventGroupId g : cons.groups) {
      if (!c.groups.count(g)) fail("constraint ", cid, " references foreign group ", g);
      if (g == c.root) fail("constraint ", cid, " contains the root");
      constrained.insert(g);
    }
  }
  for (const auto& [gid, g] : c.groups) {
    if (gid == c.root) continue;
    if ((!g.events.empty() || !g.facts.empty()) && !constrained.count(gid))
      fail("group ", gid, " carries information but is in no constraint");
  }
  return out;
}

/// Validates every cluster plus the world-wide event/fact indices.
template <class E, class F>
std::vector<std::string> validateStore(const Store<E, F>& s) {
  std::vector<std::string> out;
  std::size_t events = 0, facts = 0;
  for (const auto& [cid, c] : s.clusters) {
    if (c.id != cid) out.push_back("cluster key mismatch");
    for (auto& v : validateCluster(c)) {
      std::ostringstream os;
      os << "cluster " << cid << ": " << v;
      out.push_back(os.str());
    }
    for (const auto& [eid, ev] : c.events) {
      ++events;
      auto it = s.eventIndex.find(eid);
      if (it == s.eventIndex.end() || it->second != cid) {
        std::ostringstream os;
        os << "event index stale for " << eid;
        out.push_back(os.str());
      }
    }
    for (const auto& [fid, f] : c.facts) {
      ++facts;
      auto it = s.factIndex.find(fid);
      if (it == s.factIndex.end() || it->second != cid) {
        std::ostringstream os;
        os << "fact index stale for " << fid;
        out.push_back(os.str());
      }
    }
  }
  if (events != s.eventIndex.size()) out.push_back("event index holds dead ids");
  if (facts != s.factIndex.size()) out.push_back("fact index holds dead ids");
  return out;
}

}  // namespace mhl
