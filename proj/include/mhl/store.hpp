#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mhl/errors.hpp"
#include "mhl/model.hpp"

namespace mhl {

enum class ChangeKind { EventAdded, EventRemoved, EventCertain, FactAdded, FactRemoved };

inline const char* to_string(ChangeKind kind) {
  switch (kind) {
    case ChangeKind::EventAdded: return "eventAdded";
    case ChangeKind::EventRemoved: return "eventRemoved";
    case ChangeKind::EventCertain: return "eventCertain";
    case ChangeKind::FactAdded: return "factAdded";
    case ChangeKind::FactRemoved: return "factRemoved";
  }
  return "?";
}

/// Change notification. Payload pointers are only valid during the callback.
template <class E, class F>
struct Change {
  ChangeKind kind;
  EventId eventId;
  FactId factId;
  ClusterId cluster;
  const E* event = nullptr;
  const F* fact = nullptr;
};

/// Owns every cluster of one world together with the id allocator, the
/// event/fact indices and the buffered change notifications.
///
/// The cluster operations (join, split, hypothesis generation, pruning) are
/// free functions over a Store. All content changes go through the helpers
/// below so that the indices and the notification stream stay coherent.
template <class E, class F>
class Store {
 public:
  using ClusterT = Cluster<E, F>;
  using CertainSink = std::function<void(const Event<E>&, ClusterId)>;
  using ChangeSink = std::function<void(const Change<E, F>&)>;

  IdAllocator ids;
  std::map<ClusterId, ClusterT> clusters;
  std::unordered_map<EventId, ClusterId> eventIndex;
  std::unordered_map<FactId, ClusterId> factIndex;
  std::uint64_t generationSerial = 0;
  std::uint64_t constraintTagSerial = 0;

  CertainSink certainSink;
  ChangeSink changeSink;

  ClusterT& cluster(ClusterId id) {
    auto it = clusters.find(id);
    if (it == clusters.end()) throw Error(Errc::UnknownId, "cluster not live");
    return it->second;
  }
  const ClusterT& cluster(ClusterId id) const {
    auto it = clusters.find(id);
    if (it == clusters.end()) throw Error(Errc::UnknownId, "cluster not live");
    return it->second;
  }

  /// New cluster: an empty root group carrying one leaf of probability 1.
  ClusterT& createCluster() {
    ClusterId id = ids.next<ClusterId>();
    ClusterT& c = clusters[id];
    c.id = id;
    c.root = ids.next<EventGroupId>();
    c.groups.emplace(c.root, EventGroup{c.root, {}, std::nullopt, {}, std::nullopt, {}, 0, c.root.value});
    addLeaf(c, ids.next<LeafId>(), c.root, 1.0);
    return c;
  }

  EventGroupId addGroup(ClusterT& c, EventGroupId parent, std::uint64_t generation) {
    EventGroupId g = ids.next<EventGroupId>();
    c.groups.emplace(g, EventGroup{g, {}, parent, {}, std::nullopt, {}, generation, g.value});
    c.group(parent).children.push_back(g);
    return g;
  }

  EventId addEvent(ClusterT& c, EventGroupId g, E data, std::optional<std::int64_t> timestamp,
                   std::uint64_t generation, std::uint64_t origin = 0) {
    EventId id = ids.next<EventId>();
    c.events.emplace(id, Event<E>{id, std::move(data), timestamp, g, generation, origin ? origin : id.value});
    c.group(g).events.push_back(id);
    eventIndex[id] = c.id;
    if (changeSink) addedEvents_.insert(id);
    return id;
  }

  FactId addFact(ClusterT& c, EventGroupId dependsOn, F data, std::uint64_t origin = 0) {
    FactId id = ids.next<FactId>();
    c.facts.emplace(id, Fact<F>{id, std::move(data), dependsOn, origin ? origin : id.value, 0});
    c.group(dependsOn).facts.push_back(id);
    factIndex[id] = c.id;
    if (changeSink) addedFacts_.insert(id);
    return id;
  }

  /// Deletes an event. `certain` routes it to the certain-event sink first.
  void removeEvent(ClusterT& c, EventId id, bool certain = false) {
    auto it = c.events.find(id);
    if (it == c.events.end()) return;
    if (certain && certainSink) certainSink(it->second, c.id);
    if (changeSink && !addedEvents_.erase(id)) {
      Pending p{certain ? ChangeKind::EventCertain : ChangeKind::EventRemoved, id, {}, c.id,
                it->second.data, std::nullopt};
      removals_.push_back(std::move(p));
    }
    auto gIt = c.groups.find(it->second.group);
    if (gIt != c.groups.end()) detail::eraseValue(gIt->second.events, id);
    eventIndex.erase(id);
    c.events.erase(it);
  }

  /// Deletes a fact record; the caller guarantees no leaf still references it.
  void removeFact(ClusterT& c, FactId id) {
    auto it = c.facts.find(id);
    if (it == c.facts.end()) return;
    if (changeSink && !addedFacts_.erase(id)) {
      removals_.push_back(Pending{ChangeKind::FactRemoved, {}, id, c.id, std::nullopt, it->second.data});
    }
    auto gIt = c.groups.find(it->second.dependsOn);
    if (gIt != c.groups.end()) detail::eraseValue(gIt->second.facts, id);
    factIndex.erase(id);
    c.facts.erase(it);
  }

  /// Removes a group that has no children and no leaf, with its events and facts.
  void removeGroup(ClusterT& c, EventGroupId g) {
    EventGroup& grp = c.group(g);
    for (EventId e : std::vector<EventId>(grp.events)) removeEvent(c, e);
    for (FactId f : std::vector<FactId>(grp.facts)) removeFact(c, f);
    if (grp.parent) detail::eraseValue(c.group(*grp.parent).children, g);
    dropFromConstraints(c, g);
    c.groups.erase(g);
  }

  /// Deletes a whole cluster, announcing every event and fact it held as removed.
  void dropCluster(ClusterId id) {
    auto it = clusters.find(id);
    if (it == clusters.end()) return;
    ClusterT& c = it->second;
    for (auto& [eid, ev] : c.events) {
      if (changeSink && !addedEvents_.erase(eid))
        removals_.push_back(Pending{ChangeKind::EventRemoved, eid, {}, id, ev.data, std::nullopt});
      eventIndex.erase(eid);
    }
    for (auto& [fid, fact] : c.facts) {
      if (changeSink && !addedFacts_.erase(fid))
        removals_.push_back(Pending{ChangeKind::FactRemoved, {}, fid, id, std::nullopt, fact.data});
      factIndex.erase(fid);
    }
    clusters.erase(it);
  }

  /// Moves an event record (keeping its id) into another cluster's group.
  void transferEvent(ClusterT& from, ClusterT& to, EventId id, EventGroupId toGroup) {
    auto node = from.events.extract(id);
    node.mapped().group = toGroup;
    to.group(toGroup).events.push_back(id);
    to.events.insert(std::move(node));
    eventIndex[id] = to.id;
  }

  /// Moves a fact record (keeping its id) into another cluster; leaf refs are reset.
  void transferFact(ClusterT& from, ClusterT& to, FactId id, EventGroupId dependsOn) {
    auto node = from.facts.extract(id);
    node.mapped().dependsOn = dependsOn;
    node.mapped().leafRefs = 0;
    to.group(dependsOn).facts.push_back(id);
    to.facts.insert(std::move(node));
    factIndex[id] = to.id;
  }

  /// Registers a record that was inserted directly into a cluster map.
  void indexEvent(ClusterId c, EventId id) {
    eventIndex[id] = c;
    if (changeSink) addedEvents_.insert(id);
  }
  void indexFact(ClusterId c, FactId id) {
    factIndex[id] = c;
    if (changeSink) addedFacts_.insert(id);
  }

  /// Forgets an index entry without a notification (record moved or being discarded silently).
  void unindexEvent(EventId id) { eventIndex.erase(id); }
  void unindexFact(FactId id) { factIndex.erase(id); }

  /// Emits the buffered notifications of one pipeline stage: removals first,
  /// then additions in id order.
  void commit() {
    if (!changeSink) {
      removals_.clear();
      addedEvents_.clear();
      addedFacts_.clear();
      return;
    }
    auto removals = std::move(removals_);
    auto addedEvents = std::move(addedEvents_);
    auto addedFacts = std::move(addedFacts_);
    removals_.clear();
    addedEvents_.clear();
    addedFacts_.clear();
    for (const Pending& p : removals) {
      Change<E, F> ch{p.kind, p.eventId, p.factId, p.cluster};
      if (p.event) ch.event = &*p.event;
      if (p.fact) ch.fact = &*p.fact;
      changeSink(ch);
    }
    for (EventId e : addedEvents) {
      ClusterId cid = eventIndex.at(e);
      const auto& ev = clusters.at(cid).events.at(e);
      changeSink(Change<E, F>{ChangeKind::EventAdded, e, {}, cid, &ev.data, nullptr});
    }
    for (FactId f : addedFacts) {
      ClusterId cid = factIndex.at(f);
      const auto& fact = clusters.at(cid).facts.at(f);
      changeSink(Change<E, F>{ChangeKind::FactAdded, {}, f, cid, nullptr, &fact.data});
    }
  }

 private:
  struct Pending {
    ChangeKind kind;
    EventId eventId;
    FactId factId;
    ClusterId cluster;
    std::optional<E> event;
    std::optional<F> fact;
  };

  std::vector<Pending> removals_;
  std::set<EventId> addedEvents_;
  std::set<FactId> addedFacts_;
};

}  // namespace mhl
