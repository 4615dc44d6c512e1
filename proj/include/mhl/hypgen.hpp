#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <unordered_set>
#include <vector>

#include "mhl/cluster_ops.hpp"

namespace mhl {

template <class E>
struct GeneratedEvent {
  E data;
  std::optional<std::int64_t> timestamp;
};

/// One hypothesis returned by the application for one leaf.
template <class E, class F>
struct Hypothesis {
  std::vector<GeneratedEvent<E>> events;
  std::vector<F> facts;
  double probability = 0.0;
};

template <class E>
struct ProvidedEvent {
  EventId id;
  E data;
  std::optional<std::int64_t> timestamp;
};

template <class F>
struct ProvidedFact {
  FactId id;
  F data;
};

/// The requested information that is true in one leaf, passed by value.
template <class E, class F>
struct Provided {
  std::vector<ProvidedEvent<E>> events;
  std::vector<ProvidedFact<F>> facts;
};

/// Application callback. Must be deterministic in its input and must not call
/// back into the world.
template <class E, class F>
using HypothesisGenerator = std::function<std::vector<Hypothesis<E, F>>(const Provided<E, F>&)>;

/// What one generator call saw and produced.
struct GenerationRecord {
  std::uint64_t generation = 0;
  ClusterId cluster;
  LeafId leaf;
  double leafProbability = 0.0;
  std::vector<EventId> providedEvents;
  std::vector<FactId> providedFacts;
  std::vector<EventGroupId> premiseGroups;  // groups holding the provided information
  std::vector<EventGroupId> producedGroups;
  std::vector<double> rawProbabilities;
};

using GenerationLog = std::function<void(const GenerationRecord&)>;

/// Runs the generator once per leaf of the cluster and grows the tree.
///
/// Every new event group hangs under the leaf it was generated for. One
/// constraint per leaf ties the new groups to the groups that supplied the
/// provided information, and one constraint ties together all groups of the
/// generation. Provided facts are consumed. The generator is called for every
/// leaf before anything is modified, so a failing generator leaves the cluster
/// untouched.
template <class E, class F>
std::vector<EventGroupId> hypGen(Store<E, F>& store, Cluster<E, F>& c, std::span<const EventId> reqEvents,
                                 std::span<const FactId> reqFacts, const HypothesisGenerator<E, F>& generator,
                                 const GenerationLog& log = {}) {
  const std::unordered_set<EventId> wantEvents(reqEvents.begin(), reqEvents.end());
  const std::unordered_set<FactId> wantFacts(reqFacts.begin(), reqFacts.end());

  struct Pending {
    LeafId leaf;
    std::vector<FactId> provFacts;
    std::vector<EventGroupId> premise;
    GenerationRecord record;
    std::vector<Hypothesis<E, F>> hyps;
  };
  std::vector<Pending> pending;
  pending.reserve(c.leaves.size());

  const std::uint64_t generation = store.generationSerial + 1;
  for (const auto& [lid, leaf] : c.leaves) {
    Pending p;
    p.leaf = lid;
    Provided<E, F> provided;
    std::set<EventGroupId> premise;
    if (!wantEvents.empty()) {
      for (EventGroupId g : pathToRoot(c, leaf.group)) {
        for (EventId e : c.group(g).events) {
          if (!wantEvents.count(e)) continue;
          const Event<E>& ev = c.events.at(e);
          provided.events.push_back({e, ev.data, ev.timestamp});
          p.record.providedEvents.push_back(e);
          if (g != c.root) premise.insert(g);
        }
      }
    }
    for (FactId f : leaf.facts) {
      if (!wantFacts.count(f)) continue;
      const Fact<F>& fact = c.facts.at(f);
      provided.facts.push_back({f, fact.data});
      p.provFacts.push_back(f);
      if (fact.dependsOn != c.root) premise.insert(fact.dependsOn);
    }
    p.premise.assign(premise.begin(), premise.end());

    p.hyps = generator(provided);
    if (p.hyps.empty()) throw Error(Errc::EmptyGeneration, "generator returned no hypotheses");
    bool anyMass = false;
    for (const auto& h : p.hyps) {
      if (!(h.probability >= 0.0) || !std::isfinite(h.probability))
        throw Error(Errc::InvalidProbability, "hypothesis probability must be finite and >= 0");
      anyMass = anyMass || h.probability > 0.0;
    }
    if (!anyMass) throw Error(Errc::ZeroMass, "all hypotheses have probability zero");

    p.record.generation = generation;
    p.record.cluster = c.id;
    p.record.leaf = lid;
    p.record.leafProbability = leaf.probability;
    p.record.providedFacts = p.provFacts;
    p.record.premiseGroups = p.premise;
    pending.push_back(std::move(p));
  }

  store.generationSerial = generation;
  std::vector<EventGroupId> newGroups;
  for (Pending& p : pending) {
    const Leaf old = c.leaves.at(p.leaf);
    Constraint rule2{store.ids.template next<ConstraintId>(), {}, {++store.constraintTagSerial}};
    rule2.groups.insert(p.premise.begin(), p.premise.end());

    std::vector<FactId> carried;
    for (FactId f : old.facts)
      if (!std::binary_search(p.provFacts.begin(), p.provFacts.end(), f)) carried.push_back(f);

    for (auto& h : p.hyps) {
      EventGroupId g = store.addGroup(c, old.group, generation);
      for (auto& ev : h.events) store.addEvent(c, g, std::move(ev.data), ev.timestamp, generation);
      LeafId nl = addLeaf(c, store.ids.template next<LeafId>(), g, h.probability * old.probability);
      Leaf& leaf = c.leaves.at(nl);
      for (auto& fd : h.facts) {
        FactId f = store.addFact(c, g, std::move(fd));
        addLeafFact(c, leaf, f);
      }
      for (FactId f : carried) addLeafFact(c, leaf, f);
      rule2.groups.insert(g);
      newGroups.push_back(g);
      p.record.producedGroups.push_back(g);
      p.record.rawProbabilities.push_back(h.probability);
    }
    detachLeaf(c, p.leaf);
    c.constraints.emplace(rule2.id, std::move(rule2));
    if (log) log(p.record);
  }

  Constraint rule1{store.ids.template next<ConstraintId>(), {newGroups.begin(), newGroups.end()},
                   {++store.constraintTagSerial}};
  c.constraints.emplace(rule1.id, std::move(rule1));
  normalize(c);

  // Provided facts are consumed by the generation.
  std::vector<FactId> consumed;
  for (const auto& [fid, f] : c.facts)
    if (f.leafRefs == 0) consumed.push_back(fid);
  for (FactId f : consumed) store.removeFact(c, f);
  return newGroups;
}

}  // namespace mhl
