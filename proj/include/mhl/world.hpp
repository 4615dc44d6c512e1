#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mhl/hypgen.hpp"
#include "mhl/pruning.hpp"
#include "mhl/validate.hpp"

namespace mhl {

/// Everything the library currently holds, copied out.
template <class E, class F>
struct Snapshot {
  std::vector<Event<E>> events;
  std::vector<Fact<F>> facts;
};

template <class E, class F>
struct GenerateReport {
  ClusterId generatedIn;                // cluster the generator ran on
  std::vector<ClusterId> clusters;      // clusters resulting from this call
  std::vector<Event<E>> certainEvents;  // events flushed as certain
  std::size_t joinedClusters = 0;
};

/// Facade over a Store that runs the full pipeline for each request:
/// join, generate, prune, flush certainties, split, relevance collapse.
template <class E, class F>
class World {
 public:
  using ClusterT = Cluster<E, F>;
  using Generator = HypothesisGenerator<E, F>;

  World() = default;
  explicit World(std::vector<PruneStrategy> strategies) : strategies_(std::move(strategies)) {}

  void setPruneStrategies(std::vector<PruneStrategy> strategies) { strategies_ = std::move(strategies); }
  const std::vector<PruneStrategy>& pruneStrategies() const { return strategies_; }

  void setCertainEventSink(typename Store<E, F>::CertainSink sink) { store_.certainSink = std::move(sink); }
  void subscribeChanges(typename Store<E, F>::ChangeSink sink) { store_.changeSink = std::move(sink); }
  void setRelevancePredicate(RelevancePredicate<E, F> predicate) { relevant_ = std::move(predicate); }
  void setGenerationLog(GenerationLog log) { log_ = std::move(log); }

  /// Runs one hypothesis generation over the requested events and facts.
  GenerateReport<E, F> generate(std::span<const EventId> reqEvents, std::span<const FactId> reqFacts,
                                const Generator& generator) {
    GenerateReport<E, F> report;
    const auto strategies = std::span<const PruneStrategy>(strategies_);
    PruneFn<E, F> pruneStage = [strategies](Store<E, F>& s, ClusterT& c) { pruneLeaves(s, c, strategies); };

    auto joined = joinClusters(store_, reqEvents, reqFacts, pruneStage);
    store_.commit();
    report.generatedIn = joined.cluster;
    report.joinedClusters = joined.joined;

    ClusterT& c = store_.cluster(joined.cluster);
    hypGen(store_, c, std::span<const EventId>(joined.events), std::span<const FactId>(joined.facts), generator,
           log_);
    pruneLeaves(store_, c, strategies);
    store_.commit();

    std::vector<ClusterId> touched;
    auto flushed = flushCertainties(store_, joined.cluster);
    absorb(report, flushed, touched);
    store_.commit();

    if (!flushed.clusterRemoved) {
      for (ClusterId part : split(store_, joined.cluster)) {
        auto again = flushCertainties(store_, part);
        absorb(report, again, touched);
        if (!again.clusterRemoved) touched.push_back(part);
      }
      store_.commit();
    }

    auto collapsed = relevanceCollapse(store_, std::span<const ClusterId>(touched), relevant_);
    report.certainEvents.insert(report.certainEvents.end(), collapsed.certainEvents.begin(),
                                collapsed.certainEvents.end());
    store_.commit();

    for (ClusterId id : touched)
      if (store_.clusters.count(id)) report.clusters.push_back(id);
    for (ClusterId id : collapsed.factClusters)
      if (store_.clusters.count(id)) report.clusters.push_back(id);
    return report;
  }

  /// Best-1 collapse of every cluster the relevance predicate rejects.
  FlushResult<E, F> collapseIrrelevant() {
    auto r = relevanceCollapse(store_, relevant_);
    store_.commit();
    return r;
  }

  Snapshot<E, F> requestableInfo() const {
    Snapshot<E, F> snap;
    for (const auto& [cid, c] : store_.clusters) {
      for (const auto& [eid, e] : c.events) snap.events.push_back(e);
      for (const auto& [fid, f] : c.facts) snap.facts.push_back(f);
    }
    return snap;
  }

  const std::map<ClusterId, ClusterT>& clusters() const { return store_.clusters; }
  const ClusterT& cluster(ClusterId id) const { return store_.cluster(id); }

  std::optional<ClusterId> clusterOfEvent(EventId id) const {
    auto it = store_.eventIndex.find(id);
    if (it == store_.eventIndex.end()) return std::nullopt;
    return it->second;
  }
  std::optional<ClusterId> clusterOfFact(FactId id) const {
    auto it = store_.factIndex.find(id);
    if (it == store_.factIndex.end()) return std::nullopt;
    return it->second;
  }
  const Fact<F>* findFact(FactId id) const {
    auto c = clusterOfFact(id);
    return c ? &store_.cluster(*c).facts.at(id) : nullptr;
  }

  std::vector<std::string> validate() const { return validateStore(store_); }

  const Store<E, F>& store() const { return store_; }

 private:
  static void absorb(GenerateReport<E, F>& report, const FlushResult<E, F>& r, std::vector<ClusterId>& touched) {
    report.certainEvents.insert(report.certainEvents.end(), r.certainEvents.begin(), r.certainEvents.end());
    touched.insert(touched.end(), r.factClusters.begin(), r.factClusters.end());
  }

  Store<E, F> store_;
  std::vector<PruneStrategy> strategies_;
  RelevancePredicate<E, F> relevant_;
  GenerationLog log_;
};

}  // namespace mhl
