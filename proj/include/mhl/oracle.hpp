#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "mhl/errors.hpp"
#include "mhl/hypgen.hpp"
#include "mhl/store.hpp"

namespace mhl {

/// One interpretation of the whole world. Events are identified by payload and
/// the serial of the generation that produced them; ids play no part.
template <class E, class F>
struct GlobalHypothesis {
  std::vector<std::pair<std::uint64_t, E>> events;
  std::vector<F> facts;
  double probability = 0.0;

  void canonicalize() {
    std::sort(events.begin(), events.end());
    std::sort(facts.begin(), facts.end());
  }
};

template <class E, class F>
using HypothesisKey = std::pair<std::vector<std::pair<std::uint64_t, E>>, std::vector<F>>;

/// Probability per distinct (events, facts) content; duplicates are summed.
template <class E, class F>
using Distribution = std::map<HypothesisKey<E, F>, double>;

template <class E, class F>
Distribution<E, F> toDistribution(std::vector<GlobalHypothesis<E, F>> hyps) {
  Distribution<E, F> d;
  for (auto& h : hyps) {
    h.canonicalize();
    d[{std::move(h.events), std::move(h.facts)}] += h.probability;
  }
  return d;
}

/// Largest absolute probability difference over the union of supports, or
/// infinity if the supports differ.
template <class E, class F>
double distributionDistance(const Distribution<E, F>& a, const Distribution<E, F>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (const auto& [key, p] : a) {
    auto it = b.find(key);
    if (it == b.end()) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, std::abs(p - it->second));
  }
  return worst;
}

/// Reference tracker without clusters, constraints or pruning: it keeps the
/// explicit list of global hypotheses and branches every one of them on every
/// generation. Exponential by construction; meant for small test scenarios.
template <class E, class F>
class FlatOracle {
 public:
  using EventSelector = std::function<bool(const E&)>;
  using FactSelector = std::function<bool(const F&)>;

  explicit FlatOracle(std::size_t bound = 100000) : bound_(bound) { hyps_.push_back({}); hyps_.back().probability = 1.0; }

  /// Branches each global hypothesis on the generator's output for the
  /// information the selectors pick out of it.
  void generate(const EventSelector& pickEvent, const FactSelector& pickFact,
                const HypothesisGenerator<E, F>& generator) {
    const std::uint64_t generation = ++generation_;
    std::vector<GlobalHypothesis<E, F>> next;
    for (const auto& h : hyps_) {
      Provided<E, F> provided;
      std::vector<bool> consumed(h.facts.size(), false);
      std::uint64_t fakeId = 0;
      if (pickEvent)
        for (const auto& [gen, ev] : h.events)
          if (pickEvent(ev)) provided.events.push_back({EventId{++fakeId}, ev, std::nullopt});
      if (pickFact) {
        for (std::size_t i = 0; i < h.facts.size(); ++i) {
          if (pickFact(h.facts[i])) {
            provided.facts.push_back({FactId{++fakeId}, h.facts[i]});
            consumed[i] = true;
          }
        }
      }
      auto out = generator(provided);
      if (out.empty()) throw Error(Errc::EmptyGeneration, "generator returned no hypotheses");
      bool anyMass = false;
      for (const auto& g : out) anyMass = anyMass || g.probability > 0.0;
      if (!anyMass) throw Error(Errc::ZeroMass, "all hypotheses have probability zero");

      for (auto& g : out) {
        GlobalHypothesis<E, F> child;
        child.events = h.events;
        for (auto& ev : g.events) child.events.emplace_back(generation, ev.data);
        child.facts = g.facts;
        for (std::size_t i = 0; i < h.facts.size(); ++i)
          if (!consumed[i]) child.facts.push_back(h.facts[i]);
        child.probability = h.probability * g.probability;
        next.push_back(std::move(child));
        if (next.size() > bound_) throw Error(Errc::SizeGuard, "oracle hypothesis bound exceeded");
      }
    }
    double total = 0.0;
    for (const auto& h : next) total += h.probability;
    for (auto& h : next) h.probability /= total;
    hyps_ = std::move(next);
  }

  const std::vector<GlobalHypothesis<E, F>>& hypotheses() const { return hyps_; }

  /// Every distinct fact payload present in at least one global hypothesis.
  std::vector<F> allFacts() const {
    std::vector<F> out;
    for (const auto& h : hyps_) out.insert(out.end(), h.facts.begin(), h.facts.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  std::uint64_t generations() const { return generation_; }

 private:
  std::vector<GlobalHypothesis<E, F>> hyps_;
  std::uint64_t generation_ = 0;
  std::size_t bound_;
};

/// Cartesian product over the clusters of a store, one leaf per cluster.
/// `certain` holds events already flushed out of the trees; they belong to
/// every global hypothesis.
template <class E, class F>
std::vector<GlobalHypothesis<E, F>> crossProduct(const Store<E, F>& store, std::span<const Event<E>> certain = {},
                                                 std::size_t bound = 100000) {
  GlobalHypothesis<E, F> seed;
  seed.probability = 1.0;
  for (const auto& e : certain) seed.events.emplace_back(e.generation, e.data);
  std::vector<GlobalHypothesis<E, F>> acc{seed};

  for (const auto& [cid, c] : store.clusters) {
    std::vector<GlobalHypothesis<E, F>> local;
    for (const auto& [lid, leaf] : c.leaves) {
      GlobalHypothesis<E, F> part;
      part.probability = leaf.probability;
      for (EventGroupId g : pathToRoot(c, leaf.group))
        for (EventId e : c.group(g).events) {
          const auto& ev = c.events.at(e);
          part.events.emplace_back(ev.generation, ev.data);
        }
      for (FactId f : leaf.facts) part.facts.push_back(c.facts.at(f).data);
      local.push_back(std::move(part));
    }
    if (acc.size() * local.size() > bound) throw Error(Errc::SizeGuard, "cross product bound exceeded");
    std::vector<GlobalHypothesis<E, F>> next;
    next.reserve(acc.size() * local.size());
    for (const auto& a : acc) {
      for (const auto& b : local) {
        GlobalHypothesis<E, F> h = a;
        h.events.insert(h.events.end(), b.events.begin(), b.events.end());
        h.facts.insert(h.facts.end(), b.facts.begin(), b.facts.end());
        h.probability = a.probability * b.probability;
        next.push_back(std::move(h));
      }
    }
    acc = std::move(next);
  }
  for (auto& h : acc) h.canonicalize();
  return acc;
}

}  // namespace mhl
