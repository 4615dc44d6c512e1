#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace th;

TEST(Oracle, BranchesEveryHypothesis) {
  mhl::FlatOracle<S, S> o;
  o.generate({}, {}, constant({hyp({"a"}, {}, 0.5), hyp({"b"}, {}, 0.5)}));
  EXPECT_EQ(o.hypotheses().size(), 2u);
  o.generate({}, {}, constant({hyp({"c"}, {}, 0.5), hyp({"d"}, {}, 0.5)}));
  o.generate({}, {}, constant({hyp({"e"}, {}, 0.5), hyp({"f"}, {}, 0.5)}));
  EXPECT_EQ(o.hypotheses().size(), 8u);
}

TEST(Oracle, SizeGuard) {
  mhl::FlatOracle<S, S> o(3);
  o.generate({}, {}, constant({hyp({"a"}, {}, 0.5), hyp({"b"}, {}, 0.5)}));
  EXPECT_THROW(o.generate({}, {}, constant({hyp({"c"}, {}, 0.5), hyp({"d"}, {}, 0.5)})), mhl::Error);
}

TEST(CrossProduct, CountsMultiply) {
  StoreS store;
  makeCluster(store, {0.5, 0.5}, "a");
  makeCluster(store, {0.5, 0.3, 0.2}, "b");
  EXPECT_EQ(mhl::crossProduct(store).size(), 6u);
}

TEST(CrossProduct, SingleClusterIsVerbatim) {
  StoreS store;
  auto id = makeCluster(store, {0.5, 0.3, 0.2}, "a");
  auto hs = mhl::crossProduct(store);
  ASSERT_EQ(hs.size(), 3u);
  std::vector<double> p;
  for (auto& h : hs) p.push_back(h.probability);
  std::sort(p.rbegin(), p.rend());
  EXPECT_EQ(p, sortedProbs(store.cluster(id)));
}

TEST(CrossProduct, EmptyWorld) {
  StoreS store;
  auto hs = mhl::crossProduct(store);
  ASSERT_EQ(hs.size(), 1u);
  EXPECT_TRUE(hs[0].events.empty());
  EXPECT_DOUBLE_EQ(hs[0].probability, 1.0);
}

TEST(Oracle, MatchesEngineOnFactChain) {
  // Three tracks, each a fact that is repeatedly consumed and replaced; one
  // generation joins two of them.
  WorldS w;
  mhl::FlatOracle<S, S> o;
  std::vector<mhl::Event<S>> certain;
  w.setCertainEventSink([&](const mhl::Event<S>& e, mhl::ClusterId) { certain.push_back(e); });

  auto step = [&](std::vector<S> want, const Gen& gen) {
    std::vector<mhl::FactId> req;
    for (const auto& f : w.requestableInfo().facts)
      if (std::find(want.begin(), want.end(), f.data) != want.end()) req.push_back(f.id);
    w.generate({}, req, gen);
    o.generate({}, [&](const S& f) { return std::find(want.begin(), want.end(), f) != want.end(); }, gen);
    ASSERT_TRUE(w.validate().empty());
    auto engine = mhl::toDistribution(mhl::crossProduct<S, S>(w.store(), certain));
    auto flat = mhl::toDistribution(o.hypotheses());
    ASSERT_LE(mhl::distributionDistance(engine, flat), 1e-9);
  };
  auto relabel = [](const S& suffix, double p) {
    return Gen([suffix, p](const mhl::Provided<S, S>& prov) {
      std::vector<Hyp> out;
      std::vector<S> names;
      for (const auto& f : prov.facts) names.push_back(f.data);
      std::sort(names.begin(), names.end());
      S base = "none";
      for (const auto& n : names) base += n;
      out.push_back(hyp({base + suffix + "!"}, {base + suffix}, p));
      out.push_back(hyp({base + suffix + "?"}, {}, 1.0 - p));
      return out;
    });
  };
  step({}, constant({hyp({"t1"}, {"a"}, 0.6), hyp({"c1"}, {"b"}, 0.4)}));
  step({}, constant({hyp({"t2"}, {"x"}, 0.9), hyp({"c2"}, {}, 0.1)}));
  step({"a"}, relabel("1", 0.7));
  step({"b", "x"}, relabel("2", 0.2));
  step({"nonebx2", "nonea1"}, relabel("3", 0.5));
}
