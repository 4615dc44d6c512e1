// Two coin flips tracked as hypotheses, then resolved by pruning.
#include <iostream>
#include <string>

#include "mhl/mhl.hpp"

int main() {
  using World = mhl::World<std::string, std::string>;
  using Hyp = mhl::Hypothesis<std::string, std::string>;

  World world;
  world.setCertainEventSink([](const mhl::Event<std::string>& e, mhl::ClusterId) {
    std::cout << "certain: " << e.data << '\n';
  });

  auto flip = [](const std::string& coin) {
    return [coin](const mhl::Provided<std::string, std::string>&) {
      return std::vector<Hyp>{{{{coin + " landed heads", std::nullopt}}, {coin + "=H"}, 0.5},
                              {{{coin + " landed tails", std::nullopt}}, {coin + "=T"}, 0.5}};
    };
  };
  world.generate({}, {}, flip("a"));
  world.generate({}, {}, flip("b"));
  std::cout << "clusters after two independent flips: " << world.clusters().size() << '\n';

  // Someone reports that both coins agree: the two clusters must be joined.
  std::vector<mhl::FactId> both;
  for (const auto& f : world.requestableInfo().facts) both.push_back(f.id);
  world.generate({}, both, [](const mhl::Provided<std::string, std::string>& p) {
    bool agree = p.facts.size() == 2 && p.facts[0].data.back() == p.facts[1].data.back();
    return std::vector<Hyp>{{{}, {}, agree ? 0.9 : 0.1}};
  });
  const auto& c = world.clusters().begin()->second;
  std::cout << "joined cluster has " << c.leaves.size() << " leaves\n";
  for (const auto& [id, leaf] : c.leaves) std::cout << "  " << id << " p=" << leaf.probability << '\n';

  // Nothing will be asked about these coins again: keep the best leaf only.
  world.setRelevancePredicate([](const mhl::Cluster<std::string, std::string>&) { return false; });
  world.collapseIrrelevant();
  std::cout << "clusters left: " << world.clusters().size() << '\n';
  auto errors = world.validate();
  std::cout << (errors.empty() ? "world is consistent\n" : errors.front() + '\n');
}
