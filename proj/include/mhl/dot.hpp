#pragma once

#include <sstream>
#include <string>

#include "mhl/model.hpp"

namespace mhl {

/// Graphviz rendering of one cluster for debugging: event groups as nodes
/// labelled with their event ids, leaves as boxes, constraints as dashed
/// clusters around their groups. Not a stable format.
template <class E, class F>
std::string toDot(const Cluster<E, F>& c) {
  std::ostringstream os;
  os << "digraph " << c.id << " {\n  node [shape=ellipse];\n";
  for (const auto& [gid, g] : c.groups) {
    os << "  \"" << gid << "\" [label=\"" << gid;
    if (!g.events.empty()) {
      os << "\\n";
      for (std::size_t i = 0; i < g.events.size(); ++i) os << (i ? "," : "") << g.events[i];
    }
    os << "\"];\n";
    for (EventGroupId ch : g.children) os << "  \"" << gid << "\" -> \"" << ch << "\";\n";
  }
  for (const auto& [lid, l] : c.leaves) {
    os << "  \"" << lid << "\" [shape=box,label=\"" << lid << " p=" << l.probability;
    for (FactId f : l.facts) os << "\\n" << f;
    os << "\"];\n  \"" << l.group << "\" -> \"" << lid << "\" [style=dotted];\n";
  }
  std::size_t n = 0;
  for (const auto& [cid, cons] : c.constraints) {
    // Graphviz subgraphs cannot overlap, so constraints are drawn as dashed hyperedges.
    os << "  \"" << cid << "\" [shape=point];\n";
    for (EventGroupId g : cons.groups)
      os << "  \"" << cid << "\" -> \"" << g << "\" [style=dashed,arrowhead=none,color=\"/set19/" << (n % 9 + 1)
         << "\"];\n";
    ++n;
  }
  os << "}\n";
  return os.str();
}

}  // namespace mhl
