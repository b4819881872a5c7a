#include "iab/spanning.hpp"

#include <string>

namespace iab {

OrientedForest aldous_broder(const Network& net, VertexId root, Rng& rng, std::size_t step_cap) {
  if (!net.contains(root)) throw UnknownVertexError("unknown root " + std::to_string(root));
  const std::size_t n = net.num_vertices();
  OrientedForest forest(n);
  forest.add_root(root);
  std::size_t remaining = n - 1;
  VertexId v = root;
  for (std::size_t steps = 0; remaining > 0; ++steps) {
    if (steps == step_cap) throw StepCapError("Aldous-Broder walk did not cover the network within the step cap");
    const HalfEdge& h = sample_step(net, v, rng);
    if (!forest.contains(h.to)) {
      forest.set_parent(h.to, h.oriented().reversed());
      --remaining;
    }
    v = h.to;
  }
  return forest;
}

OrientedForest wilson(const Network& net, VertexId root, Rng& rng) {
  if (!net.contains(root)) throw UnknownVertexError("unknown root " + std::to_string(root));
  const std::size_t n = net.num_vertices();
  OrientedForest forest(n);
  forest.add_root(root);
  // Last exit edge from each vertex; following these from a start vertex
  // after the walk hits the tree traces its loop erasure.
  std::vector<HalfEdge> next(n);
  for (VertexId s = 0; s < n; ++s) {
    if (forest.contains(s)) continue;
    VertexId v = s;
    while (!forest.contains(v)) {
      next[v] = sample_step(net, v, rng);
      v = next[v].to;
    }
    for (v = s; !forest.contains(v); v = next[v].to) forest.set_parent(v, next[v].oriented());
  }
  return forest;
}

}  // namespace iab
