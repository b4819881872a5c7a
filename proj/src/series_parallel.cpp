#include <map>
#include <string>
#include <vector>

#include "iab/potential.hpp"

namespace iab {

namespace {

using Adjacency = std::vector<std::map<VertexId, Rational>>;

void remove_edge(Adjacency& adj, VertexId x, VertexId y) {
  adj[x].erase(y);
  adj[y].erase(x);
}

void add_edge(Adjacency& adj, VertexId x, VertexId y, const Rational& g) {
  if (x == y) return;
  adj[x][y] += g;
  adj[y][x] += g;
}

}  // namespace

Rational series_parallel_reduce(const Network& net, std::span<const VertexId> source, std::span<const VertexId> sink) {
  std::vector<Rational> g;
  g.reserve(net.num_edges());
  for (const Edge& e : net.edges()) g.push_back(to_rational(e.conductance));
  return series_parallel_reduce(net, g, source, sink);
}

Rational series_parallel_reduce(const Network& net, std::span<const Rational> conductance,
                                std::span<const VertexId> source, std::span<const VertexId> sink) {
  if (conductance.size() != net.num_edges()) throw ValidationError("conductance vector does not match edge count");
  if (source.empty() || sink.empty()) throw ValidationError("source and sink sets must be nonempty");

  // Wire the source set into node s and the sink set into node t.
  const std::size_t n = net.num_vertices();
  const VertexId s = static_cast<VertexId>(n), t = static_cast<VertexId>(n + 1);
  std::vector<VertexId> node(n);
  for (VertexId v = 0; v < n; ++v) node[v] = v;
  for (VertexId v : source) {
    if (!net.contains(v)) throw UnknownVertexError("unknown source vertex " + std::to_string(v));
    node[v] = s;
  }
  for (VertexId v : sink) {
    if (!net.contains(v)) throw UnknownVertexError("unknown sink vertex " + std::to_string(v));
    if (node[v] == s) throw ValidationError("source and sink sets intersect");
    node[v] = t;
  }

  Adjacency adj(n + 2);
  for (EdgeId id = 0; id < net.num_edges(); ++id) {
    const Edge& e = net.edge(id);
    if (conductance[id] <= 0) throw ValidationError("conductances must be positive");
    add_edge(adj, node[e.a], node[e.b], conductance[id]);  // loops vanish, parallels merge
  }

  std::vector<VertexId> work;
  std::vector<char> queued(n + 2, 0);
  auto push = [&](VertexId v) {
    if (v != s && v != t && !queued[v]) {
      queued[v] = 1;
      work.push_back(v);
    }
  };
  for (VertexId v = 0; v < n; ++v)
    if (node[v] == v) push(v);

  while (!work.empty()) {
    const VertexId v = work.back();
    work.pop_back();
    queued[v] = 0;
    auto& nbrs = adj[v];
    if (nbrs.size() == 1) {
      // Dangling: carries no current.
      const VertexId x = nbrs.begin()->first;
      remove_edge(adj, v, x);
      push(x);
    } else if (nbrs.size() == 2) {
      auto it = nbrs.begin();
      const auto [x, gx] = *it++;
      const auto [y, gy] = *it;
      const Rational series = gx * gy / (gx + gy);
      remove_edge(adj, v, x);
      remove_edge(adj, v, y);
      add_edge(adj, x, y, series);
      push(x);
      push(y);
    }
  }

  for (VertexId v = 0; v < n; ++v)
    if (!adj[v].empty())
      throw IrreducibleError("network is not series-parallel reducible between the given sets (stuck at vertex " +
                             std::to_string(v) + ")");
  auto it = adj[s].find(t);
  return it == adj[s].end() ? Rational(0) : it->second;
}

}  // namespace iab
