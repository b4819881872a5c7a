#include "iab/forest.hpp"

#include <algorithm>
#include <string>

namespace iab {

std::size_t OrientedForest::size() const { return static_cast<std::size_t>(std::count(member_.begin(), member_.end(), 1)); }

void OrientedForest::add_root(VertexId v) {
  parent_[v].reset();
  member_[v] = 1;
}

void OrientedForest::set_parent(VertexId v, OrientedEdge e) {
  parent_[v] = e;
  member_[v] = 1;
}

std::vector<VertexId> OrientedForest::roots() const {
  std::vector<VertexId> out;
  for (VertexId v = 0; v < parent_.size(); ++v)
    if (member_[v] && !parent_[v]) out.push_back(v);
  return out;
}

std::vector<VertexId> OrientedForest::members() const {
  std::vector<VertexId> out;
  for (VertexId v = 0; v < member_.size(); ++v)
    if (member_[v]) out.push_back(v);
  return out;
}

std::size_t OrientedForest::num_edges() const {
  return static_cast<std::size_t>(std::count_if(parent_.begin(), parent_.end(), [](const auto& p) { return p.has_value(); }));
}

std::vector<EdgeId> OrientedForest::edge_ids() const {
  std::vector<EdgeId> out;
  for (const auto& p : parent_)
    if (p) out.push_back(p->id);
  std::sort(out.begin(), out.end());
  return out;
}

ForestKey canonical_key(const OrientedForest& forest) {
  ForestKey key;
  for (VertexId v = 0; v < forest.num_vertices(); ++v)
    if (const auto& p = forest.parent(v)) key.push_back((std::uint64_t{v} << 32) | p->id);
  return key;
}

ForestKey edge_set_key(std::span<const EdgeId> edges) {
  ForestKey key(edges.begin(), edges.end());
  std::sort(key.begin(), key.end());
  return key;
}

VertexId parent_vertex(const Network& net, const OrientedForest& forest, VertexId v) {
  const auto& p = forest.parent(v);
  return p ? net.head(*p) : kNoVertex;
}

std::optional<std::string> check_forest(const Network& net, const OrientedForest& forest) {
  const std::size_t n = forest.num_vertices();
  if (n != net.num_vertices()) return "forest and network sizes differ";
  for (VertexId v = 0; v < n; ++v) {
    const auto& p = forest.parent(v);
    if (!p) continue;
    if (!forest.contains(v)) return "vertex " + std::to_string(v) + " has a parent but is not a member";
    if (p->id >= net.num_edges()) return "vertex " + std::to_string(v) + " has an invalid edge id";
    if (net.tail(*p) != v) return "parent edge of " + std::to_string(v) + " does not emanate from it";
    if (net.edge(p->id).is_loop()) return "parent edge of " + std::to_string(v) + " is a self-loop";
    if (!forest.contains(net.head(*p))) return "parent of " + std::to_string(v) + " is not a member";
  }
  // Acyclicity: every chain of parents must end at a root.
  std::vector<char> state(n, 0);  // 0 new, 1 on stack, 2 done
  std::vector<VertexId> chain;
  for (VertexId s = 0; s < n; ++s) {
    if (!forest.contains(s) || state[s]) continue;
    VertexId v = s;
    while (v != kNoVertex && state[v] == 0) {
      state[v] = 1;
      chain.push_back(v);
      v = parent_vertex(net, forest, v);
    }
    if (v != kNoVertex && state[v] == 1) return "cycle through vertex " + std::to_string(v);
    for (VertexId u : chain) state[u] = 2;
    chain.clear();
  }
  return std::nullopt;
}

OrientedForest orient_tree(const Network& net, std::span<const EdgeId> tree_edges, VertexId root) {
  std::vector<std::vector<std::pair<VertexId, OrientedEdge>>> adj(net.num_vertices());
  for (EdgeId id : tree_edges) {
    const Edge& e = net.edge(id);
    if (e.is_loop()) throw ValidationError("tree contains a self-loop");
    adj[e.a].push_back({e.b, {id, false}});  // from b to a: tail b
    adj[e.b].push_back({e.a, {id, true}});   // from a to b: tail a
  }
  OrientedForest forest(net.num_vertices());
  forest.add_root(root);
  std::vector<VertexId> stack{root};
  while (!stack.empty()) {
    VertexId v = stack.back();
    stack.pop_back();
    for (const auto& [child, toward_v] : adj[v]) {
      if (forest.contains(child)) {
        if (forest.parent(v) && forest.parent(v)->id == toward_v.id) continue;
        throw ValidationError("edge set contains a cycle");
      }
      forest.set_parent(child, toward_v);
      stack.push_back(child);
    }
  }
  if (forest.num_edges() != tree_edges.size()) throw ValidationError("edge set is not connected to the root");
  return forest;
}

OrientedForest forest_from_entries(const Network& net, VertexId root,
                                   std::span<const std::pair<VertexId, OrientedEdge>> entries) {
  OrientedForest forest(net.num_vertices());
  if (root != kNoVertex) forest.add_root(root);
  for (const auto& [v, e] : entries) forest.set_parent(v, e.reversed());
  return forest;
}

namespace {

std::vector<std::vector<VertexId>> children_of(const Network& net, const OrientedForest& forest) {
  std::vector<std::vector<VertexId>> children(forest.num_vertices());
  for (VertexId v = 0; v < forest.num_vertices(); ++v)
    if (const auto& p = forest.parent(v)) children[net.head(*p)].push_back(v);
  return children;
}

ComponentStats subtree_stats(const std::vector<std::vector<VertexId>>& children, VertexId top,
                             const WiredQuotient* wq) {
  ComponentStats st;
  st.root = top;
  std::vector<std::pair<VertexId, std::size_t>> stack{{top, 0}};
  std::vector<VertexId> order;
  while (!stack.empty()) {
    auto [v, d] = stack.back();
    stack.pop_back();
    order.push_back(v);
    if (st.depth_profile.size() <= d) st.depth_profile.resize(d + 1, 0);
    ++st.depth_profile[d];
    for (VertexId c : children[v]) stack.push_back({c, d + 1});
    if (wq && v != wq->boundary)
      for (const HalfEdge& h : wq->network().incident(v))
        if (h.to == wq->boundary) ++st.boundary_attachments;
  }
  st.size = order.size();
  st.max_past = st.size;
  return st;
}

ForestStats stats_impl(const OrientedForest& forest, const Network& net, const WiredQuotient* wq) {
  ForestStats out;
  const auto children = children_of(net, forest);
  for (VertexId r : forest.roots()) {
    out.components.push_back(subtree_stats(children, r, wq));
    if (wq && r == wq->boundary)
      for (VertexId c : children[r]) out.boundary_branches.push_back(subtree_stats(children, c, wq));
  }
  return out;
}

}  // namespace

std::vector<VertexId> past(const Network& net, const OrientedForest& forest, VertexId v) {
  if (!forest.contains(v)) throw UnknownVertexError("vertex " + std::to_string(v) + " is not in the forest");
  const auto children = children_of(net, forest);
  std::vector<VertexId> out;
  std::vector<VertexId> stack{v};
  while (!stack.empty()) {
    VertexId u = stack.back();
    stack.pop_back();
    out.push_back(u);
    for (VertexId c : children[u]) stack.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

ForestStats trunk_and_ends_stats(const OrientedForest& forest, const WiredQuotient& wq) {
  return stats_impl(forest, wq.network(), &wq);
}

ForestStats trunk_and_ends_stats(const OrientedForest& forest, const Network& net) {
  return stats_impl(forest, net, nullptr);
}

}  // namespace iab
