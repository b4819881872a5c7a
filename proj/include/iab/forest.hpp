#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "iab/network.hpp"

namespace iab {

// Parent-edge map v -> e(v) with e(v) emanating from v, over a subset of the
// vertices of a network. Members without a parent edge are roots.
class OrientedForest {
 public:
  OrientedForest() = default;
  explicit OrientedForest(std::size_t num_vertices) : parent_(num_vertices), member_(num_vertices, 0) {}

  std::size_t num_vertices() const { return parent_.size(); }
  bool contains(VertexId v) const { return v < member_.size() && member_[v]; }
  std::size_t size() const;

  const std::optional<OrientedEdge>& parent(VertexId v) const { return parent_[v]; }

  void add_root(VertexId v);
  // Parent edge of v; marks v (and not the head) as a member.
  void set_parent(VertexId v, OrientedEdge e);
  void add_member(VertexId v) { member_[v] = 1; }

  std::vector<VertexId> roots() const;
  std::vector<VertexId> members() const;
  std::size_t num_edges() const;
  std::vector<EdgeId> edge_ids() const;  // sorted

  friend bool operator==(const OrientedForest&, const OrientedForest&) = default;

 private:
  std::vector<std::optional<OrientedEdge>> parent_;
  std::vector<char> member_;
};

// Exact hashable key: sorted (vertex, parent edge id) pairs.
using ForestKey = std::vector<std::uint64_t>;
ForestKey canonical_key(const OrientedForest& forest);

// Key of an unoriented edge set (sorted edge ids).
ForestKey edge_set_key(std::span<const EdgeId> edges);

// Empty optional when every invariant holds, otherwise a description of the
// first violation: parent edge does not leave v, parent head outside the
// forest, or a cycle.
std::optional<std::string> check_forest(const Network& net, const OrientedForest& forest);

// Head of v's parent edge, kNoVertex for roots.
VertexId parent_vertex(const Network& net, const OrientedForest& forest, VertexId v);

// Orients a spanning tree (given by edge ids) towards `root`.
OrientedForest orient_tree(const Network& net, std::span<const EdgeId> tree_edges, VertexId root);

// Forest built from reversed first-entry edges: vertex v points back along the
// edge it was entered by. `root` is the vertex with no entry.
OrientedForest forest_from_entries(const Network& net, VertexId root,
                                   std::span<const std::pair<VertexId, OrientedEdge>> entries);

// Vertices whose path to the root passes through v (v included).
std::vector<VertexId> past(const Network& net, const OrientedForest& forest, VertexId v);

struct ComponentStats {
  VertexId root = kNoVertex;
  std::size_t size = 0;
  std::vector<std::size_t> depth_profile;  // vertices at distance d from the root
  std::size_t max_past = 0;                // largest past of a member (the root's past is the component)
  std::size_t boundary_attachments = 0;    // network edges from the component to the wired boundary
};

struct ForestStats {
  std::vector<ComponentStats> components;
  // When the forest is rooted at the wired boundary: the subtrees hanging off
  // it, i.e. the finite-volume proxies for forest components of the base graph.
  std::vector<ComponentStats> boundary_branches;
};

ForestStats trunk_and_ends_stats(const OrientedForest& forest, const WiredQuotient& wq);
ForestStats trunk_and_ends_stats(const OrientedForest& forest, const Network& net);

}  // namespace iab
