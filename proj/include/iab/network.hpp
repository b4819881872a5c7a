#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <tuple>
#include <vector>

#include "iab/types.hpp"

namespace iab {

struct Edge {
  VertexId a = kNoVertex;
  VertexId b = kNoVertex;
  double conductance = 1.0;

  bool is_loop() const { return a == b; }
};

// One end of an edge as seen from `from`. Self-loops contribute two half-edges
// (one per orientation) so that c(v) counts them twice.
struct HalfEdge {
  EdgeId edge = kNoEdge;
  VertexId to = kNoVertex;
  bool forward = true;  // traversal goes a -> b

  OrientedEdge oriented() const { return {edge, forward}; }
};

// Finite weighted multigraph with dense vertex ids. Immutable after
// construction; the adjacency is stored CSR-style with per-vertex cumulative
// conductances for walk sampling.
class Network {
 public:
  Network() = default;

  // Validates conductances (finite, > 0) and endpoint range. Does not check
  // connectivity; see build_network for the checked entry point.
  Network(std::size_t num_vertices, std::vector<Edge> edges);

  std::size_t num_vertices() const { return vertex_conductance_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  const Edge& edge(EdgeId e) const { return edges_[e]; }
  std::span<const Edge> edges() const { return edges_; }

  std::span<const HalfEdge> incident(VertexId v) const {
    return {half_edges_.data() + offsets_[v], half_edges_.data() + offsets_[v + 1]};
  }
  // Running sums of half-edge conductances, aligned with incident(v).
  std::span<const double> cumulative(VertexId v) const {
    return {cumulative_.data() + offsets_[v], cumulative_.data() + offsets_[v + 1]};
  }

  double conductance(VertexId v) const { return vertex_conductance_[v]; }
  double total_conductance() const;

  VertexId tail(OrientedEdge e) const { return e.forward ? edges_[e.id].a : edges_[e.id].b; }
  VertexId head(OrientedEdge e) const { return e.forward ? edges_[e.id].b : edges_[e.id].a; }

  bool contains(VertexId v) const { return v < num_vertices(); }
  bool is_connected() const;

  // Original labels when built through build_network; identity otherwise.
  const std::vector<std::int64_t>& labels() const { return labels_; }
  void set_labels(std::vector<std::int64_t> labels);

 private:
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<HalfEdge> half_edges_;
  std::vector<double> cumulative_;
  std::vector<double> vertex_conductance_;
  std::vector<std::int64_t> labels_;
};

using EdgeTriple = std::tuple<std::int64_t, std::int64_t, double>;

// Compacts arbitrary integer labels to dense ids (ascending label order) and
// requires the result to be connected. Parallel edges and loops are kept.
Network build_network(std::span<const EdgeTriple> edge_list);

// c(v); throws UnknownVertexError.
double vertex_conductance(const Network& network, VertexId v);

// Finite network obtained by wiring every vertex outside `retained` into a
// single boundary vertex. Quotient vertex i < retained.size() is base vertex
// retained[i]; the boundary has id retained.size().
struct WiredQuotient {
  std::shared_ptr<const Network> base;
  std::vector<VertexId> retained;
  Network quotient;
  VertexId boundary = kNoVertex;
  std::vector<EdgeId> base_edge;         // quotient edge -> base edge
  std::vector<VertexId> quotient_vertex;  // base vertex -> quotient vertex

  const Network& network() const { return quotient; }
  std::size_t num_interior() const { return retained.size(); }
  double boundary_conductance() const { return quotient.conductance(boundary); }
};

WiredQuotient wired_quotient(std::shared_ptr<const Network> base, std::span<const VertexId> retained);
WiredQuotient wired_quotient(const Network& base, std::span<const VertexId> retained);

std::vector<std::vector<VertexId>> connected_components(const Network& network);

}  // namespace iab
