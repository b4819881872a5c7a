#include "iab/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <string>

namespace iab {

Network::Network(std::size_t num_vertices, std::vector<Edge> edges) : edges_(std::move(edges)) {
  if (num_vertices >= kNoVertex || edges_.size() >= kNoEdge) throw ValidationError("network too large");
  std::vector<std::size_t> degree(num_vertices, 0);
  for (const Edge& e : edges_) {
    if (e.a >= num_vertices || e.b >= num_vertices) throw ValidationError("edge endpoint out of range");
    if (!(e.conductance > 0.0) || !std::isfinite(e.conductance))
      throw ValidationError("conductance must be positive and finite, got " + std::to_string(e.conductance));
    ++degree[e.a];
    ++degree[e.b];
  }

  offsets_.assign(num_vertices + 1, 0);
  for (std::size_t v = 0; v < num_vertices; ++v) offsets_[v + 1] = offsets_[v] + degree[v];
  half_edges_.resize(offsets_.back());
  cumulative_.resize(offsets_.back());

  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (EdgeId id = 0; id < edges_.size(); ++id) {
    const Edge& e = edges_[id];
    half_edges_[fill[e.a]++] = {id, e.b, true};
    half_edges_[fill[e.b]++] = {id, e.a, false};
  }

  vertex_conductance_.assign(num_vertices, 0.0);
  for (std::size_t v = 0; v < num_vertices; ++v) {
    double acc = 0.0;
    for (std::size_t i = offsets_[v]; i < offsets_[v + 1]; ++i) {
      acc += edges_[half_edges_[i].edge].conductance;
      cumulative_[i] = acc;
    }
    vertex_conductance_[v] = acc;
  }

  labels_.resize(num_vertices);
  std::iota(labels_.begin(), labels_.end(), std::int64_t{0});
}

double Network::total_conductance() const {
  return std::accumulate(vertex_conductance_.begin(), vertex_conductance_.end(), 0.0);
}

bool Network::is_connected() const {
  if (num_vertices() <= 1) return true;
  return connected_components(*this).size() == 1;
}

void Network::set_labels(std::vector<std::int64_t> labels) {
  if (labels.size() != num_vertices()) throw ValidationError("label count does not match vertex count");
  labels_ = std::move(labels);
}

std::vector<std::vector<VertexId>> connected_components(const Network& network) {
  const std::size_t n = network.num_vertices();
  std::vector<char> seen(n, 0);
  std::vector<std::vector<VertexId>> out;
  std::vector<VertexId> stack;
  for (VertexId s = 0; s < n; ++s) {
    if (seen[s]) continue;
    out.emplace_back();
    seen[s] = 1;
    stack.push_back(s);
    while (!stack.empty()) {
      VertexId v = stack.back();
      stack.pop_back();
      out.back().push_back(v);
      for (const HalfEdge& h : network.incident(v)) {
        if (!seen[h.to]) {
          seen[h.to] = 1;
          stack.push_back(h.to);
        }
      }
    }
    std::sort(out.back().begin(), out.back().end());
  }
  return out;
}

Network build_network(std::span<const EdgeTriple> edge_list) {
  if (edge_list.empty()) throw ValidationError("empty edge list");
  std::map<std::int64_t, VertexId> ids;
  for (const auto& [u, v, c] : edge_list) {
    ids.emplace(u, 0);
    ids.emplace(v, 0);
  }
  std::vector<std::int64_t> labels;
  labels.reserve(ids.size());
  for (auto& [label, id] : ids) {
    id = static_cast<VertexId>(labels.size());
    labels.push_back(label);
  }

  std::vector<Edge> edges;
  edges.reserve(edge_list.size());
  for (const auto& [u, v, c] : edge_list) edges.push_back({ids.at(u), ids.at(v), c});

  Network net(labels.size(), std::move(edges));
  if (!net.is_connected()) throw ConnectivityError("network is not connected");
  net.set_labels(std::move(labels));
  return net;
}

double vertex_conductance(const Network& network, VertexId v) {
  if (!network.contains(v)) throw UnknownVertexError("unknown vertex " + std::to_string(v));
  return network.conductance(v);
}

WiredQuotient wired_quotient(std::shared_ptr<const Network> base, std::span<const VertexId> retained) {
  const Network& g = *base;
  if (retained.empty()) throw ValidationError("retained set is empty");

  WiredQuotient wq;
  wq.retained.assign(retained.begin(), retained.end());
  std::sort(wq.retained.begin(), wq.retained.end());
  if (std::adjacent_find(wq.retained.begin(), wq.retained.end()) != wq.retained.end())
    throw ValidationError("retained set has duplicates");
  for (VertexId v : wq.retained)
    if (!g.contains(v)) throw UnknownVertexError("unknown vertex " + std::to_string(v));
  if (wq.retained.size() == g.num_vertices()) throw NoBoundaryError("retained set is the whole vertex set");

  wq.boundary = static_cast<VertexId>(wq.retained.size());
  wq.quotient_vertex.assign(g.num_vertices(), wq.boundary);
  for (VertexId i = 0; i < wq.retained.size(); ++i) wq.quotient_vertex[wq.retained[i]] = i;

  // The retained set must induce a connected subgraph.
  {
    std::vector<char> seen(g.num_vertices(), 0);
    std::vector<VertexId> stack{wq.retained.front()};
    seen[wq.retained.front()] = 1;
    std::size_t reached = 0;
    while (!stack.empty()) {
      VertexId v = stack.back();
      stack.pop_back();
      ++reached;
      for (const HalfEdge& h : g.incident(v)) {
        if (!seen[h.to] && wq.quotient_vertex[h.to] != wq.boundary) {
          seen[h.to] = 1;
          stack.push_back(h.to);
        }
      }
    }
    if (reached != wq.retained.size()) throw ValidationError("retained set does not induce a connected subgraph");
  }

  std::vector<Edge> edges;
  for (EdgeId id = 0; id < g.num_edges(); ++id) {
    const Edge& e = g.edge(id);
    VertexId a = wq.quotient_vertex[e.a];
    VertexId b = wq.quotient_vertex[e.b];
    if (a == wq.boundary && b == wq.boundary) continue;
    edges.push_back({a, b, e.conductance});
    wq.base_edge.push_back(id);
  }
  wq.quotient = Network(wq.retained.size() + 1, std::move(edges));

  std::vector<std::int64_t> labels;
  labels.reserve(wq.retained.size() + 1);
  for (VertexId v : wq.retained) labels.push_back(g.labels()[v]);
  labels.push_back(-1);
  wq.quotient.set_labels(std::move(labels));
  wq.base = std::move(base);
  return wq;
}

WiredQuotient wired_quotient(const Network& base, std::span<const VertexId> retained) {
  return wired_quotient(std::make_shared<const Network>(base), retained);
}

}  // namespace iab
