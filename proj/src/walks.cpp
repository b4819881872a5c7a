#include "iab/walks.hpp"

#include <set>
#include <string>

namespace iab {

std::vector<VertexId> Walk::vertices() const {
  std::vector<VertexId> out;
  if (empty()) return out;
  out.reserve(steps.size() + 1);
  out.push_back(start);
  for (const Step& s : steps) out.push_back(s.to);
  return out;
}

Walk random_walk(const Network& net, VertexId start, std::span<const VertexId> stop_set, Rng& rng,
                 std::size_t step_cap) {
  std::vector<char> mask(net.num_vertices(), 0);
  for (VertexId v : stop_set) {
    if (!net.contains(v)) throw UnknownVertexError("unknown stop vertex " + std::to_string(v));
    mask[v] = 1;
  }
  return random_walk(net, start, mask, rng, step_cap);
}

Walk random_walk(const Network& net, VertexId start, const std::vector<char>& stop_mask, Rng& rng,
                 std::size_t step_cap) {
  if (!net.contains(start)) throw UnknownVertexError("unknown start vertex " + std::to_string(start));
  if (net.conductance(start) <= 0.0) throw ValidationError("start vertex has no incident edges");
  Walk walk;
  walk.start = start;
  VertexId v = start;
  while (walk.steps.size() < step_cap) {
    const HalfEdge& h = sample_step(net, v, rng);
    walk.steps.push_back({h.edge, h.to, h.forward});
    v = h.to;
    if (stop_mask[v]) {
      walk.end = WalkEnd::kHitTarget;
      return walk;
    }
  }
  walk.end = WalkEnd::kStepCap;
  return walk;
}

VertexId walk_until(const Network& net, VertexId start, const std::vector<char>& stop_mask, Rng& rng,
                    std::size_t step_cap, std::size_t* steps_taken) {
  VertexId v = start;
  for (std::size_t n = 1; n <= step_cap; ++n) {
    v = sample_step(net, v, rng).to;
    if (stop_mask[v]) {
      if (steps_taken) *steps_taken = n;
      return v;
    }
  }
  if (steps_taken) *steps_taken = step_cap;
  return kNoVertex;
}

Walk boundary_excursion(const WiredQuotient& wq, Rng& rng, std::size_t step_cap) {
  const Network& net = wq.network();
  Walk walk;
  walk.start = wq.boundary;
  VertexId v = wq.boundary;
  while (walk.steps.size() < step_cap) {
    const HalfEdge& h = sample_step(net, v, rng);
    walk.steps.push_back({h.edge, h.to, h.forward});
    v = h.to;
    if (v == wq.boundary) {
      walk.end = WalkEnd::kReturnedToBoundary;
      return walk;
    }
  }
  walk.end = WalkEnd::kStepCap;
  return walk;
}

Walk loop_erase(const Walk& walk) {
  if (walk.empty()) throw ValidationError("cannot loop-erase an empty walk");
  Walk out;
  out.start = walk.start;
  out.end = walk.end;
  // position[v] = index in the current erased path (0 = start), absent if off path.
  std::map<VertexId, std::size_t> position{{walk.start, 0}};
  for (const Step& s : walk.steps) {
    auto it = position.find(s.to);
    if (it != position.end()) {
      const std::size_t keep = it->second;
      while (out.steps.size() > keep) {
        position.erase(out.steps.back().to);
        out.steps.pop_back();
      }
    } else {
      out.steps.push_back(s);
      position.emplace(s.to, out.steps.size());
    }
  }
  return out;
}

std::map<VertexId, OrientedEdge> first_entry_edges(std::span<const Walk> walks) {
  std::map<VertexId, OrientedEdge> entry;
  std::set<VertexId> visited;
  for (const Walk& w : walks) {
    if (w.empty()) continue;
    visited.insert(w.start);
    for (const Step& s : w.steps) {
      if (visited.insert(s.to).second) entry.emplace(s.to, s.oriented());
    }
  }
  return entry;
}

}  // namespace iab
