#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "iab/network.hpp"
#include "iab/rng.hpp"

namespace iab {

enum class WalkEnd { kOpen, kHitTarget, kReturnedToBoundary, kStepCap };

struct Step {
  EdgeId edge = kNoEdge;
  VertexId to = kNoVertex;
  bool forward = true;

  OrientedEdge oriented() const { return {edge, forward}; }
  friend bool operator==(const Step&, const Step&) = default;
};

// Alternating vertex/edge sequence start, e0, v1, e1, ...
struct Walk {
  VertexId start = kNoVertex;
  std::vector<Step> steps;
  WalkEnd end = WalkEnd::kOpen;

  bool empty() const { return start == kNoVertex; }
  std::size_t length() const { return steps.size(); }
  VertexId vertex(std::size_t i) const { return i == 0 ? start : steps[i - 1].to; }
  VertexId last() const { return steps.empty() ? start : steps.back().to; }
  std::vector<VertexId> vertices() const;

  friend bool operator==(const Walk&, const Walk&) = default;
};

inline constexpr std::size_t kDefaultStepCap = std::size_t{1} << 32;

// One transition of the network random walk: picks an incident half-edge with
// probability c(e) / c(v). A self-loop owns two half-edges and is therefore
// taken with probability 2 c(e) / c(v).
inline const HalfEdge& sample_step(const Network& net, VertexId v, Rng& rng) {
  const auto cum = net.cumulative(v);
  const double x = rng.uniform() * cum.back();
  std::size_t i = 0;
  if (cum.size() <= 8) {
    while (i + 1 < cum.size() && cum[i] <= x) ++i;
  } else {
    i = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), x) - cum.begin());
    if (i >= cum.size()) i = cum.size() - 1;
  }
  return net.incident(v)[i];
}

// Walks from `start` until it steps onto a vertex in `stop_set` (the start
// itself does not count) or `step_cap` steps have been made. Reaching the cap
// is reported through Walk::end == kStepCap.
Walk random_walk(const Network& net, VertexId start, std::span<const VertexId> stop_set, Rng& rng,
                 std::size_t step_cap = kDefaultStepCap);

// Same, with the stop set given as a per-vertex mask.
Walk random_walk(const Network& net, VertexId start, const std::vector<char>& stop_mask, Rng& rng,
                 std::size_t step_cap = kDefaultStepCap);

// Non-recording variant for hot loops: returns the vertex where the walk
// stopped, or kNoVertex if the cap was hit. `steps_taken` receives the length.
VertexId walk_until(const Network& net, VertexId start, const std::vector<char>& stop_mask, Rng& rng,
                    std::size_t step_cap = kDefaultStepCap, std::size_t* steps_taken = nullptr);

// Random walk from the boundary vertex stopped at its first return.
Walk boundary_excursion(const WiredQuotient& wq, Rng& rng, std::size_t step_cap = kDefaultStepCap);

// Chronological loop erasure. Throws ValidationError on an empty walk.
Walk loop_erase(const Walk& walk);

// Edge used by the walks (taken in order) to enter each vertex for the first
// time. Vertices that are only ever walk starts get no entry.
std::map<VertexId, OrientedEdge> first_entry_edges(std::span<const Walk> walks);

}  // namespace iab
