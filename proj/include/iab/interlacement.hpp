#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "iab/forest.hpp"
#include "iab/network.hpp"
#include "iab/rng.hpp"
#include "iab/walks.hpp"

namespace iab {

// An excursion from the boundary, anchored at its first interior vertex
// (index 1 of the walk), which fixes the time-shift representative.
struct Trajectory {
  Walk walk;
  std::uint64_t id = 0;

  static constexpr std::size_t kOrigin = 1;
  VertexId origin() const { return walk.vertex(kOrigin); }
};

struct Arrival {
  double time = 0.0;
  Trajectory trajectory;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr std::size_t kDefaultExtensionCap = std::size_t{1} << 24;

// Poisson process of boundary excursions on a wired quotient with intensity
// c(boundary) per unit time. The window [a, b] can be extended forward in
// increments of 1 / c(boundary); each increment draws from its own substream,
// so extensions are reproducible regardless of when they are requested.
class PointProcess {
 public:
  PointProcess(std::shared_ptr<const WiredQuotient> wq, double a, double b, Rng rng,
               std::size_t extension_cap = kDefaultExtensionCap, std::size_t step_cap = kDefaultStepCap);

  const WiredQuotient& quotient() const { return *wq_; }
  std::shared_ptr<const WiredQuotient> quotient_ptr() const { return wq_; }

  double window_start() const { return a_; }
  double window_end() const { return end_; }
  std::size_t extensions() const { return extensions_; }

  // Sorted by time; ids are assigned in time order.
  const std::vector<Arrival>& arrivals() const { return arrivals_; }
  // Arrivals with lo <= time < hi. Does not extend.
  std::span<const Arrival> arrivals_in(double lo, double hi) const;
  // Index of the first arrival with time >= t.
  std::size_t first_at_or_after(double t) const;

  // Appends one increment. Throws ExtensionCapError past the cap.
  void extend();
  // Extends until window_end() >= t.
  void extend_to(double t);

 private:
  void sample_segment(double lo, double hi, Rng rng);

  std::shared_ptr<const WiredQuotient> wq_;
  double a_;
  double b_;
  double end_;
  Rng rng_;
  std::size_t extension_cap_;
  std::size_t step_cap_;
  std::size_t extensions_ = 0;
  std::vector<Arrival> arrivals_;
};

PointProcess sample_process(std::shared_ptr<const WiredQuotient> wq, double a, double b, Rng rng);

struct TauResult {
  double time = kInfinity;
  std::uint64_t trajectory = 0;
  OrientedEdge entry;  // first-entry edge of that trajectory into v
};

// First arrival at time >= t whose trajectory visits v, extending the process
// as needed.
TauResult tau(PointProcess& process, VertexId v, double t);

// Per-vertex (tau_t(v), e_t(v)) for every interior vertex of the quotient.
struct AbState {
  double t = 0.0;
  std::vector<double> tau;
  std::vector<std::uint64_t> trajectory;
  std::vector<OrientedEdge> entry;

  // Reversed entry edges, rooted at the boundary.
  OrientedForest forest(const WiredQuotient& wq) const;
  friend bool operator==(const AbState&, const AbState&) = default;
};

// AB_t: every interior vertex assigned, extending the process lazily.
AbState ab_state(PointProcess& process, double t);

// AB_t^T: reversed first-entry edges of vertices with tau_t(v) <= T, rooted at
// the boundary. T = kInfinity gives a spanning tree of the quotient.
OrientedForest ab_forest(PointProcess& process, double t, double T = kInfinity);

// State at t - s from the state at t and the arrivals in [t - s, t): vertices
// hit in the window take their entry from the earliest hitting arrival, the
// rest keep their entry from `state`. Throws ValidationError when an arrival
// lies outside [new_t, state.t) or the arrivals are out of order.
AbState markov_update(const AbState& state, std::span<const Arrival> window, double new_t);

// Same, reading the window from the process. Throws if the process does not
// cover [new_t, state.t).
AbState markov_update(const AbState& state, const PointProcess& process, double new_t);

struct HitTest {
  double empirical = 0.0;
  double exact = 0.0;     // 1 - exp(-t Cap(K))
  double sigma = 0.0;     // binomial standard error at the exact rate
  double z = 0.0;
  double capacity = 0.0;
  std::size_t samples = 0;
};

// Fraction of samples in which an excursion arriving in [0, t] visits K.
HitTest hit_probability_test(const WiredQuotient& wq, std::span<const VertexId> set, double t, std::size_t samples,
                             const Rng& rng);

struct MsfResult {
  std::vector<EdgeId> order;  // every quotient edge, by first traversal
  std::vector<EdgeId> edges;  // minimal spanning tree, sorted
  OrientedForest forest;      // the tree oriented towards the boundary
};

// Kruskal on the quotient under the interlacement ordering of arrivals at
// times >= process.window_start(). Extends until every edge is traversed.
MsfResult interlacement_msf(PointProcess& process);

// Reversed first-entry edges of one walk, rooted at its start.
OrientedForest trajectory_first_entry_tree(const Network& net, const Walk& walk);

// States at each time of a decreasing grid, from one process realization,
// generated by successive Markov updates.
std::vector<AbState> dynamics_run(std::shared_ptr<const WiredQuotient> wq, std::span<const double> t_grid,
                                  const Rng& rng);

}  // namespace iab
