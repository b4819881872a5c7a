#include "iab/interlacement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "iab/potential.hpp"
#include "iab/stats.hpp"

namespace iab {

PointProcess::PointProcess(std::shared_ptr<const WiredQuotient> wq, double a, double b, Rng rng,
                           std::size_t extension_cap, std::size_t step_cap)
    : wq_(std::move(wq)), a_(a), b_(b), end_(b), rng_(rng), extension_cap_(extension_cap), step_cap_(step_cap) {
  if (!wq_) throw ValidationError("point process needs a quotient");
  if (!std::isfinite(a) || !std::isfinite(b) || a > b) throw ValidationError("window must satisfy a <= b");
  if (!(wq_->boundary_conductance() > 0.0)) throw ValidationError("boundary has no incident edges");
  sample_segment(a_, b_, rng_.substream(0));
}

void PointProcess::sample_segment(double lo, double hi, Rng rng) {
  const double rate = wq_->boundary_conductance();
  const std::uint64_t n = poisson(rng, rate * (hi - lo));
  std::vector<double> times(n);
  for (double& x : times) x = lo + (hi - lo) * rng.uniform();
  std::sort(times.begin(), times.end());
  for (std::uint64_t k = 0; k < n; ++k) {
    Rng walk_rng = rng.substream(k);
    Arrival arrival{times[k], {boundary_excursion(*wq_, walk_rng, step_cap_), arrivals_.size()}};
    if (arrival.trajectory.walk.end == WalkEnd::kStepCap)
      throw StepCapError("boundary excursion exceeded the step cap");
    arrivals_.push_back(std::move(arrival));
  }
}

void PointProcess::extend() {
  if (extensions_ >= extension_cap_) throw ExtensionCapError("point process extension cap reached");
  const double delta = 1.0 / wq_->boundary_conductance();
  const double lo = b_ + static_cast<double>(extensions_) * delta;
  const double hi = b_ + static_cast<double>(extensions_ + 1) * delta;
  ++extensions_;
  sample_segment(lo, hi, rng_.substream(extensions_));
  end_ = hi;
}

void PointProcess::extend_to(double t) {
  while (end_ < t) extend();
}

std::size_t PointProcess::first_at_or_after(double t) const {
  auto it = std::lower_bound(arrivals_.begin(), arrivals_.end(), t,
                             [](const Arrival& x, double value) { return x.time < value; });
  return static_cast<std::size_t>(it - arrivals_.begin());
}

std::span<const Arrival> PointProcess::arrivals_in(double lo, double hi) const {
  const std::size_t i = first_at_or_after(lo);
  const std::size_t j = std::max(i, first_at_or_after(hi));
  return {arrivals_.data() + i, j - i};
}

PointProcess sample_process(std::shared_ptr<const WiredQuotient> wq, double a, double b, Rng rng) {
  return PointProcess(std::move(wq), a, b, rng);
}

namespace {

void check_time(const PointProcess& process, double t) {
  if (!(t >= process.window_start())) throw ValidationError("time precedes the process window");
}

}  // namespace

TauResult tau(PointProcess& process, VertexId v, double t) {
  const WiredQuotient& wq = process.quotient();
  if (v >= wq.num_interior()) throw UnknownVertexError("vertex " + std::to_string(v) + " is not interior");
  check_time(process, t);
  process.extend_to(t);
  for (std::size_t i = process.first_at_or_after(t);; ++i) {
    while (i >= process.arrivals().size()) process.extend();
    const Arrival& arrival = process.arrivals()[i];
    for (const Step& s : arrival.trajectory.walk.steps)
      if (s.to == v) return {arrival.time, arrival.trajectory.id, s.oriented()};
  }
}

OrientedForest AbState::forest(const WiredQuotient& wq) const {
  OrientedForest f(wq.network().num_vertices());
  f.add_root(wq.boundary);
  for (VertexId v = 0; v < tau.size(); ++v)
    if (std::isfinite(tau[v])) f.set_parent(v, entry[v].reversed());
  return f;
}

namespace {

// Assigns first entries from arrivals [i, ...) with time <= T; extends the
// process when T is infinite and vertices remain.
AbState scan(PointProcess& process, double t, double T) {
  const WiredQuotient& wq = process.quotient();
  const std::size_t n = wq.num_interior();
  AbState state{t, std::vector<double>(n, kInfinity), std::vector<std::uint64_t>(n, 0), std::vector<OrientedEdge>(n)};
  std::size_t remaining = n;
  process.extend_to(std::isfinite(T) ? T : t);
  std::size_t i = process.first_at_or_after(t);
  while (remaining > 0) {
    if (i >= process.arrivals().size()) {
      if (std::isfinite(T)) break;
      process.extend();
      continue;
    }
    const Arrival& arrival = process.arrivals()[i++];
    if (arrival.time > T) break;
    for (const Step& s : arrival.trajectory.walk.steps) {
      if (s.to == wq.boundary || std::isfinite(state.tau[s.to])) continue;
      state.tau[s.to] = arrival.time;
      state.trajectory[s.to] = arrival.trajectory.id;
      state.entry[s.to] = s.oriented();
      --remaining;
    }
  }
  return state;
}

}  // namespace

AbState ab_state(PointProcess& process, double t) {
  check_time(process, t);
  return scan(process, t, kInfinity);
}

OrientedForest ab_forest(PointProcess& process, double t, double T) {
  check_time(process, t);
  if (T < t) throw ValidationError("ab_forest needs t <= T");
  return scan(process, t, T).forest(process.quotient());
}

AbState markov_update(const AbState& state, std::span<const Arrival> window, double new_t) {
  if (new_t > state.t) throw ValidationError("markov_update runs backwards in time");
  AbState out = state;
  out.t = new_t;
  std::vector<char> hit(state.tau.size(), 0);
  double previous = new_t;
  for (const Arrival& arrival : window) {
    if (arrival.time < previous || arrival.time >= state.t)
      throw ValidationError("arrival outside the update window or out of order");
    previous = arrival.time;
    for (const Step& s : arrival.trajectory.walk.steps) {
      if (s.to >= hit.size() || hit[s.to]) continue;
      hit[s.to] = 1;
      out.tau[s.to] = arrival.time;
      out.trajectory[s.to] = arrival.trajectory.id;
      out.entry[s.to] = s.oriented();
    }
  }
  return out;
}

AbState markov_update(const AbState& state, const PointProcess& process, double new_t) {
  if (new_t < process.window_start() || state.t > process.window_end())
    throw ValidationError("process window does not cover the update interval");
  return markov_update(state, process.arrivals_in(new_t, state.t), new_t);
}

HitTest hit_probability_test(const WiredQuotient& wq, std::span<const VertexId> set, double t, std::size_t samples,
                             const Rng& rng) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("hit test needs a finite t >= 0");
  if (samples == 0) throw ValidationError("hit test needs samples");
  const Network& net = wq.network();
  std::vector<char> stop(net.num_vertices(), 0);
  for (VertexId v : set) {
    if (v >= wq.num_interior()) throw UnknownVertexError("vertex " + std::to_string(v) + " is not interior");
    stop[v] = 1;
  }
  stop[wq.boundary] = 1;

  HitTest out;
  out.samples = samples;
  out.capacity = capacity(wq, set);
  out.exact = -std::expm1(-t * out.capacity);
  const double rate = wq.boundary_conductance() * t;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    Rng r = rng.substream(i);
    const std::uint64_t n = poisson(r, rate);
    for (std::uint64_t j = 0; j < n; ++j) {
      Rng walk_rng = r.substream(j);
      const VertexId end = walk_until(net, wq.boundary, stop, walk_rng);
      if (end == kNoVertex) throw StepCapError("excursion exceeded the step cap");
      if (end != wq.boundary) {
        ++hits;
        break;
      }
    }
  }
  out.empirical = static_cast<double>(hits) / static_cast<double>(samples);
  out.sigma = std::sqrt(out.exact * (1.0 - out.exact) / static_cast<double>(samples));
  out.z = z_score(out.empirical, out.exact, out.sigma);
  return out;
}

MsfResult interlacement_msf(PointProcess& process) {
  const WiredQuotient& wq = process.quotient();
  const Network& net = wq.network();
  const std::size_t m = net.num_edges();
  MsfResult out;
  out.order.reserve(m);
  std::vector<char> seen(m, 0);
  for (std::size_t i = process.first_at_or_after(process.window_start()); out.order.size() < m; ++i) {
    while (i >= process.arrivals().size()) process.extend();
    for (const Step& s : process.arrivals()[i].trajectory.walk.steps)
      if (!seen[s.edge]) {
        seen[s.edge] = 1;
        out.order.push_back(s.edge);
      }
  }

  std::vector<VertexId> parent(net.num_vertices());
  std::iota(parent.begin(), parent.end(), VertexId{0});
  auto find = [&](VertexId x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (EdgeId e : out.order) {
    const VertexId ra = find(net.edge(e).a), rb = find(net.edge(e).b);
    if (ra == rb) continue;
    parent[ra] = rb;
    out.edges.push_back(e);
  }
  std::sort(out.edges.begin(), out.edges.end());
  out.forest = orient_tree(net, out.edges, wq.boundary);
  return out;
}

OrientedForest trajectory_first_entry_tree(const Network& net, const Walk& walk) {
  if (walk.empty()) throw ValidationError("empty walk");
  if (!net.contains(walk.start)) throw UnknownVertexError("walk starts outside the network");
  OrientedForest forest(net.num_vertices());
  forest.add_root(walk.start);
  for (const Step& s : walk.steps) {
    if (!net.contains(s.to)) throw UnknownVertexError("walk leaves the network");
    if (!forest.contains(s.to)) forest.set_parent(s.to, s.oriented().reversed());
  }
  return forest;
}

std::vector<AbState> dynamics_run(std::shared_ptr<const WiredQuotient> wq, std::span<const double> t_grid,
                                  const Rng& rng) {
  if (t_grid.empty()) throw ValidationError("empty time grid");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (t_grid[i] > t_grid[i - 1]) throw ValidationError("time grid must be non-increasing");
  PointProcess process(std::move(wq), t_grid.back(), t_grid.front(), rng);
  std::vector<AbState> states;
  states.reserve(t_grid.size());
  states.push_back(ab_state(process, t_grid.front()));
  for (std::size_t i = 1; i < t_grid.size(); ++i) states.push_back(markov_update(states.back(), process, t_grid[i]));
  return states;
}

}  // namespace iab
