#include "iab/families.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "iab/walks.hpp"

namespace iab {

namespace {

constexpr const char* kFamilyNames[] = {"grid_box",       "complete",          "cycle",
                                        "path",           "regular_tree",      "stretched_tree",
                                        "counterexample_gkm", "joined_grids",  "grid_with_paths"};

class Builder {
 public:
  Builder(std::size_t budget, bool condensed) : budget_(budget), condensed_(condensed) {}

  VertexId vertex() {
    if (n_ >= budget_) throw BudgetError("family exceeds the vertex budget of " + std::to_string(budget_));
    return static_cast<VertexId>(n_++);
  }

  void edge(VertexId a, VertexId b, const Rational& c) {
    edges_.push_back({a, b, c.convert_to<double>()});
    exact_.push_back(c);
  }

  // Path of `length` steps, each made of `mult` parallel unit edges, or one
  // edge of conductance mult / length when condensed.
  void path(VertexId a, VertexId b, std::uint64_t length, int mult) {
    if (condensed_) {
      edge(a, b, Rational(mult) / Rational(length));
      return;
    }
    VertexId prev = a;
    for (std::uint64_t i = 1; i <= length; ++i) {
      const VertexId next = i == length ? b : vertex();
      for (int j = 0; j < mult; ++j) edge(prev, next, Rational(1));
      prev = next;
    }
  }

  std::size_t size() const { return n_; }

  std::shared_ptr<const Network> finish(std::vector<Rational>& exact) {
    exact = std::move(exact_);
    return std::make_shared<const Network>(n_, std::move(edges_));
  }

 private:
  std::size_t budget_;
  bool condensed_;
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<Rational> exact_;
};

std::uint64_t ipow(int base, int exp) {
  std::uint64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > (std::uint64_t{1} << 62) / static_cast<std::uint64_t>(base)) throw BudgetError("path length overflows");
    r *= static_cast<std::uint64_t>(base);
  }
  return r;
}

struct Box {
  int d;
  int radius;
  std::size_t side;
  std::size_t count;
};

Box make_box(int d, int radius, std::size_t budget) {
  Box b{d, radius, static_cast<std::size_t>(2 * radius + 1), 1};
  for (int i = 0; i < d; ++i) {
    if (b.count > budget / b.side) throw BudgetError("grid exceeds the vertex budget of " + std::to_string(budget));
    b.count *= b.side;
  }
  if (b.count > budget) throw BudgetError("grid exceeds the vertex budget of " + std::to_string(budget));
  return b;
}

// Adds a box and appends its vertices of sup norm <= inner_radius to `inner`.
// Returns the origin.
VertexId add_box(Builder& b, const Box& box, int inner_radius, std::vector<VertexId>& inner) {
  const VertexId first = static_cast<VertexId>(b.size());
  std::vector<int> x(box.d);
  for (std::size_t i = 0; i < box.count; ++i) {
    b.vertex();
    std::size_t r = i;
    int norm = 0;
    for (int j = 0; j < box.d; ++j) {
      x[j] = static_cast<int>(r % box.side) - box.radius;
      r /= box.side;
      norm = std::max(norm, std::abs(x[j]));
    }
    if (norm <= inner_radius) inner.push_back(first + static_cast<VertexId>(i));
  }
  std::size_t stride = 1;
  for (int j = 0; j < box.d; ++j) {
    for (std::size_t i = 0; i < box.count; ++i)
      if ((i / stride) % box.side + 1 < box.side)
        b.edge(first + static_cast<VertexId>(i), first + static_cast<VertexId>(i + stride), Rational(1));
    stride *= box.side;
  }
  return first + static_cast<VertexId>((box.count - 1) / 2);  // origin
}

// Stretched binary tree with `generations` generations below `root` and every
// edge a path of length `length` with multiplicity `mult`. Leaves at the last
// generation go to `outer` when wired.
void add_stretched_binary(Builder& b, VertexId root, std::uint64_t length, int mult, int generations, bool wired,
                          std::vector<VertexId>& outer) {
  std::vector<VertexId> level{root};
  for (int g = 1; g <= generations; ++g) {
    std::vector<VertexId> next;
    next.reserve(2 * level.size());
    for (VertexId v : level)
      for (int c = 0; c < 2; ++c) {
        const VertexId child = b.vertex();
        b.path(v, child, length, mult);
        next.push_back(child);
      }
    if (g == generations && wired) outer.insert(outer.end(), next.begin(), next.end());
    level = std::move(next);
  }
}

// Embedded 3-regular tree below `u` (at depth `depth_u`) with stretched parent
// paths, optionally with the G_k^m attachments. In wired mode the tree
// vertices at depth D + 1 are generated as outer vertices.
void add_stretched_subtree(Builder& b, VertexId u, int depth_u, VertexId parent, const FamilySpec& s, bool attach,
                           bool wired, std::vector<VertexId>& outer, std::vector<TreeVertex>& tree) {
  tree.push_back({u, depth_u, parent});
  if (attach) {
    const std::uint64_t len = ipow(s.k, depth_u + 1);
    const VertexId rho = b.vertex();
    b.path(u, rho, len, s.m);
    add_stretched_binary(b, rho, len, s.m, s.depth, wired, outer);
  }
  if (depth_u == s.depth && !wired) return;
  const int children = depth_u == 0 ? 3 : 2;
  const std::uint64_t len = ipow(s.k, depth_u + 1);
  for (int c = 0; c < children; ++c) {
    const VertexId child = b.vertex();
    b.path(u, child, len, 1);
    if (depth_u == s.depth)
      outer.push_back(child);
    else
      add_stretched_subtree(b, child, depth_u + 1, u, s, attach, wired, outer, tree);
  }
}

std::vector<VertexId> complement(std::size_t n, const std::vector<VertexId>& outer) {
  std::vector<char> drop(n, 0);
  for (VertexId v : outer) drop[v] = 1;
  std::vector<VertexId> keep;
  for (VertexId v = 0; v < n; ++v)
    if (!drop[v]) keep.push_back(v);
  return keep;
}

}  // namespace

const char* to_string(Family f) { return kFamilyNames[static_cast<int>(f)]; }

Family family_from_string(const std::string& s) {
  for (int i = 0; i < static_cast<int>(std::size(kFamilyNames)); ++i)
    if (s == kFamilyNames[i]) return static_cast<Family>(i);
  throw ValidationError("unknown family '" + s + "'");
}

void validate(const FamilySpec& s) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ValidationError(what);
  };
  require(s.vertex_budget > 0, "vertex_budget must be positive");
  switch (s.family) {
    case Family::kGridBox:
    case Family::kJoinedGrids:
      require(s.d >= 1 && s.d <= 8, "d must lie in [1, 8]");
      require(s.radius >= 1, "radius must be >= 1");
      break;
    case Family::kGridWithPaths:
      require(s.d >= 1 && s.d <= 8, "d must lie in [1, 8]");
      require(s.radius >= 2, "grid_with_paths needs radius >= 2");
      require(s.path_length >= 0, "path_length must be >= 0");
      break;
    case Family::kComplete:
    case Family::kCycle:
    case Family::kPath:
      require(s.n >= (s.family == Family::kCycle ? 3 : 2), "too few vertices");
      if (s.boundary == BoundaryMode::kWired) require(s.wired >= 1 && s.wired < s.n, "wired must lie in [1, n)");
      break;
    case Family::kRegularTree:
      require(s.branching >= 1, "branching must be >= 1");
      require(s.depth >= 1, "depth must be >= 1");
      break;
    case Family::kStretchedTree:
    case Family::kCounterexample:
      require(s.k >= 1, "k must be >= 1");
      require(s.m >= 1, "m must be >= 1");
      require(s.depth >= 1, "depth must be >= 1");
      break;
  }
}

GeneratedFamily generate(const FamilySpec& s) {
  validate(s);
  const bool wired = s.boundary == BoundaryMode::kWired;
  GeneratedFamily out;
  out.spec = s;
  Builder b(s.vertex_budget, s.condensed);
  std::vector<VertexId> retained;
  std::vector<VertexId> outer;
  bool by_outer = false;

  switch (s.family) {
    case Family::kGridBox: {
      const Box box = make_box(s.d, s.radius + (wired ? 1 : 0), s.vertex_budget);
      out.labels["origin"] = {add_box(b, box, s.radius, retained)};
      break;
    }
    case Family::kJoinedGrids: {
      const Box box = make_box(s.d, s.radius + (wired ? 1 : 0), s.vertex_budget);
      const VertexId o1 = add_box(b, box, s.radius, retained);
      const VertexId o2 = add_box(b, box, s.radius, retained);
      b.edge(o1, o2, Rational(1));
      out.labels["origin"] = {o1, o2};
      break;
    }
    case Family::kGridWithPaths: {
      const Box box = make_box(s.d, s.radius + (wired ? 1 : 0), s.vertex_budget);
      const VertexId o = add_box(b, box, s.radius, retained);
      const VertexId second = o + 2;  // (2, 0, ..., 0)
      const int len = s.path_length > 0 ? s.path_length : s.radius;
      for (VertexId anchor : {o, second}) {
        VertexId prev = anchor;
        for (int i = 1; i <= len + (wired ? 1 : 0); ++i) {
          const VertexId v = b.vertex();
          b.edge(prev, v, Rational(1));
          if (i <= len) retained.push_back(v);
          prev = v;
        }
      }
      out.labels["origin"] = {o};
      out.labels["anchors"] = {o, second};
      break;
    }
    case Family::kComplete:
    case Family::kCycle:
    case Family::kPath: {
      for (int i = 0; i < s.n; ++i) b.vertex();
      const VertexId n = static_cast<VertexId>(s.n);
      if (s.family == Family::kComplete) {
        for (VertexId i = 0; i < n; ++i)
          for (VertexId j = i + 1; j < n; ++j) b.edge(i, j, Rational(1));
      } else {
        for (VertexId i = 0; i + 1 < n; ++i) b.edge(i, i + 1, Rational(1));
        if (s.family == Family::kCycle) b.edge(n - 1, 0, Rational(1));
      }
      for (VertexId i = 0; i < n - static_cast<VertexId>(s.wired); ++i) retained.push_back(i);
      break;
    }
    case Family::kRegularTree: {
      std::vector<VertexId> level{b.vertex()};
      retained.push_back(level[0]);
      out.labels["root"] = {level[0]};
      for (int g = 1; g <= s.depth; ++g) {
        std::vector<VertexId> next;
        for (VertexId v : level)
          for (int c = 0; c < s.branching; ++c) {
            const VertexId child = b.vertex();
            b.edge(v, child, Rational(1));
            next.push_back(child);
            if (g < s.depth) retained.push_back(child);
          }
        level = std::move(next);
      }
      break;
    }
    case Family::kStretchedTree:
    case Family::kCounterexample: {
      const VertexId root = b.vertex();
      add_stretched_subtree(b, root, 0, kNoVertex, s, s.family == Family::kCounterexample, wired, outer, out.tree);
      out.labels["root"] = {root};
      for (const TreeVertex& t : out.tree) out.labels["tree"].push_back(t.id);
      by_outer = true;
      break;
    }
  }

  out.network = b.finish(out.exact_conductance);
  if (!out.network->is_connected()) throw ConnectivityError("generated network is disconnected");
  if (wired) {
    out.retained = by_outer ? complement(out.network->num_vertices(), outer) : std::move(retained);
    std::sort(out.retained.begin(), out.retained.end());
    out.quotient = std::make_shared<const WiredQuotient>(wired_quotient(out.network, out.retained));
  }
  return out;
}

Rational p_mk(int k, int m, int depth) {
  if (k < 1 || m < 1) throw ValidationError("p_mk needs k, m >= 1");
  if (depth < 1) throw ValidationError("depth must be >= 1 to contain the subtree of a depth-1 vertex");
  FamilySpec s;
  s.family = Family::kCounterexample;
  s.k = k;
  s.m = m;
  s.depth = depth;
  s.condensed = true;
  s.vertex_budget = std::size_t{1} << 26;
  Builder b(s.vertex_budget, true);
  std::vector<VertexId> outer;
  std::vector<TreeVertex> tree;
  const VertexId u = b.vertex();
  add_stretched_subtree(b, u, 1, kNoVertex, s, true, true, outer, tree);
  std::vector<Rational> exact;
  const auto net = b.finish(exact);
  const VertexId source[] = {u};
  const Rational escape = series_parallel_reduce(*net, exact, source, outer);
  const Rational parent = Rational(1) / Rational(k);
  return parent / (parent + escape);
}

std::pair<Rational, Rational> p_mk_bounds(int k, int m) {
  return {Rational(k) / Rational(k + 2 + m), Rational(k + 2) / Rational(k + 2 + 2 * m)};
}

double branching_survival(int n, double p, int generations) {
  if (n < 1) throw ValidationError("offspring count must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("p must lie in [0, 1]");
  if (generations < 0) throw ValidationError("generations must be >= 0");
  double q = 0.0;  // P(extinct by generation g)
  for (int g = 0; g < generations; ++g) q = std::pow(1.0 - p + p * q, n);
  return 1.0 - q;
}

RootPast root_past(const GeneratedFamily& family, const OrientedForest& forest) {
  if (family.tree.empty() || !family.quotient) throw ValidationError("root_past needs a wired tree family");
  const WiredQuotient& wq = *family.quotient;
  const Network& net = wq.network();
  RootPast out;
  out.per_depth.assign(family.spec.depth + 1, 0);
  const VertexId root = wq.quotient_vertex[family.tree.front().id];
  for (const TreeVertex& t : family.tree) {
    VertexId v = wq.quotient_vertex[t.id];
    while (v != root && v != kNoVertex) v = parent_vertex(net, forest, v);
    if (v != root) continue;
    ++out.size;
    ++out.per_depth[t.depth];
    if (t.depth < family.spec.depth) ++out.internal;
  }
  return out;
}

HitEstimate parent_hit_monte_carlo(int k, int m, int depth, std::size_t samples, const Rng& rng) {
  if (samples == 0) throw ValidationError("Monte Carlo needs samples");
  FamilySpec s;
  s.family = Family::kCounterexample;
  s.k = k;
  s.m = m;
  s.depth = depth;
  s.boundary = BoundaryMode::kWired;
  s.condensed = true;
  s.vertex_budget = std::size_t{1} << 26;
  const GeneratedFamily g = generate(s);
  const WiredQuotient& wq = *g.quotient;
  const VertexId root = wq.quotient_vertex[g.tree[0].id];
  const VertexId u = wq.quotient_vertex[g.tree[1].id];
  std::vector<char> stop(wq.network().num_vertices(), 0);
  stop[root] = 1;
  stop[wq.boundary] = 1;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    Rng r = rng.substream(i);
    const VertexId end = walk_until(wq.network(), u, stop, r);
    if (end == kNoVertex) throw StepCapError("walk exceeded the step cap");
    if (end == root) ++hits;
  }
  HitEstimate out;
  out.samples = samples;
  out.estimate = static_cast<double>(hits) / static_cast<double>(samples);
  out.sigma = std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(samples));
  return out;
}

std::shared_ptr<const WiredQuotient> random_quotient(Rng& rng, std::size_t max_vertices) {
  if (max_vertices < 2) throw ValidationError("random quotient needs max_vertices >= 2");
  static constexpr double kConductance[] = {0.5, 1.0, 2.0, 3.0};
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)); };
  const std::size_t interior = 2 + pick(max_vertices - 1);
  const std::size_t n = interior + 1 + pick(2);  // one or two outside vertices
  std::vector<Edge> edges;
  auto add = [&](std::size_t a, std::size_t b) {
    edges.push_back({static_cast<VertexId>(a), static_cast<VertexId>(b), kConductance[pick(4)]});
  };
  for (std::size_t v = 1; v < interior; ++v) add(v, pick(v));
  for (std::size_t v = interior; v < n; ++v) add(v, pick(interior));
  const std::size_t extra = pick(interior + 2);
  for (std::size_t i = 0; i < extra; ++i) add(pick(n), pick(n));
  auto base = std::make_shared<const Network>(n, std::move(edges));
  std::vector<VertexId> retained(interior);
  for (std::size_t v = 0; v < interior; ++v) retained[v] = static_cast<VertexId>(v);
  return std::make_shared<const WiredQuotient>(wired_quotient(base, retained));
}

}  // namespace iab
