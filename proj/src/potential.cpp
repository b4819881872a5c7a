#include "iab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <queue>
#include <set>
#include <string>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

namespace iab {

Rational to_rational(double x) {
  if (!std::isfinite(x)) throw ValidationError("cannot convert a non-finite value to a rational");
  if (x == 0.0) return Rational(0);
  int exponent = 0;
  const double mantissa = std::frexp(x, &exponent);  // x = mantissa * 2^exponent, |mantissa| in [0.5, 1)
  const auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  exponent -= 53;
  boost::multiprecision::cpp_int num(scaled);
  boost::multiprecision::cpp_int den(1);
  if (exponent >= 0)
    num <<= exponent;
  else
    den <<= -exponent;
  return Rational(num, den);
}

namespace {

void check_vertices(const Network& net, std::span<const VertexId> set, const char* what) {
  for (VertexId v : set)
    if (!net.contains(v)) throw UnknownVertexError(std::string("unknown vertex in ") + what + ": " + std::to_string(v));
}

}  // namespace

VoltageSolution harmonic_solve(const DirichletProblem& problem) {
  if (!problem.network) throw ValidationError("Dirichlet problem has no network");
  const Network& net = *problem.network;
  if (problem.source.empty() || problem.sink.empty()) throw ValidationError("source and sink sets must be nonempty");
  check_vertices(net, problem.source, "source");
  check_vertices(net, problem.sink, "sink");
  if (std::set<VertexId>(problem.source.begin(), problem.source.end()).size() != problem.source.size())
    throw ValidationError("duplicate vertices in source set");

  const std::size_t n = net.num_vertices();
  // role: 1 source, 2 sink, 0 free
  std::vector<char> role(n, 0);
  for (VertexId v : problem.source) role[v] = 1;
  for (VertexId v : problem.sink) {
    if (role[v] == 1) throw ValidationError("source and sink sets intersect");
    role[v] = 2;
  }

  // Every free vertex must be connected to the boundary values.
  {
    std::vector<char> seen(n, 0);
    std::vector<VertexId> stack;
    for (VertexId v = 0; v < n; ++v)
      if (role[v]) {
        seen[v] = 1;
        stack.push_back(v);
      }
    while (!stack.empty()) {
      VertexId v = stack.back();
      stack.pop_back();
      for (const HalfEdge& h : net.incident(v))
        if (!seen[h.to]) {
          seen[h.to] = 1;
          stack.push_back(h.to);
        }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
      throw SingularSystemError("harmonic problem is singular: some vertices do not reach the source or sink");
  }

  std::vector<Eigen::Index> index(n, -1);
  Eigen::Index free_count = 0;
  for (VertexId v = 0; v < n; ++v)
    if (!role[v]) index[v] = free_count++;

  VoltageSolution sol;
  sol.voltage = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (VertexId v = 0; v < n; ++v)
    if (role[v] == 1) sol.voltage[v] = 1.0;

  if (free_count > 0) {
    std::vector<Eigen::Triplet<double>> triplets;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(free_count);
    for (const Edge& e : net.edges()) {
      if (e.is_loop()) continue;
      const Eigen::Index ia = index[e.a], ib = index[e.b];
      const double c = e.conductance;
      if (ia >= 0) triplets.emplace_back(ia, ia, c);
      if (ib >= 0) triplets.emplace_back(ib, ib, c);
      if (ia >= 0 && ib >= 0) {
        triplets.emplace_back(ia, ib, -c);
        triplets.emplace_back(ib, ia, -c);
      } else if (ia >= 0 && role[e.b] == 1) {
        rhs[ia] += c;
      } else if (ib >= 0 && role[e.a] == 1) {
        rhs[ib] += c;
      }
    }
    Eigen::SparseMatrix<double> A(free_count, free_count);
    A.setFromTriplets(triplets.begin(), triplets.end());

    Eigen::VectorXd x;
    if (static_cast<std::size_t>(free_count) <= kDirectSolveLimit) {
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
      if (solver.info() != Eigen::Success) throw SingularSystemError("factorization of the Dirichlet system failed");
      x = solver.solve(rhs);
    } else {
      Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> solver(A);
      solver.setTolerance(1e-12);
      solver.setMaxIterations(20 * free_count);
      x = solver.solve(rhs);
      if (solver.info() != Eigen::Success) throw SingularSystemError("conjugate gradient did not converge");
    }
    const double rhs_norm = rhs.norm();
    sol.relative_residual = rhs_norm > 0 ? (A * x - rhs).norm() / rhs_norm : (A * x).norm();
    if (sol.relative_residual > 1e-10)
      throw SingularSystemError("harmonic solve residual " + std::to_string(sol.relative_residual) + " exceeds 1e-10");
    for (VertexId v = 0; v < n; ++v)
      if (index[v] >= 0) sol.voltage[v] = x[index[v]];
  }

  for (VertexId a : problem.source)
    for (const HalfEdge& h : net.incident(a))
      sol.current += net.edge(h.edge).conductance * (1.0 - sol.voltage[h.to]);
  return sol;
}

double effective_conductance(const Network& net, std::span<const VertexId> source, std::span<const VertexId> sink) {
  DirichletProblem problem{&net, {source.begin(), source.end()}, {sink.begin(), sink.end()}};
  return harmonic_solve(problem).current;
}

double capacity(const WiredQuotient& wq, std::span<const VertexId> set) {
  if (set.empty()) return 0.0;
  const Network& net = wq.network();
  check_vertices(net, set, "capacity set");
  std::vector<char> in_set(net.num_vertices(), 0);
  for (VertexId v : set) {
    if (v == wq.boundary) throw ValidationError("capacity set must not contain the boundary vertex");
    in_set[v] = 1;
  }
  std::vector<VertexId> members;
  for (VertexId v = 0; v < net.num_vertices(); ++v)
    if (in_set[v]) members.push_back(v);

  // escape[x] = P_x(reach the boundary before the set).
  DirichletProblem problem{&net, {wq.boundary}, members};
  const Eigen::VectorXd escape = harmonic_solve(problem).voltage;
  double cap = 0.0;
  for (VertexId v : members) {
    double p = 0.0;
    for (const HalfEdge& h : net.incident(v)) p += net.edge(h.edge).conductance * escape[h.to];
    cap += p;  // = c(v) * P_v(escape before return)
  }
  return cap;
}

double spanning_tree_count(const Network& net) {
  const auto n = static_cast<Eigen::Index>(net.num_vertices());
  if (n == 0) throw ValidationError("empty network");
  if (!net.is_connected()) throw ConnectivityError("spanning tree count requires a connected network");
  if (n == 1) return 1.0;
  Eigen::SparseMatrix<double> L = laplacian<double>(net);
  Eigen::SparseMatrix<double> reduced = L.bottomRightCorner(n - 1, n - 1);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(reduced);
  if (solver.info() != Eigen::Success) throw SingularSystemError("reduced Laplacian factorization failed");
  // Product of the D factor, accumulated in log space to detect overflow.
  const Eigen::VectorXd d = solver.vectorD();
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!(d[i] > 0)) throw SingularSystemError("reduced Laplacian is not positive definite");
    log_det += std::log(d[i]);
  }
  if (log_det > std::log(std::numeric_limits<double>::max()))
    throw OverflowError("weighted spanning tree count overflows double precision");
  double det = 1.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) det *= d[i];
  return det;
}

double ust_edge_probability(const Network& net, EdgeId e) {
  if (e >= net.num_edges()) throw ValidationError("unknown edge " + std::to_string(e));
  const Edge& edge = net.edge(e);
  if (edge.is_loop()) return 0.0;
  const VertexId a[] = {edge.a};
  const VertexId b[] = {edge.b};
  return edge.conductance / effective_conductance(net, a, b);
}

namespace {

struct TreeSearch {
  const Network& net;
  std::size_t max_trees;
  std::vector<VertexId> dsu_parent;
  std::vector<std::pair<VertexId, VertexId>> undo;
  std::vector<EdgeId> chosen;
  std::vector<WeightedTree> out;

  VertexId find(VertexId v) const {
    while (dsu_parent[v] != v) v = dsu_parent[v];
    return v;
  }

  void run(EdgeId next, std::size_t need) {
    if (need == 0) {
      if (out.size() == max_trees) throw BudgetError("spanning tree enumeration exceeds the budget");
      WeightedTree t;
      t.edges = chosen;
      t.weight = 1.0;
      for (EdgeId id : chosen) t.weight *= net.edge(id).conductance;
      out.push_back(std::move(t));
      return;
    }
    if (net.num_edges() - next < need) return;
    const Edge& e = net.edge(next);
    const VertexId ra = find(e.a), rb = find(e.b);
    if (ra != rb) {
      dsu_parent[ra] = rb;
      chosen.push_back(next);
      run(next + 1, need - 1);
      chosen.pop_back();
      dsu_parent[ra] = ra;
    }
    run(next + 1, need);
  }
};

}  // namespace

std::vector<WeightedTree> spanning_tree_law(const Network& net, std::size_t max_trees) {
  if (!net.is_connected()) throw ConnectivityError("spanning tree law requires a connected network");
  TreeSearch search{net, max_trees, {}, {}, {}, {}};
  search.dsu_parent.resize(net.num_vertices());
  std::iota(search.dsu_parent.begin(), search.dsu_parent.end(), VertexId{0});
  search.run(0, net.num_vertices() - 1);
  double total = 0.0;
  for (const auto& t : search.out) total += t.weight;
  for (auto& t : search.out) t.probability = t.weight / total;
  return std::move(search.out);
}

namespace {

std::vector<char> set_mask(const Network& net, std::span<const VertexId> set, const char* what) {
  if (set.empty()) throw ValidationError(std::string(what) + " is empty");
  check_vertices(net, set, what);
  std::vector<char> mask(net.num_vertices(), 0);
  for (VertexId v : set) mask[v] = 1;
  return mask;
}

}  // namespace

PathDistribution uniform_descent_paths(const WiredQuotient& wq, std::span<const VertexId> start_set) {
  const Network& net = wq.network();
  set_mask(net, start_set, "path start set");
  // BFS distance to the boundary.
  auto dist = std::make_shared<std::vector<std::size_t>>(net.num_vertices(), SIZE_MAX);
  std::queue<VertexId> queue;
  (*dist)[wq.boundary] = 0;
  queue.push(wq.boundary);
  while (!queue.empty()) {
    VertexId v = queue.front();
    queue.pop();
    for (const HalfEdge& h : net.incident(v))
      if ((*dist)[h.to] == SIZE_MAX) {
        (*dist)[h.to] = (*dist)[v] + 1;
        queue.push(h.to);
      }
  }
  std::vector<VertexId> starts(start_set.begin(), start_set.end());
  const Network* np = &net;
  return {"uniform_descent", [np, dist, starts](Rng& rng) {
            VertexId v = starts[static_cast<std::size_t>(rng.uniform() * starts.size())];
            std::vector<EdgeId> path;
            std::vector<const HalfEdge*> down;
            while ((*dist)[v] > 0) {
              down.clear();
              for (const HalfEdge& h : np->incident(v))
                if ((*dist)[h.to] + 1 == (*dist)[v]) down.push_back(&h);
              const HalfEdge* h = down[static_cast<std::size_t>(rng.uniform() * down.size())];
              path.push_back(h->edge);
              v = h->to;
            }
            return path;
          }};
}

PathDistribution current_flow_paths(const WiredQuotient& wq, std::span<const VertexId> start_set) {
  const Network& net = wq.network();
  set_mask(net, start_set, "path start set");
  DirichletProblem problem{&net, {start_set.begin(), start_set.end()}, {wq.boundary}};
  const Eigen::VectorXd volt = harmonic_solve(problem).voltage;

  struct Out {
    std::vector<double> cumulative;
    std::vector<const HalfEdge*> edges;
  };
  auto out = std::make_shared<std::vector<Out>>(net.num_vertices());
  for (VertexId v = 0; v < net.num_vertices(); ++v) {
    double acc = 0.0;
    for (const HalfEdge& h : net.incident(v)) {
      const double i = net.edge(h.edge).conductance * (volt[v] - volt[h.to]);
      if (i > 1e-14) {
        acc += i;
        (*out)[v].cumulative.push_back(acc);
        (*out)[v].edges.push_back(&h);
      }
    }
  }
  // Start vertex chosen in proportion to the current it emits.
  std::vector<VertexId> starts(start_set.begin(), start_set.end());
  std::vector<double> start_cum;
  double acc = 0.0;
  for (VertexId a : starts) {
    acc += (*out)[a].cumulative.empty() ? 0.0 : (*out)[a].cumulative.back();
    start_cum.push_back(acc);
  }
  const VertexId boundary = wq.boundary;
  return {"current_flow", [out, starts, start_cum, boundary](Rng& rng) {
            auto pick = [&rng](const std::vector<double>& cum) {
              const double x = rng.uniform() * cum.back();
              auto it = std::upper_bound(cum.begin(), cum.end(), x);
              return std::min<std::size_t>(static_cast<std::size_t>(it - cum.begin()), cum.size() - 1);
            };
            VertexId v = starts[pick(start_cum)];
            std::vector<EdgeId> path;
            while (v != boundary) {
              const Out& o = (*out)[v];
              const HalfEdge* h = o.edges[pick(o.cumulative)];
              path.push_back(h->edge);
              v = h->to;
            }
            return path;
          }};
}

PathDistribution fixed_path(std::vector<EdgeId> edges) {
  return {"fixed", [edges = std::move(edges)](Rng&) { return edges; }};
}

RandomPathBound random_path_capacity_bound(const WiredQuotient& wq, std::span<const VertexId> start_set,
                                           const PathDistribution& paths, std::size_t samples, Rng& rng, double z) {
  if (samples == 0) throw ValidationError("random path bound needs at least one sample");
  const Network& net = wq.network();
  const std::vector<char> in_start = set_mask(net, start_set, "path start set");
  const std::size_t m = net.num_edges();
  const std::size_t batches = std::min<std::size_t>(20, samples);

  std::vector<std::vector<std::uint32_t>> counts(batches, std::vector<std::uint32_t>(m, 0));
  std::vector<char> visited(net.num_vertices(), 0);
  for (std::size_t s = 0; s < samples; ++s) {
    const std::vector<EdgeId> path = paths.sample(rng);
    // Recover the vertex sequence: the start is the endpoint of the first edge lying in A.
    if (path.empty()) throw ValidationError("sampled path is empty");
    const Edge& first = net.edge(path.front());
    VertexId v = in_start[first.a] ? first.a : first.b;
    if (!in_start[v]) throw ValidationError("sampled path does not start in the start set");
    std::vector<VertexId> seq{v};
    for (EdgeId id : path) {
      const Edge& e = net.edge(id);
      if (e.a != v && e.b != v) throw ValidationError("sampled path is not a walk");
      v = (e.a == v) ? e.b : e.a;
      seq.push_back(v);
    }
    if (v != wq.boundary) throw ValidationError("sampled path does not end at the boundary");
    for (VertexId u : seq) {
      if (visited[u]) throw ValidationError("sampled path is not simple");
      visited[u] = 1;
    }
    for (VertexId u : seq) visited[u] = 0;
    auto& batch = counts[s % batches];
    for (EdgeId id : path) ++batch[id];
  }

  std::vector<std::uint64_t> total(m, 0);
  std::vector<std::size_t> batch_size(batches, 0);
  for (std::size_t s = 0; s < samples; ++s) ++batch_size[s % batches];
  for (const auto& batch : counts)
    for (std::size_t e = 0; e < m; ++e) total[e] += batch[e];

  auto sum_squares = [&](std::size_t skip) {
    const double n = static_cast<double>(samples - (skip < batches ? batch_size[skip] : 0));
    double acc = 0.0;
    for (std::size_t e = 0; e < m; ++e) {
      const double cnt = static_cast<double>(total[e] - (skip < batches ? counts[skip][e] : 0));
      if (cnt == 0) continue;
      const double p = cnt / n;
      acc += p * p / net.edge(static_cast<EdgeId>(e)).conductance;
    }
    return acc;
  };

  RandomPathBound out;
  out.samples = samples;
  out.sum_squares = sum_squares(batches);
  out.bound = 1.0 / out.sum_squares;
  out.edge_probability.resize(m);
  for (std::size_t e = 0; e < m; ++e) out.edge_probability[e] = static_cast<double>(total[e]) / samples;

  double se = 0.0;
  if (batches >= 2) {
    std::vector<double> loo(batches);
    for (std::size_t b = 0; b < batches; ++b) loo[b] = 1.0 / sum_squares(b);
    const double mean = std::accumulate(loo.begin(), loo.end(), 0.0) / batches;
    double var = 0.0;
    for (double x : loo) var += (x - mean) * (x - mean);
    se = std::sqrt(var * (batches - 1) / batches);
  }
  out.ci_low = out.bound - z * se;
  out.ci_high = out.bound + z * se;
  return out;
}

}  // namespace iab
