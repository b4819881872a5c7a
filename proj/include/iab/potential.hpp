#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <boost/multiprecision/cpp_int.hpp>

#include "iab/network.hpp"
#include "iab/rng.hpp"

namespace iab {

using Rational = boost::multiprecision::cpp_rational;

// Exact value of a double as a rational.
Rational to_rational(double x);

// Weighted graph Laplacian L = D - A. Self-loops do not contribute.
template <typename Scalar = double>
Eigen::SparseMatrix<Scalar> laplacian(const Network& net) {
  std::vector<Eigen::Triplet<Scalar>> triplets;
  triplets.reserve(4 * net.num_edges());
  for (const Edge& e : net.edges()) {
    if (e.is_loop()) continue;
    const Scalar c(e.conductance);
    triplets.emplace_back(e.a, e.a, c);
    triplets.emplace_back(e.b, e.b, c);
    triplets.emplace_back(e.a, e.b, -c);
    triplets.emplace_back(e.b, e.a, -c);
  }
  const auto n = static_cast<Eigen::Index>(net.num_vertices());
  Eigen::SparseMatrix<Scalar> L(n, n);
  L.setFromTriplets(triplets.begin(), triplets.end());
  return L;
}

// Unit voltage on `source`, zero on `sink`.
struct DirichletProblem {
  const Network* network = nullptr;
  std::vector<VertexId> source;
  std::vector<VertexId> sink;
};

struct VoltageSolution {
  Eigen::VectorXd voltage;
  double current = 0.0;  // total current leaving the source set
  double relative_residual = 0.0;
};

// Direct sparse LDL^T up to this many free vertices, preconditioned CG above.
inline constexpr std::size_t kDirectSolveLimit = 100000;

VoltageSolution harmonic_solve(const DirichletProblem& problem);

double effective_conductance(const Network& net, std::span<const VertexId> source, std::span<const VertexId> sink);

// Cap(K) = sum_{v in K} c(v) P_v(walk reaches the boundary before returning
// to K). Zero for empty K. K must avoid the boundary vertex.
double capacity(const WiredQuotient& wq, std::span<const VertexId> set);

// Weighted matrix-tree count (determinant of a reduced Laplacian).
double spanning_tree_count(const Network& net);

// Kirchhoff marginal c(e) R_eff(e-, e+); zero for self-loops.
double ust_edge_probability(const Network& net, EdgeId e);

struct WeightedTree {
  std::vector<EdgeId> edges;  // sorted
  double weight = 0.0;        // product of conductances
  double probability = 0.0;
};

// All spanning trees with their weighted-UST probabilities, by exhaustive
// search. Throws BudgetError beyond `max_trees`.
std::vector<WeightedTree> spanning_tree_law(const Network& net, std::size_t max_trees = 200000);

// Exact effective conductance between the wired sets A and Z by repeated
// series, parallel, and dangling-edge reductions. Throws IrreducibleError if
// the network does not collapse to a single A-Z edge.
Rational series_parallel_reduce(const Network& net, std::span<const VertexId> source, std::span<const VertexId> sink);
Rational series_parallel_reduce(const Network& net, std::span<const Rational> conductance,
                                std::span<const VertexId> source, std::span<const VertexId> sink);

// Law of a random simple path from a set A to the boundary of a quotient.
struct PathDistribution {
  std::string name;
  std::function<std::vector<EdgeId>(Rng&)> sample;  // edge ids of one path
};

// At each step, a uniformly chosen neighbour one BFS layer further from A
// (layers measured towards the boundary). On a rooted tree this is the
// uniform random ray.
PathDistribution uniform_descent_paths(const WiredQuotient& wq, std::span<const VertexId> start_set);

// Follows the unit current flow from A to the boundary: each step picks an
// outgoing edge with probability proportional to its current.
PathDistribution current_flow_paths(const WiredQuotient& wq, std::span<const VertexId> start_set);

PathDistribution fixed_path(std::vector<EdgeId> edges);

struct RandomPathBound {
  double bound = 0.0;  // (sum_e P(e in path)^2 / c(e))^-1
  double ci_low = 0.0;
  double ci_high = 0.0;
  double sum_squares = 0.0;
  std::vector<double> edge_probability;
  std::size_t samples = 0;
};

// Method-of-random-paths lower bound on Cap(A) from Monte Carlo edge
// inclusion frequencies. The interval is a 20-batch jackknife at `z` standard
// errors. Every sampled path is checked to be simple and to run from A to the
// boundary.
RandomPathBound random_path_capacity_bound(const WiredQuotient& wq, std::span<const VertexId> start_set,
                                           const PathDistribution& paths, std::size_t samples, Rng& rng,
                                           double z = 3.0);

}  // namespace iab
