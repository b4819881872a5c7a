#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "iab/forest.hpp"
#include "iab/network.hpp"
#include "iab/potential.hpp"

namespace iab {

enum class Family {
  kGridBox,
  kComplete,
  kCycle,
  kPath,
  kRegularTree,
  kStretchedTree,
  kCounterexample,
  kJoinedGrids,
  kGridWithPaths,
};

enum class BoundaryMode { kWired, kFree };

const char* to_string(Family f);
Family family_from_string(const std::string& s);

struct FamilySpec {
  Family family = Family::kPath;
  int d = 2;              // grid dimension
  int radius = 1;         // grid box radius (sup norm)
  int n = 3;              // vertices of complete / cycle / path
  int k = 2;              // stretching base
  int m = 1;              // parallel multiplicity
  int branching = 2;      // children per vertex of regular_tree
  int depth = 5;          // depth cap D
  int path_length = 0;    // grid_with_paths; 0 means radius
  int wired = 1;          // complete / cycle / path: highest ids wired
  BoundaryMode boundary = BoundaryMode::kFree;
  bool condensed = false;  // stretched paths collapsed to one edge of conductance mult / length
  std::size_t vertex_budget = 1000000;
};

// Checks parameter ranges; throws ValidationError.
void validate(const FamilySpec& spec);

struct TreeVertex {
  VertexId id = kNoVertex;
  int depth = 0;
  VertexId parent = kNoVertex;  // parent in the embedded 3-regular tree
};

struct GeneratedFamily {
  FamilySpec spec;
  std::shared_ptr<const Network> network;
  std::vector<Rational> exact_conductance;  // per edge
  std::vector<VertexId> retained;           // empty for a free boundary
  std::shared_ptr<const WiredQuotient> quotient;
  std::map<std::string, std::vector<VertexId>> labels;  // named base vertices
  std::vector<TreeVertex> tree;                         // embedded tree vertices (stretched / counterexample)
};

// Throws BudgetError when the network would exceed spec.vertex_budget.
GeneratedFamily generate(const FamilySpec& spec);

// Exact probability that the walk on the depth-D truncation of G_k^m, started
// at a depth-1 tree vertex u, ever hits its parent. The truncation keeps tree
// generations 0..D and D generations of each attached binary tree, and wires
// everything beyond to the boundary.
Rational p_mk(int k, int m, int depth);

// k / (k + 2 + m) and (k + 2) / (k + 2 + 2m).
std::pair<Rational, Rational> p_mk_bounds(int k, int m);

// P(Galton-Watson process with Binomial(n, p) offspring survives `generations`
// generations), by iterating the offspring generating function.
double branching_survival(int n, double p, int generations);

struct HitEstimate {
  double estimate = 0.0;
  double sigma = 0.0;
  std::size_t samples = 0;
};

// Monte Carlo estimate of p_mk: walks on the condensed wired truncation from a
// depth-1 tree vertex until it hits the root or the boundary. The condensed
// walk observed on tree vertices has the law of the stretched walk.
HitEstimate parent_hit_monte_carlo(int k, int m, int depth, std::size_t samples, const Rng& rng);

// Random wired quotient with 2..max_vertices retained vertices: a random
// spanning tree plus extra edges, parallel edges, and loops, with conductances
// drawn from {1/2, 1, 2, 3}.
std::shared_ptr<const WiredQuotient> random_quotient(Rng& rng, std::size_t max_vertices = 8);

// Past of the tree root restricted to the embedded tree.
struct RootPast {
  std::size_t size = 0;       // tree vertices in the past, root included
  std::size_t internal = 0;   // of those, vertices above the depth cap
  std::vector<std::size_t> per_depth;
};

// `forest` lives on the quotient of `family`.
RootPast root_past(const GeneratedFamily& family, const OrientedForest& forest);

}  // namespace iab
