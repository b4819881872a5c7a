#include <cmath>
#include <sstream>

#include "iab/experiment.hpp"
#include "iab/interlacement.hpp"
#include "iab/potential.hpp"
#include "iab/spanning.hpp"

namespace iab {

namespace {

std::string format(const char* name, double value) {
  std::ostringstream s;
  s.precision(6);
  s << name << '=' << value;
  return s.str();
}

TestReport ust_law(const std::string& name, const Network& net, VertexId root,
                   const std::function<OrientedForest(Rng)>& sampler, std::size_t samples, std::uint64_t seed,
                   unsigned threads) {
  ProbabilityMap exact;
  for (const WeightedTree& t : spanning_tree_law(net)) exact[edge_set_key(t.edges)] = t.probability;
  std::vector<ForestKey> keys(samples);
  std::vector<char> valid(samples, 1);
  const Rng base(seed);
  parallel_for(samples, threads, [&](std::size_t i) {
    const OrientedForest f = sampler(base.substream(i));
    valid[i] = !check_forest(net, f) && f.roots() == std::vector<VertexId>{root} && f.size() == net.num_vertices();
    keys[i] = edge_set_key(f.edge_ids());
  });
  EmpiricalDistribution dist;
  bool all_valid = true;
  for (std::size_t i = 0; i < samples; ++i) {
    dist.add(keys[i]);
    all_valid = all_valid && valid[i];
  }
  const ChiSquared chi = chi_squared_test(dist, exact);
  const double tv = tv_distance(dist, exact);
  return {name, chi.statistic, chi.p_value, all_valid && chi.p_value > 1e-3 && tv < 0.02,
          format("tv", tv) + (all_valid ? "" : " invalid forest sampled")};
}

TestReport markov_identity(std::size_t realizations, std::uint64_t seed) {
  std::size_t violations = 0;
  const Rng base(seed);
  for (std::size_t i = 0; i < realizations; ++i) {
    Rng r = base.substream(i);
    const auto wq = random_quotient(r);
    const double t = 1.0 + 2.0 * r.uniform(), s = 2.0 * r.uniform();
    PointProcess p(wq, t - s, t, r.substream(1));
    const AbState at_t = ab_state(p, t);
    const AbState updated = markov_update(at_t, p, t - s);
    const AbState scratch = ab_state(p, t - s);
    if (!(updated.forest(*wq) == scratch.forest(*wq))) ++violations;
  }
  return {"markov_identity", static_cast<double>(violations), 1.0, violations == 0,
          format("realizations", static_cast<double>(realizations))};
}

TestReport msf_identity(std::size_t realizations, std::uint64_t seed) {
  std::size_t violations = 0;
  const Rng base(seed);
  for (std::size_t i = 0; i < realizations; ++i) {
    Rng r = base.substream(i);
    const auto wq = random_quotient(r);
    PointProcess p(wq, 0.0, 0.0, r.substream(1));
    const MsfResult msf = interlacement_msf(p);
    if (msf.edges != ab_forest(p, 0.0).edge_ids()) ++violations;
  }
  return {"msf_identity", static_cast<double>(violations), 1.0, violations == 0,
          format("realizations", static_cast<double>(realizations))};
}

TestReport poisson_gaps(std::size_t gaps, std::uint64_t seed) {
  FamilySpec spec;
  spec.family = Family::kGridBox;
  spec.d = 2;
  spec.radius = 2;
  spec.boundary = BoundaryMode::kWired;
  const auto wq = generate(spec).quotient;
  PointProcess p(wq, 0.0, 0.0, Rng(seed));
  while (p.arrivals().size() < gaps) p.extend();
  const double rate = wq->boundary_conductance();
  std::vector<double> x(gaps);
  double previous = 0.0;
  for (std::size_t i = 0; i < gaps; ++i) {
    x[i] = rate * (p.arrivals()[i].time - previous);
    previous = p.arrivals()[i].time;
  }
  const KsResult ks = ks_test(x, [](double v) { return v <= 0 ? 0.0 : -std::expm1(-v); });
  return {"poisson_interarrival_ks", ks.statistic, ks.p_value, ks.p_value > 1e-3, ""};
}

TestReport hitting(std::size_t samples, std::uint64_t seed) {
  FamilySpec spec;
  spec.family = Family::kGridBox;
  spec.d = 3;
  spec.radius = 3;
  spec.boundary = BoundaryMode::kWired;
  const GeneratedFamily g = generate(spec);
  const VertexId origin[] = {g.quotient->quotient_vertex[g.labels.at("origin")[0]]};
  const HitTest h = hit_probability_test(*g.quotient, origin, 0.25, samples, Rng(seed));
  return {"hit_formula", h.z, 1.0, h.z < 3.0, format("empirical", h.empirical) + " " + format("exact", h.exact)};
}

std::vector<TestReport> counterexample() {
  std::vector<TestReport> out;
  for (const auto& [k, m] : {std::pair{4, 1}, std::pair{4, 6}}) {
    const auto [lower, upper] = p_mk_bounds(k, m);
    bool lower_ok = true, upper_ok = true, monotone = true;
    Rational previous = 0;
    std::string values;
    for (int d = 2; d <= 6; ++d) {
      const Rational p = p_mk(k, m, d);
      lower_ok = lower_ok && p >= lower;
      upper_ok = upper_ok && p <= upper;
      monotone = monotone && p >= previous;
      previous = p;
      values += format(("p" + std::to_string(d)).c_str(), p.convert_to<double>()) + " ";
    }
    const std::string tag = "_k" + std::to_string(k) + "_m" + std::to_string(m);
    out.push_back({"p_mk_lower_bound" + tag, lower.convert_to<double>(), 1.0, lower_ok, values});
    out.push_back({"p_mk_upper_bound" + tag, upper.convert_to<double>(), 1.0, upper_ok, values});
    out.push_back({"p_mk_monotone" + tag, 0.0, 1.0, monotone, values});
  }
  return out;
}

TestReport capacity_monotone() {
  double previous = kInfinity;
  bool ok = true;
  std::string values;
  for (int radius : {2, 3, 4}) {
    FamilySpec spec;
    spec.family = Family::kGridBox;
    spec.d = 3;
    spec.radius = radius;
    spec.boundary = BoundaryMode::kWired;
    const GeneratedFamily g = generate(spec);
    const VertexId origin[] = {g.quotient->quotient_vertex[g.labels.at("origin")[0]]};
    const double cap = capacity(*g.quotient, origin);
    ok = ok && cap <= previous;
    previous = cap;
    values += format(("cap" + std::to_string(radius)).c_str(), cap) + " ";
  }
  return {"capacity_monotone_z3", previous, 1.0, ok, values};
}

TestReport random_paths(std::uint64_t seed) {
  FamilySpec spec;
  spec.family = Family::kRegularTree;
  spec.branching = 2;
  spec.depth = 8;
  spec.boundary = BoundaryMode::kWired;
  const GeneratedFamily g = generate(spec);
  const VertexId root[] = {g.quotient->quotient_vertex[g.labels.at("root")[0]]};
  Rng rng(seed);
  const RandomPathBound b =
      random_path_capacity_bound(*g.quotient, root, uniform_descent_paths(*g.quotient, root), 100000, rng);
  const double cap = capacity(*g.quotient, root);
  const double rel = std::abs(b.bound - cap) / cap;
  return {"random_paths_equality", rel, 1.0, rel < 0.01, format("bound", b.bound) + " " + format("capacity", cap)};
}

TestReport kirchhoff_sum() {
  FamilySpec spec;
  spec.family = Family::kGridBox;
  spec.d = 2;
  spec.radius = 2;
  const GeneratedFamily g = generate(spec);
  double sum = 0.0;
  for (EdgeId e = 0; e < g.network->num_edges(); ++e) sum += ust_edge_probability(*g.network, e);
  const double err = std::abs(sum - static_cast<double>(g.network->num_vertices() - 1));
  return {"kirchhoff_marginal_sum", err, 1.0, err < 1e-8, format("sum", sum)};
}

TestReport series_parallel_agreement() {
  FamilySpec spec;
  spec.family = Family::kCounterexample;
  spec.k = 2;
  spec.m = 2;
  spec.depth = 3;
  spec.boundary = BoundaryMode::kWired;
  spec.condensed = true;
  const GeneratedFamily g = generate(spec);
  const WiredQuotient& wq = *g.quotient;
  const VertexId source[] = {wq.quotient_vertex[g.labels.at("root")[0]]};
  const VertexId sink[] = {wq.boundary};
  const double exact = series_parallel_reduce(wq.network(), source, sink).convert_to<double>();
  const double solved = effective_conductance(wq.network(), source, sink);
  const double err = std::abs(exact - solved);
  return {"series_parallel_vs_harmonic", err, 1.0, err < 1e-9, format("conductance", exact)};
}

}  // namespace

std::vector<TestReport> verify_suite(std::uint64_t seed, unsigned threads) {
  std::vector<TestReport> out;
  const Rng root(seed);
  auto sub = [&](std::uint64_t i) { return Rng::mix(root.substream(i)()); };

  FamilySpec k4;
  k4.family = Family::kComplete;
  k4.n = 4;
  const auto k4_net = generate(k4).network;
  out.push_back(ust_law(
      "ust_law_k4_aldous_broder", *k4_net, 0, [&](Rng r) { return aldous_broder(*k4_net, 0, r); }, 50000, sub(1),
      threads));
  out.push_back(ust_law(
      "ust_law_k4_wilson", *k4_net, 0, [&](Rng r) { return wilson(*k4_net, 0, r); }, 50000, sub(2), threads));

  FamilySpec cycle;
  cycle.family = Family::kCycle;
  cycle.n = 5;
  cycle.boundary = BoundaryMode::kWired;
  const auto cq = generate(cycle).quotient;
  out.push_back(ust_law(
      "ust_law_cycle_interlacement", cq->network(), cq->boundary,
      [&](Rng r) {
        PointProcess p(cq, 0.0, 0.0, r);
        return ab_state(p, 0.0).forest(*cq);
      },
      50000, sub(3), threads));

  out.push_back(markov_identity(300, sub(4)));
  out.push_back(msf_identity(300, sub(5)));
  out.push_back(poisson_gaps(20000, sub(6)));
  out.push_back(hitting(20000, sub(7)));
  for (TestReport& r : counterexample()) out.push_back(std::move(r));
  out.push_back(capacity_monotone());
  out.push_back(random_paths(sub(8)));
  out.push_back(kirchhoff_sum());
  out.push_back(series_parallel_agreement());
  return out;
}

}  // namespace iab
