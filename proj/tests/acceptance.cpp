// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "iab/families.hpp"
#include "iab/interlacement.hpp"
#include "iab/potential.hpp"
#include "iab/spanning.hpp"
#include "iab/stats.hpp"
#include "oracles.hpp"

using namespace iab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// Exact weighted UST law from brute-force enumeration, keyed by edge set.
ProbabilityMap exact_law(const Network& net) {
  const auto trees = oracle::enumerate_trees(net);
  long double total = 0;
  for (const auto& [edges, w] : trees) total += w;
  ProbabilityMap law;
  for (const auto& [edges, w] : trees) law[edge_set_key(edges)] = static_cast<double>(w / total);
  return law;
}

// ---------------------------------------------------------------------------
// 1. Exact UST law

Outcome criterion_ust_law() {
  constexpr std::size_t kSamples = 200000;
  constexpr double kBudget = 120.0;
  Outcome out{true, ""};

  FamilySpec k4;
  k4.family = Family::kComplete;
  k4.n = 4;
  const auto k4_net = generate(k4).network;
  // K4 is its own wired quotient with vertex 3 as the boundary.
  const VertexId k4_keep[] = {0, 1, 2};
  const auto k4_wq = std::make_shared<const WiredQuotient>(wired_quotient(k4_net, k4_keep));

  FamilySpec cyc;
  cyc.family = Family::kCycle;
  cyc.n = 5;
  cyc.wired = 1;
  cyc.boundary = BoundaryMode::kWired;
  const auto cyc_wq = generate(cyc).quotient;

  struct Case {
    const char* name;
    const Network* net;             // law and classic samplers live here
    VertexId root;
    std::shared_ptr<const WiredQuotient> wq;  // interlacement runs here
    bool map_to_base;               // quotient edge ids -> `net` edge ids
  };
  const Case cases[] = {
      {"K4", k4_net.get(), 0, k4_wq, true},
      {"C5*", &cyc_wq->network(), cyc_wq->boundary, cyc_wq, false},
  };

  std::uint64_t seed = 1000;
  for (const Case& c : cases) {
    const ProbabilityMap law = exact_law(*c.net);
    for (const char* sampler : {"aldous_broder", "wilson", "interlacement"}) {
      const auto start = Clock::now();
      const Rng base(seed++);
      EmpiricalDistribution emp;
      bool valid = true;
      for (std::size_t i = 0; i < kSamples; ++i) {
        Rng rng = base.substream(i);
        std::vector<EdgeId> edges;
        if (sampler[0] == 'i') {
          PointProcess p(c.wq, 0.0, 0.0, rng);
          const OrientedForest f = ab_forest(p, 0.0);
          valid = valid && !check_forest(c.wq->network(), f);
          edges = f.edge_ids();
          if (c.map_to_base)
            for (EdgeId& e : edges) e = c.wq->base_edge[e];
        } else {
          const OrientedForest f =
              sampler[0] == 'a' ? aldous_broder(*c.net, c.root, rng) : wilson(*c.net, c.root, rng);
          valid = valid && !check_forest(*c.net, f);
          edges = f.edge_ids();
        }
        emp.add(edge_set_key(edges));
      }
      const double tv = tv_distance(emp, law);
      const ChiSquared chi = chi_squared_test(emp, law);
      const double secs = seconds_since(start);
      const bool ok = valid && tv < 0.01 && chi.p_value > 0.001 && secs < kBudget;
      out.pass = out.pass && ok;
      out.detail += fmt("%s/%s tv=%.4f p=%.3g %.1fs%s; ", c.name, sampler, tv, chi.p_value, secs, ok ? "" : " FAIL");
    }
  }
  out.detail += fmt("%zu samples each, %zu and %zu trees", kSamples, exact_law(*k4_net).size(),
                    exact_law(cyc_wq->network()).size());
  return out;
}

// ---------------------------------------------------------------------------
// 2. Pathwise Markov identity

Outcome criterion_markov() {
  constexpr int kRealizations = 1000;
  const auto start = Clock::now();
  const Rng base(2000);
  int violations = 0;
  std::size_t updated_vertices = 0, kept_vertices = 0;
  for (int i = 0; i < kRealizations; ++i) {
    Rng rng = base.substream(i);
    const auto wq = random_quotient(rng);
    const double rate = wq->boundary_conductance();
    const double t = 3.0 / rate;
    const double new_t = t * rng.uniform();
    const Rng proc_rng = rng.substream(1);

    PointProcess p(wq, 0.0, t, proc_rng);
    const AbState later = ab_state(p, t);
    const AbState updated = markov_update(later, p, new_t);

    PointProcess fresh(wq, 0.0, t, proc_rng);
    const OrientedForest scratch = ab_forest(fresh, new_t);
    if (!(updated.forest(*wq) == scratch) || !(updated == ab_state(fresh, new_t))) ++violations;
    for (VertexId v = 0; v < wq->num_interior(); ++v) (updated.tau[v] < t ? updated_vertices : kept_vertices)++;
  }
  const double secs = seconds_since(start);
  return {violations == 0 && secs < 30.0,
          fmt("%d realizations, %d violations, %zu vertices updated / %zu kept, %.1fs", kRealizations, violations,
              updated_vertices, kept_vertices, secs)};
}

// ---------------------------------------------------------------------------
// 3. Interlacement-ordering MSF identity

Outcome criterion_msf() {
  constexpr int kRealizations = 1000;
  const auto start = Clock::now();
  const Rng base(3000);
  int violations = 0;
  std::size_t edges = 0;
  for (int i = 0; i < kRealizations; ++i) {
    Rng rng = base.substream(i);
    const auto wq = random_quotient(rng);
    const Rng proc_rng = rng.substream(1);
    PointProcess p(wq, 0.0, 0.0, proc_rng);
    const MsfResult msf = interlacement_msf(p);
    PointProcess fresh(wq, 0.0, 0.0, proc_rng);
    if (msf.edges != ab_forest(fresh, 0.0).edge_ids()) ++violations;
    edges += msf.edges.size();
  }
  const double secs = seconds_since(start);
  return {violations == 0 && secs < 60.0,
          fmt("%d realizations, %d violations, %zu tree edges compared, %.1fs", kRealizations, violations, edges, secs)};
}

// ---------------------------------------------------------------------------
// 4. Hitting formula on a wired Z^3 box of radius 8

Outcome criterion_hitting() {
  constexpr int kRadius = 8;
  constexpr std::size_t kSamples = 100000;
  const auto start = Clock::now();
  FamilySpec s;
  s.family = Family::kGridBox;
  s.d = 3;
  s.radius = kRadius;
  s.boundary = BoundaryMode::kWired;
  const GeneratedFamily g = generate(s);
  const WiredQuotient& wq = *g.quotient;
  const int side = 2 * (kRadius + 1) + 1;
  auto at = [&](int x, int y, int z) {
    const int o = kRadius + 1;
    return wq.quotient_vertex[(x + o) + side * ((y + o) + side * (z + o))];
  };

  struct Choice {
    const char* name;
    std::vector<VertexId> set;
    double t;
  };
  std::vector<Choice> choices;
  choices.push_back({"origin", {at(0, 0, 0)}, 0.2});
  {
    std::vector<VertexId> star{at(0, 0, 0), at(1, 0, 0), at(-1, 0, 0), at(0, 1, 0), at(0, -1, 0), at(0, 0, 1),
                               at(0, 0, -1)};
    choices.push_back({"star", star, 0.1});
  }
  {
    std::vector<VertexId> cube;
    for (int x = -1; x <= 1; ++x)
      for (int y = -1; y <= 1; ++y)
        for (int z = -1; z <= 1; ++z) cube.push_back(at(x, y, z));
    choices.push_back({"cube3", cube, 0.05});
  }
  {
    std::vector<VertexId> line;
    for (int x = -4; x <= 4; ++x) line.push_back(at(x, 0, 0));
    choices.push_back({"segment9", line, 0.1});
  }
  choices.push_back({"face", {at(kRadius, 0, 0)}, 0.1});

  Outcome out{true, ""};
  std::uint64_t seed = 4000;
  for (Choice& c : choices) {
    std::sort(c.set.begin(), c.set.end());
    const HitTest h = hit_probability_test(wq, c.set, c.t, kSamples, Rng(seed++));
    const bool ok = h.z <= 3.0;
    out.pass = out.pass && ok;
    out.detail += fmt("%s t=%.2f Cap=%.4f emp=%.4f exact=%.4f z=%.2f%s; ", c.name, c.t, h.capacity, h.empirical,
                      h.exact, h.z, ok ? "" : " FAIL");
  }
  const double secs = seconds_since(start);
  out.pass = out.pass && secs < 300.0;
  out.detail += fmt("%zu samples each, %.1fs", kSamples, secs);
  return out;
}

// ---------------------------------------------------------------------------
// 5. Poisson law of arrivals

Outcome criterion_poisson() {
  const auto start = Clock::now();
  FamilySpec s;
  s.family = Family::kGridBox;
  s.d = 2;
  s.radius = 3;
  s.boundary = BoundaryMode::kWired;
  const auto wq = generate(s).quotient;
  const double rate = wq->boundary_conductance();
  constexpr double kTime = 4000.0;
  PointProcess p(wq, 0.0, 1.0, Rng(5000));
  p.extend_to(kTime);
  std::vector<double> gaps;
  double prev = 0.0;
  for (const Arrival& a : p.arrivals_in(0.0, kTime)) {
    gaps.push_back((a.time - prev) * rate);
    prev = a.time;
  }
  const KsResult ks = ks_test(gaps, [](double x) { return x <= 0 ? 0.0 : -std::expm1(-x); });
  // Counts in unit windows: mean and variance both c(boundary).
  std::vector<double> counts(static_cast<std::size_t>(kTime), 0.0);
  for (const Arrival& a : p.arrivals_in(0.0, kTime)) counts[static_cast<std::size_t>(a.time)] += 1.0;
  const MeanCi ci = mc_mean_ci(counts);
  double var = 0;
  for (double c : counts) var += (c - ci.mean) * (c - ci.mean);
  var /= static_cast<double>(counts.size() - 1);
  const double secs = seconds_since(start);
  return {ks.p_value > 0.001 && secs < 30.0,
          fmt("%zu gaps, KS D=%.5f p=%.3f; unit-window counts mean=%.2f var=%.2f (rate %.0f), %zu extensions, %.1fs",
              gaps.size(), ks.statistic, ks.p_value, ci.mean, var, rate, p.extensions(), secs)};
}

// ---------------------------------------------------------------------------
// 6. Counterexample bounds

Outcome criterion_counterexample() {
  constexpr std::size_t kSamples = 20000;
  const auto start = Clock::now();
  Outcome out{true, ""};
  bool bounds_ok = true, monotone_ok = true, mc_ok = true;
  std::string bound_misses;
  double max_z = 0;
  std::uint64_t seed = 6000;
  Rational p6[2];
  int idx = 0;
  for (auto [k, m] : {std::pair{4, 1}, std::pair{4, 6}}) {
    const auto [lo, hi] = p_mk_bounds(k, m);
    Rational prev = p_mk(k, m, 1);
    for (int D = 2; D <= 6; ++D) {
      const Rational p = p_mk(k, m, D);
      if (p < lo || p > hi) {
        bounds_ok = false;
        bound_misses += fmt(" G_%d^%d D=%d p=%.4f not in [%.4f, %.4f];", k, m, D, p.convert_to<double>(),
                            lo.convert_to<double>(), hi.convert_to<double>());
      }
      monotone_ok = monotone_ok && p > prev;
      prev = p;
      const HitEstimate mc = parent_hit_monte_carlo(k, m, D, kSamples, Rng(seed++));
      const double z = z_score(mc.estimate, p.convert_to<double>(), mc.sigma);
      max_z = std::max(max_z, z);
      mc_ok = mc_ok && z <= 3.0;
    }
    p6[idx++] = prev;
  }
  // Regime flags as derived from the bounds: 2 * lower > 1 and 3 * upper <= 1.
  const bool super = 2 * p_mk_bounds(4, 1).first > 1;
  const bool sub = 3 * p_mk_bounds(4, 6).second <= 1;
  const double secs = seconds_since(start);
  out.pass = bounds_ok && monotone_ok && mc_ok && super && sub && secs < 180.0;
  out.detail = fmt("bounds %s;%s monotone %s; Monte Carlo max z=%.2f (%zu samples) %s; flags supercritical(4,1)=%s "
                   "subcritical(4,6)=%s; exact D=6: 2p(4,1)=%.4f 3p(4,6)=%.4f; %.1fs",
                   bounds_ok ? "pass" : "FAIL", bound_misses.c_str(), monotone_ok ? "pass" : "FAIL", max_z, kSamples,
                   mc_ok ? "pass" : "FAIL", super ? "true" : "false", sub ? "true" : "false",
                   2 * p6[0].convert_to<double>(), 3 * p6[1].convert_to<double>(), secs);
  return out;
}

// ---------------------------------------------------------------------------
// 7. Stationarity and mixing

Outcome criterion_mixing() {
  constexpr std::size_t kRealizations = 100000;
  constexpr double kLag = 1.5;
  const auto start = Clock::now();
  FamilySpec s;
  s.family = Family::kComplete;
  s.n = 5;
  s.wired = 1;
  s.boundary = BoundaryMode::kWired;
  const auto wq = generate(s).quotient;
  const Network& net = wq->network();
  const std::size_t m = net.num_edges();

  // Sums over realizations of x = 1{e in F_0}, y = 1{e in F_s}, and products.
  std::vector<double> sx(m, 0), sy(m, 0), sxy(m, 0), sdd(m, 0);
  std::vector<std::vector<char>> x0(kRealizations), xs(kRealizations);
  const Rng base(7000);
  for (std::size_t i = 0; i < kRealizations; ++i) {
    PointProcess p(wq, 0.0, kLag, base.substream(i));
    const AbState later = ab_state(p, kLag);
    const AbState now = markov_update(later, p, 0.0);
    x0[i].assign(m, 0);
    xs[i].assign(m, 0);
    for (EdgeId e : now.forest(*wq).edge_ids()) x0[i][e] = 1;
    for (EdgeId e : later.forest(*wq).edge_ids()) xs[i][e] = 1;
    for (EdgeId e = 0; e < m; ++e) {
      sx[e] += x0[i][e];
      sy[e] += xs[i][e];
      sxy[e] += x0[i][e] * xs[i][e];
      sdd[e] += (x0[i][e] - xs[i][e]) * (x0[i][e] - xs[i][e]);
    }
  }
  const double n = static_cast<double>(kRealizations);
  bool marginals_ok = true, cov_ok = true;
  double worst_marginal_z = 0, worst_cov_slack = -1e9, max_cov = -1e9;
  for (EdgeId e = 0; e < m; ++e) {
    const double mx = sx[e] / n, my = sy[e] / n;
    // Paired difference d = x - y.
    const double md = mx - my;
    const double sd_d = std::sqrt(std::max(0.0, sdd[e] / n - md * md) * n / (n - 1));
    const double z = z_score(mx, my, sd_d / std::sqrt(n));
    worst_marginal_z = std::max(worst_marginal_z, z);
    marginals_ok = marginals_ok && z <= 3.0;

    const double cov = sxy[e] / n - mx * my;
    double var_term = 0;
    for (std::size_t i = 0; i < kRealizations; ++i) {
      const double u = (x0[i][e] - mx) * (xs[i][e] - my) - cov;
      var_term += u * u;
    }
    const double sigma = std::sqrt(var_term / (n - 1) / n);
    double bound = 0;
    for (VertexId v : {net.edge(e).a, net.edge(e).b}) {
      if (v == wq->boundary) continue;
      const VertexId K[] = {v};
      bound += std::exp(-kLag * capacity(*wq, K));
    }
    bound *= 2;
    max_cov = std::max(max_cov, cov);
    worst_cov_slack = std::max(worst_cov_slack, cov - (bound + 3 * sigma));
    cov_ok = cov_ok && cov <= bound + 3 * sigma;
  }
  const VertexId one[] = {0};
  const double secs = seconds_since(start);
  return {marginals_ok && cov_ok && secs < 300.0,
          fmt("%zu realizations, lag s=%.2f, %zu edges; marginals max z=%.2f %s; max cov=%.5f vs bound "
              "2*sum exp(-s Cap(v)) (Cap(v)=%.4f), worst slack %.5f %s; %.1fs",
              kRealizations, kLag, m, worst_marginal_z, marginals_ok ? "pass" : "FAIL", max_cov,
              capacity(*wq, one), worst_cov_slack, cov_ok ? "pass" : "FAIL", secs)};
}

// ---------------------------------------------------------------------------
// 8. Capacity convergence on wired Z^3 boxes

GeneratedFamily z3_box(int radius) {
  FamilySpec s;
  s.family = Family::kGridBox;
  s.d = 3;
  s.radius = radius;
  s.boundary = BoundaryMode::kWired;
  s.vertex_budget = 2000000;
  return generate(s);
}

Outcome criterion_capacity() {
  constexpr std::size_t kSamples = 200000;
  const auto start = Clock::now();
  const int radii[] = {5, 10, 20};
  double cap[3];
  for (int i = 0; i < 3; ++i) {
    const GeneratedFamily g = z3_box(radii[i]);
    const VertexId o[] = {g.quotient->quotient_vertex[g.labels.at("origin")[0]]};
    cap[i] = capacity(*g.quotient, o);
  }
  const bool monotone = cap[1] <= cap[0] && cap[2] <= cap[1];

  // Fit Cap_R = c0 + c1 / R + c2 / R^2 through the three radii.
  oracle::Matrix A(3, std::vector<long double>(3));
  std::vector<long double> b(3);
  for (int i = 0; i < 3; ++i) {
    const long double r = radii[i];
    A[i] = {1.0L, 1.0L / r, 1.0L / (r * r)};
    b[i] = cap[i];
  }
  const auto c = oracle::solve(A, b);
  constexpr int kTarget = 40;
  const double predicted = static_cast<double>(c[0] + c[1] / kTarget + c[2] / (kTarget * kTarget));

  // Monte Carlo: Cap_R(o) = c(o) P_o(reach the boundary before returning to o).
  const GeneratedFamily g = z3_box(kTarget);
  const WiredQuotient& wq = *g.quotient;
  const VertexId o = wq.quotient_vertex[g.labels.at("origin")[0]];
  std::vector<char> stop(wq.network().num_vertices(), 0);
  stop[o] = stop[wq.boundary] = 1;
  const Rng base(8000);
  std::size_t escapes = 0;
  for (std::size_t i = 0; i < kSamples; ++i) {
    Rng rng = base.substream(i);
    escapes += walk_until(wq.network(), o, stop, rng) == wq.boundary;
  }
  const double q = static_cast<double>(escapes) / static_cast<double>(kSamples);
  const double c_o = wq.network().conductance(o);
  const double mc = c_o * q;
  const double sigma = c_o * std::sqrt(q * (1 - q) / static_cast<double>(kSamples));
  const double z = z_score(mc, predicted, sigma);
  const double secs = seconds_since(start);
  return {monotone && z <= 3.0 && secs < 120.0,
          fmt("Cap_5=%.6f Cap_10=%.6f Cap_20=%.6f monotone %s; fit c0=%.5f, predicted Cap_40=%.5f, Monte Carlo "
              "%.5f +- %.5f (%zu walks), z=%.2f; %.1fs",
              cap[0], cap[1], cap[2], monotone ? "pass" : "FAIL", static_cast<double>(c[0]), predicted, mc, sigma,
              kSamples, z, secs)};
}

// ---------------------------------------------------------------------------
// 9. Method of random paths

Outcome criterion_random_paths() {
  constexpr std::size_t kSamples = 100000;
  const auto start = Clock::now();
  FamilySpec s;
  s.family = Family::kRegularTree;
  s.branching = 2;
  s.depth = 8;
  s.boundary = BoundaryMode::kWired;
  const GeneratedFamily tree = generate(s);
  const VertexId root[] = {tree.quotient->quotient_vertex[tree.labels.at("root")[0]]};
  const double tree_cap = capacity(*tree.quotient, root);
  Rng rng(9000);
  const RandomPathBound eq =
      random_path_capacity_bound(*tree.quotient, root, uniform_descent_paths(*tree.quotient, root), kSamples, rng);
  const double rel = std::abs(eq.bound - tree_cap) / tree_cap;
  const bool eq_ok = rel < 0.01;

  FamilySpec box;
  box.family = Family::kGridBox;
  box.d = 3;
  box.radius = 4;
  box.boundary = BoundaryMode::kWired;
  const GeneratedFamily grid = generate(box);
  const VertexId o[] = {grid.quotient->quotient_vertex[grid.labels.at("origin")[0]]};
  const double grid_cap = capacity(*grid.quotient, o);
  const RandomPathBound strict =
      random_path_capacity_bound(*grid.quotient, o, uniform_descent_paths(*grid.quotient, o), kSamples, rng);
  const bool strict_ok = strict.ci_low <= grid_cap;

  const double secs = seconds_since(start);
  return {eq_ok && strict_ok && secs < 60.0,
          fmt("binary tree depth 8: Cap=%.6f bound=%.6f rel.err=%.4f %s; Z^3 box R=4 uniform descent: Cap=%.4f "
              "bound=%.4f CI [%.4f, %.4f] %s; %zu paths each, %.1fs",
              tree_cap, eq.bound, rel, eq_ok ? "pass" : "FAIL", grid_cap, strict.bound, strict.ci_low,
              strict.ci_high, strict_ok ? "pass" : "FAIL", kSamples, secs)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"exact UST law", criterion_ust_law},
      {"Markov identity", criterion_markov},
      {"MSF identity", criterion_msf},
      {"hitting formula", criterion_hitting},
      {"Poisson arrivals", criterion_poisson},
      {"counterexample bounds", criterion_counterexample},
      {"stationarity and mixing", criterion_mixing},
      {"capacity convergence", criterion_capacity},
      {"random paths", criterion_random_paths},
  };
  int failed = 0;
  int index = 1;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] %d %s: %s\n", o.pass ? "PASS" : "FAIL", index++, name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
