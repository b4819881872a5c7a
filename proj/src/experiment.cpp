#include "iab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "iab/interlacement.hpp"
#include "iab/potential.hpp"
#include "iab/spanning.hpp"

namespace iab {

namespace {

constexpr const char* kKindNames[] = {"sample_ust", "sample_interlacement", "dynamics", "hitting",
                                      "capacity",   "counterexample",       "verify"};

std::string rational_string(const Rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

template <typename T>
T field(const Json& j, const char* name, T fallback) {
  if (!j.contains(name)) return fallback;
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("field '") + name + "' has the wrong type");
  }
}

struct Resolved {
  GeneratedFamily family;
  std::shared_ptr<const WiredQuotient> quotient;
  const Network* graph = nullptr;
  VertexId root = kNoVertex;
};

Resolved resolve(const ExperimentConfig& c) {
  Resolved r;
  r.family = generate(c.family);
  if (c.retained)
    r.quotient = std::make_shared<const WiredQuotient>(wired_quotient(r.family.network, *c.retained));
  else
    r.quotient = r.family.quotient;
  if (r.quotient) {
    r.graph = &r.quotient->network();
    r.root = r.quotient->boundary;
  } else {
    r.graph = r.family.network.get();
    r.root = c.root;
    if (!r.graph->contains(r.root)) throw ConfigError("root is not a vertex of the network");
  }
  return r;
}

const WiredQuotient& require_quotient(const Resolved& r) {
  if (!r.quotient) throw ConfigError("this experiment needs a wired boundary or an explicit 'retained' set");
  return *r.quotient;
}

void emit(std::ostream& out, Json line, std::uint64_t seed) {
  line["seed"] = seed;
  out << line.dump() << '\n';
}

void emit_csv(std::ostream& out, const Json& row, std::uint64_t seed) {
  out << "# seed=" << seed << '\n' << "key,value\n";
  for (const auto& [key, value] : row.items())
    if (!value.is_structured()) out << key << ',' << value.dump() << '\n';
}

// Runs f(i) over [0, n) in fixed-size chunks and hands each chunk's results
// to `sink` in index order, so output does not depend on the thread count.
template <typename T, typename F, typename Sink>
void chunked(std::size_t n, unsigned threads, F&& f, Sink&& sink) {
  constexpr std::size_t kChunk = 4096;
  std::vector<T> buffer;
  for (std::size_t lo = 0; lo < n; lo += kChunk) {
    const std::size_t len = std::min(kChunk, n - lo);
    buffer.assign(len, T{});
    parallel_for(len, threads, [&](std::size_t i) { buffer[i] = f(lo + i); });
    for (std::size_t i = 0; i < len; ++i) sink(lo + i, buffer[i]);
  }
}

OrientedForest sample_tree(const Resolved& r, const std::string& sampler, Rng rng) {
  if (sampler == "aldous_broder") return aldous_broder(*r.graph, r.root, rng);
  if (sampler == "wilson") return wilson(*r.graph, r.root, rng);
  PointProcess process(r.quotient, 0.0, 0.0, rng);
  return ab_state(process, 0.0).forest(*r.quotient);
}

int run_sample_ust(const ExperimentConfig& c, std::ostream& out) {
  const Resolved r = resolve(c);
  if (c.sampler == "interlacement") require_quotient(r);
  const Network& net = *r.graph;
  const Rng base(c.seed);
  EmpiricalDistribution dist;
  std::vector<std::uint64_t> edge_count(net.num_edges(), 0);
  chunked<OrientedForest>(
      c.samples, c.threads, [&](std::size_t i) { return sample_tree(r, c.sampler, base.substream(i)); },
      [&](std::size_t i, const OrientedForest& f) {
        const auto ids = f.edge_ids();
        dist.add(edge_set_key(ids));
        for (EdgeId e : ids) ++edge_count[e];
        if (c.emit == "forest") {
          if (c.format == "dot")
            out << forest_to_dot(net, f);
          else
            emit(out, {{"sample", i}, {"forest", forest_to_json(net, f)}}, c.seed);
        }
      });
  if (c.emit == "forest") return 0;

  Json summary{{"kind", "sample_ust"}, {"sampler", c.sampler}, {"samples", c.samples}, {"distinct", dist.counts.size()}};
  std::vector<double> exact_marginal;
  if (net.num_vertices() <= 2000 && net.num_edges() <= 2000) {
    exact_marginal.resize(net.num_edges());
    for (EdgeId e = 0; e < net.num_edges(); ++e) exact_marginal[e] = ust_edge_probability(net, e);
  }
  try {
    const auto law = spanning_tree_law(net, 20000);
    ProbabilityMap exact;
    for (const WeightedTree& t : law) exact[edge_set_key(t.edges)] = t.probability;
    summary["trees"] = law.size();
    if (c.samples > 0) {
      summary["tv"] = tv_distance(dist, exact);
      if (law.size() >= 2) {
        const ChiSquared chi = chi_squared_test(dist, exact);
        summary["chi_squared"] = std::isfinite(chi.statistic) ? Json(chi.statistic) : Json(nullptr);
        summary["p_value"] = chi.p_value;
        summary["df"] = chi.degrees_of_freedom;
      }
    }
  } catch (const BudgetError&) {
    summary["trees"] = nullptr;
  }

  if (c.format == "csv") {
    out << "# seed=" << c.seed << '\n' << "edge_id,a,b,frequency,exact\n";
    for (EdgeId e = 0; e < net.num_edges(); ++e) {
      out << e << ',' << net.edge(e).a << ',' << net.edge(e).b << ','
          << (c.samples ? static_cast<double>(edge_count[e]) / static_cast<double>(c.samples) : 0.0) << ',';
      if (!exact_marginal.empty()) out << exact_marginal[e];
      out << '\n';
    }
    return 0;
  }
  Json marginals = Json::array();
  for (EdgeId e = 0; e < net.num_edges(); ++e) {
    Json row{{"edge_id", e},
             {"frequency", c.samples ? static_cast<double>(edge_count[e]) / static_cast<double>(c.samples) : 0.0}};
    if (!exact_marginal.empty()) row["exact"] = exact_marginal[e];
    marginals.push_back(std::move(row));
  }
  summary["edge_marginals"] = std::move(marginals);
  emit(out, std::move(summary), c.seed);
  return 0;
}

Json arrival_to_json(const Arrival& a) {
  return {{"time", a.time}, {"id", a.trajectory.id}, {"walk", walk_to_json(a.trajectory.walk)}};
}

int run_sample_interlacement(const ExperimentConfig& c, std::ostream& out) {
  const Resolved r = resolve(c);
  const WiredQuotient& wq = require_quotient(r);
  const Rng base(c.seed);
  struct Sample {
    std::vector<Arrival> arrivals;
    OrientedForest forest;
  };
  double count_sum = 0.0, count_sq = 0.0, size_sum = 0.0;
  chunked<Sample>(
      c.samples, c.threads,
      [&](std::size_t i) {
        PointProcess p(r.quotient, c.window_a, c.window_b, base.substream(i));
        OrientedForest f = ab_forest(p, c.window_a, c.window_b);
        return Sample{p.arrivals(), std::move(f)};
      },
      [&](std::size_t i, const Sample& s) {
        const auto n = static_cast<double>(s.arrivals.size());
        count_sum += n;
        count_sq += n * n;
        size_sum += static_cast<double>(s.forest.size() - 1);
        if (c.emit == "process") {
          Json arrivals = Json::array();
          for (const Arrival& a : s.arrivals) arrivals.push_back(arrival_to_json(a));
          emit(out, {{"sample", i}, {"window", {c.window_a, c.window_b}}, {"arrivals", std::move(arrivals)}}, c.seed);
        } else if (c.emit == "forest") {
          if (c.format == "dot")
            out << forest_to_dot(wq.network(), s.forest);
          else
            emit(out, {{"sample", i}, {"forest", forest_to_json(wq.network(), s.forest)}}, c.seed);
        }
      });
  if (c.emit != "stats") return 0;
  const double n = static_cast<double>(std::max<std::size_t>(c.samples, 1));
  const double mean = count_sum / n;
  Json summary{{"kind", "sample_interlacement"},
               {"samples", c.samples},
               {"window", {c.window_a, c.window_b}},
               {"boundary_conductance", wq.boundary_conductance()},
               {"count_mean", mean},
               {"count_variance", count_sq / n - mean * mean},
               {"count_expected", wq.boundary_conductance() * (c.window_b - c.window_a)},
               {"assigned_mean", size_sum / n},
               {"interior_vertices", wq.num_interior()}};
  if (c.format == "csv")
    emit_csv(out, summary, c.seed);
  else
    emit(out, std::move(summary), c.seed);
  return 0;
}

int run_dynamics(const ExperimentConfig& c, std::ostream& out) {
  const Resolved r = resolve(c);
  const WiredQuotient& wq = require_quotient(r);
  const Network& net = wq.network();
  const Rng base(c.seed);
  const std::size_t g = c.t_grid.size();
  std::vector<std::vector<std::uint64_t>> count(g, std::vector<std::uint64_t>(net.num_edges(), 0));
  chunked<std::vector<AbState>>(
      c.samples, c.threads, [&](std::size_t i) { return dynamics_run(r.quotient, c.t_grid, base.substream(i)); },
      [&](std::size_t i, const std::vector<AbState>& states) {
        for (std::size_t j = 0; j < g; ++j) {
          const OrientedForest f = states[j].forest(wq);
          for (EdgeId e : f.edge_ids()) ++count[j][e];
          if (c.emit == "forest")
            emit(out, {{"sample", i}, {"t", states[j].t}, {"forest", forest_to_json(net, f)}}, c.seed);
        }
      });
  if (c.emit == "forest") return 0;
  Json grid = Json::array();
  for (std::size_t j = 0; j < g; ++j) {
    Json freq = Json::array();
    for (EdgeId e = 0; e < net.num_edges(); ++e)
      freq.push_back(c.samples ? static_cast<double>(count[j][e]) / static_cast<double>(c.samples) : 0.0);
    grid.push_back({{"t", c.t_grid[j]}, {"edge_frequency", std::move(freq)}});
  }
  emit(out, {{"kind", "dynamics"}, {"samples", c.samples}, {"grid", std::move(grid)}}, c.seed);
  return 0;
}

int run_hitting(const ExperimentConfig& c, std::ostream& out) {
  const Resolved r = resolve(c);
  const WiredQuotient& wq = require_quotient(r);
  const HitTest h = hit_probability_test(wq, c.set, c.t, c.samples, Rng(c.seed));
  Json row{{"kind", "hitting"},  {"t", c.t},         {"set", c.set},     {"capacity", h.capacity},
           {"empirical", h.empirical}, {"exact", h.exact}, {"sigma", h.sigma}, {"z", h.z},
           {"samples", h.samples}};
  if (c.format == "csv")
    emit_csv(out, row, c.seed);
  else
    emit(out, std::move(row), c.seed);
  return 0;
}

int run_capacity(const ExperimentConfig& c, std::ostream& out) {
  const Resolved r = resolve(c);
  const WiredQuotient& wq = require_quotient(r);
  const VertexId sink[] = {wq.boundary};
  Json row{{"kind", "capacity"}, {"set", c.set}, {"capacity", capacity(wq, c.set)}};
  if (!c.set.empty()) row["effective_conductance"] = effective_conductance(wq.network(), c.set, sink);
  if (c.format == "csv")
    emit_csv(out, row, c.seed);
  else
    emit(out, std::move(row), c.seed);
  return 0;
}

int run_counterexample(const ExperimentConfig& c, std::ostream& out) {
  const int k = c.family.k, m = c.family.m, depth = c.family.depth;
  const auto [lower, upper] = p_mk_bounds(k, m);
  Rational previous = 0;
  bool monotone = true, within = true;
  Rational p = 0;
  for (int d = 1; d <= depth; ++d) {
    p = p_mk(k, m, d);
    const bool in_bounds = p >= lower && p <= upper;
    monotone = monotone && p >= previous;
    within = within && in_bounds;
    previous = p;
    emit(out,
         {{"kind", "counterexample"}, {"k", k}, {"m", m}, {"depth", d}, {"p_exact", rational_string(p)},
          {"p", p.convert_to<double>()}, {"within_bounds", in_bounds}},
         c.seed);
  }
  Json summary{{"kind", "counterexample_summary"},
               {"k", k},
               {"m", m},
               {"depth", depth},
               {"p_exact", rational_string(p)},
               {"p", p.convert_to<double>()},
               {"lower_bound", rational_string(lower)},
               {"upper_bound", rational_string(upper)},
               {"bounds_pass", within},
               {"monotone", monotone},
               {"supercritical_from_lower_bound", 2 * lower > 1},
               {"subcritical_from_upper_bound", 3 * upper <= 1},
               {"two_p", (2 * p).convert_to<double>()},
               {"three_p", (3 * p).convert_to<double>()}};
  if (c.samples > 0) {
    const HitEstimate mc = parent_hit_monte_carlo(k, m, depth, c.samples, Rng(c.seed));
    summary["monte_carlo"] = mc.estimate;
    summary["monte_carlo_sigma"] = mc.sigma;
    summary["monte_carlo_z"] = z_score(mc.estimate, p.convert_to<double>(), mc.sigma);
  }
  emit(out, std::move(summary), c.seed);
  return 0;
}

int run_verify(const ExperimentConfig& c, std::ostream& out) {
  const auto reports = verify_suite(c.seed, c.threads);
  std::size_t failed = 0;
  for (const TestReport& r : reports) {
    if (!r.pass) ++failed;
    emit(out, report_to_json(r), c.seed);
  }
  emit(out, {{"kind", "verify"}, {"checks", reports.size()}, {"failed", failed}, {"pass", failed == 0}}, c.seed);
  return failed == 0 ? 0 : 1;
}

}  // namespace

FamilySpec family_spec_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("'family' must be an object");
  FamilySpec s;
  try {
    s.family = family_from_string(field<std::string>(j, "family", "path"));
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  s.d = field(j, "d", s.d);
  s.radius = field(j, "radius", s.radius);
  s.n = field(j, "n", s.n);
  s.k = field(j, "k", s.k);
  s.m = field(j, "m", s.m);
  s.branching = field(j, "branching", s.branching);
  s.depth = field(j, "depth", s.depth);
  s.path_length = field(j, "path_length", s.path_length);
  s.wired = field(j, "wired", s.wired);
  const std::string boundary = field<std::string>(j, "boundary", "free");
  if (boundary != "wired" && boundary != "free") throw ConfigError("boundary must be 'wired' or 'free'");
  s.boundary = boundary == "wired" ? BoundaryMode::kWired : BoundaryMode::kFree;
  s.condensed = field(j, "condensed", s.condensed);
  s.vertex_budget = field(j, "vertex_budget", s.vertex_budget);
  return s;
}

Json family_spec_to_json(const FamilySpec& s) {
  return {{"family", to_string(s.family)},
          {"d", s.d},
          {"radius", s.radius},
          {"n", s.n},
          {"k", s.k},
          {"m", s.m},
          {"branching", s.branching},
          {"depth", s.depth},
          {"path_length", s.path_length},
          {"wired", s.wired},
          {"boundary", s.boundary == BoundaryMode::kWired ? "wired" : "free"},
          {"condensed", s.condensed},
          {"vertex_budget", s.vertex_budget}};
}

const char* to_string(ExperimentKind kind) { return kKindNames[static_cast<int>(kind)]; }

ExperimentKind experiment_kind_from_string(const std::string& s) {
  for (int i = 0; i < static_cast<int>(std::size(kKindNames)); ++i)
    if (s == kKindNames[i]) return static_cast<ExperimentKind>(i);
  throw ConfigError("unknown experiment kind '" + s + "'");
}

ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const char* known[] = {"kind", "family", "retained", "sampler", "root", "samples", "seed",   "threads",
                                "window", "t_grid", "set", "t", "emit", "format", "out"};
  for (const auto& [key, value] : j.items())
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) == std::end(known))
      throw ConfigError("unknown config field '" + key + "'");
  if (!j.contains("kind")) throw ConfigError("missing field 'kind'");
  ExperimentConfig c;
  c.kind = experiment_kind_from_string(field<std::string>(j, "kind", ""));
  if (j.contains("family")) c.family = family_spec_from_json(j.at("family"));
  if (j.contains("retained")) c.retained = field<std::vector<VertexId>>(j, "retained", {});
  c.sampler = field(j, "sampler", c.sampler);
  c.root = field(j, "root", c.root);
  c.samples = field(j, "samples", c.samples);
  c.seed = field(j, "seed", c.seed);
  c.threads = field(j, "threads", c.threads);
  if (j.contains("window")) {
    const auto w = field<std::vector<double>>(j, "window", {});
    if (w.size() != 2) throw ConfigError("'window' must be [a, b]");
    c.window_a = w[0];
    c.window_b = w[1];
  }
  c.t_grid = field(j, "t_grid", c.t_grid);
  c.set = field(j, "set", c.set);
  c.t = field(j, "t", c.t);
  c.emit = field(j, "emit", c.emit);
  c.format = field(j, "format", c.format);
  c.out = field(j, "out", c.out);
  validate(c);
  return c;
}

Json config_to_json(const ExperimentConfig& c) {
  Json j{{"kind", to_string(c.kind)}, {"family", family_spec_to_json(c.family)},
         {"sampler", c.sampler},      {"root", c.root},
         {"samples", c.samples},      {"seed", c.seed},
         {"threads", c.threads},      {"window", {c.window_a, c.window_b}},
         {"t_grid", c.t_grid},        {"set", c.set},
         {"t", c.t},                  {"emit", c.emit},
         {"format", c.format},        {"out", c.out}};
  if (c.retained) j["retained"] = *c.retained;
  return j;
}

void validate(const ExperimentConfig& c) {
  try {
    validate(c.family);
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("family: ") + e.what());
  }
  if (c.sampler != "aldous_broder" && c.sampler != "wilson" && c.sampler != "interlacement")
    throw ConfigError("sampler must be aldous_broder, wilson, or interlacement");
  if (c.emit != "forest" && c.emit != "process" && c.emit != "stats")
    throw ConfigError("emit must be forest, process, or stats");
  if (c.format != "json" && c.format != "csv" && c.format != "dot") throw ConfigError("format must be json, csv, or dot");
  if (c.threads == 0) throw ConfigError("threads must be >= 1");
  if (!(c.window_a <= c.window_b)) throw ConfigError("window must satisfy a <= b");
  if (c.t_grid.empty()) throw ConfigError("t_grid must be nonempty");
  for (std::size_t i = 1; i < c.t_grid.size(); ++i)
    if (c.t_grid[i] > c.t_grid[i - 1]) throw ConfigError("t_grid must be non-increasing");
  if (!(c.t >= 0.0)) throw ConfigError("t must be >= 0");
  const bool forest_kind = c.kind == ExperimentKind::kSampleUst || c.kind == ExperimentKind::kSampleInterlacement;
  if (c.format == "dot" && !(forest_kind && c.emit == "forest")) throw ConfigError("dot output needs emit = forest");
  if (c.emit == "process" && c.kind != ExperimentKind::kSampleInterlacement)
    throw ConfigError("emit = process is only available for sample_interlacement");
  if (c.kind == ExperimentKind::kHitting && c.samples == 0) throw ConfigError("hitting needs samples >= 1");
  if (c.kind == ExperimentKind::kCounterexample && c.family.family != Family::kCounterexample)
    throw ConfigError("counterexample needs family counterexample_gkm");
}

int run(const ExperimentConfig& c, std::ostream& out) {
  validate(c);
  try {
    switch (c.kind) {
      case ExperimentKind::kSampleUst: return run_sample_ust(c, out);
      case ExperimentKind::kSampleInterlacement: return run_sample_interlacement(c, out);
      case ExperimentKind::kDynamics: return run_dynamics(c, out);
      case ExperimentKind::kHitting: return run_hitting(c, out);
      case ExperimentKind::kCapacity: return run_capacity(c, out);
      case ExperimentKind::kCounterexample: return run_counterexample(c, out);
      case ExperimentKind::kVerify: return run_verify(c, out);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  } catch (const UnknownVertexError& e) {
    throw ConfigError(e.what());
  } catch (const NoBoundaryError& e) {
    throw ConfigError(e.what());
  } catch (const BudgetError& e) {
    throw ConfigError(e.what());
  }
  return 0;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& f) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace iab
