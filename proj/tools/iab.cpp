#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "iab/experiment.hpp"
#include "iab/potential.hpp"

namespace {

using iab::ConfigError;
using iab::ExperimentConfig;
using iab::ExperimentKind;
using iab::Json;

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

struct FamilyFlags {
  std::string graph;
  std::string family;
  std::optional<int> d, radius, n, k, m, branching, depth, wired;
  std::string boundary;
  bool condensed = false;

  void add(CLI::App* app) {
    app->add_option("--graph", graph, "FamilySpec JSON file");
    app->add_option("--family", family, "family name (overrides --graph)");
    app->add_option("--d", d, "grid dimension");
    app->add_option("--radius", radius, "grid radius");
    app->add_option("--n", n, "vertex count for complete / cycle / path");
    app->add_option("--k", k, "stretching base");
    app->add_option("--m", m, "edge multiplicity");
    app->add_option("--branching", branching, "children per tree vertex");
    app->add_option("--depth", depth, "depth cap");
    app->add_option("--wired", wired, "number of wired vertices for complete / cycle / path");
    app->add_option("--boundary", boundary, "wired or free")->check(CLI::IsMember({"wired", "free"}));
    app->add_flag("--condensed", condensed, "collapse stretched paths to single edges");
  }

  iab::FamilySpec resolve(iab::FamilySpec spec) const {
    if (!graph.empty()) spec = iab::family_spec_from_json(read_json(graph));
    if (!family.empty()) {
      try {
        spec.family = iab::family_from_string(family);
      } catch (const iab::ValidationError& e) {
        throw ConfigError(e.what());
      }
    }
    if (d) spec.d = *d;
    if (radius) spec.radius = *radius;
    if (n) spec.n = *n;
    if (k) spec.k = *k;
    if (m) spec.m = *m;
    if (branching) spec.branching = *branching;
    if (depth) spec.depth = *depth;
    if (wired) spec.wired = *wired;
    if (!boundary.empty()) spec.boundary = boundary == "wired" ? iab::BoundaryMode::kWired : iab::BoundaryMode::kFree;
    if (condensed) spec.condensed = true;
    return spec;
  }
};

int emit_to(const std::string& path, const std::function<int(std::ostream&)>& body) {
  if (path.empty()) return body(std::cout);
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  return body(out);
}

int potential_query(const std::string& query, const ExperimentConfig& c) {
  if (query == "capacity") {
    ExperimentConfig copy = c;
    copy.kind = ExperimentKind::kCapacity;
    return emit_to(c.out, [&](std::ostream& out) { return iab::run(copy, out); });
  }
  const iab::GeneratedFamily g = iab::generate(c.family);
  const iab::Network& net = g.quotient ? g.quotient->network() : *g.network;
  Json row{{"kind", query}, {"seed", c.seed}};
  if (query == "treecount") {
    row["count"] = iab::spanning_tree_count(net);
  } else {
    Json probs = Json::array();
    double sum = 0.0;
    for (iab::EdgeId e = 0; e < net.num_edges(); ++e) {
      const double p = iab::ust_edge_probability(net, e);
      sum += p;
      probs.push_back({{"edge_id", e}, {"a", net.edge(e).a}, {"b", net.edge(e).b}, {"probability", p}});
    }
    row["edges"] = std::move(probs);
    row["sum"] = sum;
  }
  return emit_to(c.out, [&](std::ostream& out) {
    out << row.dump() << '\n';
    return 0;
  });
}

int families_generate(const iab::FamilySpec& spec, const std::string& out_path) {
  const iab::GeneratedFamily g = iab::generate(spec);
  Json j{{"spec", iab::family_spec_to_json(spec)}, {"network", iab::network_to_json(*g.network)}};
  if (!g.retained.empty()) j["retained"] = g.retained;
  Json labels = Json::object();
  for (const auto& [name, ids] : g.labels) labels[name] = ids;
  j["labels"] = std::move(labels);
  return emit_to(out_path, [&](std::ostream& out) {
    out << j.dump() << '\n';
    return 0;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interlacement Aldous-Broder sampler and potential-theory oracles"};
  app.require_subcommand(1);

  ExperimentConfig c;
  FamilyFlags family;
  std::vector<double> window;
  std::vector<std::uint32_t> set;
  std::string potential_kind, config_path, spec_path;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", c.seed, "random seed");
    sub->add_option("--samples", c.samples, "number of samples");
    sub->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", c.out, "output file (default: stdout)");
    sub->add_option("--format", c.format, "json, csv, or dot")->check(CLI::IsMember({"json", "csv", "dot"}));
  };

  auto* sample = app.add_subcommand("sample", "sample spanning trees");
  common(sample);
  family.add(sample);
  sample->add_option("--sampler", c.sampler, "aldous_broder, wilson, or interlacement");
  sample->add_option("--root", c.root, "root vertex for free boundaries");
  sample->add_option("--emit", c.emit, "forest or stats");

  auto* interlace = app.add_subcommand("interlace", "sample the interlacement process and AB forests");
  common(interlace);
  family.add(interlace);
  interlace->add_option("--window", window, "time window a b")->expected(2);
  interlace->add_option("--emit", c.emit, "forest, process, or stats");

  auto* dynamics = app.add_subcommand("dynamics", "forest-valued dynamics on a decreasing time grid");
  common(dynamics);
  family.add(dynamics);
  dynamics->add_option("--grid", c.t_grid, "decreasing times");
  dynamics->add_option("--emit", c.emit, "forest or stats");

  auto* hitting = app.add_subcommand("hitting", "empirical hitting rate vs 1 - exp(-t Cap(K))");
  common(hitting);
  family.add(hitting);
  hitting->add_option("--set", set, "quotient vertex ids of K")->required();
  hitting->add_option("--t", c.t, "time horizon");

  auto* potential = app.add_subcommand("potential", "exact potential-theory queries");
  common(potential);
  family.add(potential);
  potential->add_option("query", potential_kind, "capacity, treecount, or edgeprob")
      ->required()
      ->check(CLI::IsMember({"capacity", "treecount", "edgeprob"}));
  potential->add_option("--set", set, "quotient vertex ids of K");

  auto* families = app.add_subcommand("families", "graph family generators");
  auto* generate = families->add_subcommand("generate", "write a generated network as JSON");
  families->require_subcommand(1);
  generate->add_option("--spec", spec_path, "FamilySpec JSON file")->required();
  generate->add_option("--out", c.out, "output file (default: stdout)");

  auto* counterexample = app.add_subcommand("counterexample", "exact p(m,k) on truncations of G_k^m");
  common(counterexample);
  int ck = 4, cm = 1, cdepth = 5;
  counterexample->add_option("--k", ck, "stretching base");
  counterexample->add_option("--m", cm, "edge multiplicity");
  counterexample->add_option("--depth", cdepth, "truncation depth");

  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  common(verify);

  auto* run_cmd = app.add_subcommand("run", "run an experiment config");
  run_cmd->add_option("--config", config_path, "ExperimentConfig JSON file")->required();
  run_cmd->add_option("--out", c.out, "output file (overrides the config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*families) return families_generate(iab::family_spec_from_json(read_json(spec_path)), c.out);

    if (*run_cmd) {
      const std::string out = c.out;
      c = iab::config_from_json(read_json(config_path));
      if (!out.empty()) c.out = out;
    } else if (*counterexample) {
      c.kind = ExperimentKind::kCounterexample;
      c.family.family = iab::Family::kCounterexample;
      c.family.k = ck;
      c.family.m = cm;
      c.family.depth = cdepth;
      if (counterexample->count("--samples") == 0) c.samples = 0;
    } else if (*verify) {
      c.kind = ExperimentKind::kVerify;
    } else {
      c.family = family.resolve(c.family);
      c.set.assign(set.begin(), set.end());
      if (*sample) c.kind = ExperimentKind::kSampleUst;
      if (*interlace) {
        c.kind = ExperimentKind::kSampleInterlacement;
        if (window.size() == 2) {
          c.window_a = window[0];
          c.window_b = window[1];
        }
      }
      if (*dynamics) c.kind = ExperimentKind::kDynamics;
      if (*hitting) c.kind = ExperimentKind::kHitting;
      if (*potential) {
        iab::validate(c);
        return potential_query(potential_kind, c);
      }
    }
    iab::validate(c);
    return emit_to(c.out, [&](std::ostream& out) { return iab::run(c, out); });
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const iab::ValidationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const iab::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
