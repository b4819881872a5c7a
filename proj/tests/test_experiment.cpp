#include <doctest.h>

#include <atomic>
#include <sstream>

#include "iab/experiment.hpp"

using namespace iab;

namespace {

std::vector<Json> run_lines(const ExperimentConfig& c, int* rc = nullptr) {
  std::ostringstream out;
  const int code = run(c, out);
  if (rc) *rc = code;
  std::vector<Json> lines;
  std::istringstream in(out.str());
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(Json::parse(line));
  return lines;
}

ExperimentConfig parse(const char* text) { return config_from_json(Json::parse(text)); }

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse(R"({
    "kind": "sample_interlacement",
    "family": {"family": "cycle", "n": 6, "boundary": "wired", "wired": 2},
    "samples": 50, "seed": 9, "window": [0.5, 1.5], "emit": "stats"})");
  CHECK(c.kind == ExperimentKind::kSampleInterlacement);
  CHECK(c.family.family == Family::kCycle);
  CHECK(c.family.n == 6);
  CHECK(c.family.boundary == BoundaryMode::kWired);
  CHECK(c.window_a == 0.5);
  CHECK(c.window_b == 1.5);
  CHECK(c.seed == 9);
  const ExperimentConfig back = config_from_json(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse(R"({"kind": "verify", "colour": 3})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"samples": 3})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"kind": "dance"})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"kind": "verify", "samples": "many"})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"kind": "sample_ust", "sampler": "magic"})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"kind": "dynamics", "t_grid": [0, 1]})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"kind": "sample_interlacement", "window": [2, 1]})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"kind": "sample_interlacement", "window": [1]})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"kind": "hitting", "family": {"family": "path", "d": 0, "n": 1}})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"kind": "sample_ust", "emit": "process"})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"kind": "sample_ust", "format": "dot"})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"kind": "counterexample", "family": {"family": "path"}})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"kind": "verify", "threads": 0})"), ConfigError);
  CHECK_THROWS_AS(parse(R"([1, 2])"), ConfigError);
}

TEST_CASE("experiments that need a boundary report a config error") {
  const ExperimentConfig c = parse(R"({"kind": "hitting", "family": {"family": "cycle", "n": 5}, "set": [0]})");
  std::ostringstream out;
  CHECK_THROWS_AS(run(c, out), ConfigError);
}

TEST_CASE("sample_ust reports fit statistics and is thread-independent") {
  ExperimentConfig c = parse(R"({"kind": "sample_ust", "family": {"family": "complete", "n": 4},
                                 "sampler": "aldous_broder", "samples": 4000, "seed": 3})");
  int rc = -1;
  const auto one = run_lines(c, &rc);
  CHECK(rc == 0);
  REQUIRE(one.size() == 1);
  CHECK(one[0].at("kind") == "sample_ust");
  CHECK(one[0].at("seed") == 3);
  CHECK(one[0].at("trees") == 16);
  CHECK(one[0].at("p_value").get<double>() > 1e-3);
  c.threads = 3;
  CHECK(run_lines(c) == one);
}

TEST_CASE("sample_ust emits forests") {
  const ExperimentConfig c = parse(R"({"kind": "sample_ust", "family": {"family": "cycle", "n": 5, "boundary": "wired"},
                                       "sampler": "wilson", "samples": 5, "emit": "forest"})");
  const auto lines = run_lines(c);
  CHECK(lines.size() == 5);
  for (const Json& j : lines) CHECK(j.contains("seed"));
}

TEST_CASE("interlacement, dynamics, hitting, capacity") {
  const auto inter = run_lines(parse(R"({"kind": "sample_interlacement",
      "family": {"family": "grid_box", "d": 2, "radius": 2, "boundary": "wired"}, "samples": 20, "emit": "process"})"));
  CHECK(inter.size() >= 20);
  const auto dyn = run_lines(parse(R"({"kind": "dynamics",
      "family": {"family": "grid_box", "d": 2, "radius": 2, "boundary": "wired"}, "samples": 3, "t_grid": [1, 0.5, 0]})"));
  REQUIRE(!dyn.empty());
  CHECK(dyn.back().at("kind") == "dynamics");
  const auto hit = run_lines(parse(R"({"kind": "hitting",
      "family": {"family": "grid_box", "d": 3, "radius": 2, "boundary": "wired"}, "samples": 4000, "set": [0, 1], "t": 0.5})"));
  REQUIRE(hit.size() == 1);
  CHECK(hit[0].at("z").get<double>() < 4.0);
  const auto cap = run_lines(parse(R"({"kind": "capacity",
      "family": {"family": "path", "n": 3, "boundary": "wired", "wired": 1}, "set": [0, 1]})"));
  REQUIRE(cap.size() == 1);
  CHECK(cap[0].at("capacity").get<double>() == doctest::Approx(1.0));
}

TEST_CASE("explicit retained set overrides the family wiring") {
  const auto lines = run_lines(parse(R"({"kind": "capacity", "family": {"family": "path", "n": 4},
                                          "retained": [1, 2], "set": [0]})"));
  REQUIRE(lines.size() == 1);
  // Quotient vertex 0 is base vertex 1, with one edge to each side.
  CHECK(lines[0].at("capacity").get<double>() == doctest::Approx(1.5));
}

TEST_CASE("counterexample summary") {
  const auto lines = run_lines(parse(R"({"kind": "counterexample",
      "family": {"family": "counterexample_gkm", "k": 4, "m": 6, "depth": 3}, "samples": 0})"));
  REQUIRE(lines.size() == 4);
  CHECK(lines[0].at("p_exact") == "2/5");
  CHECK(lines[1].at("p_exact") == "462/991");
  const Json& s = lines.back();
  CHECK(s.at("kind") == "counterexample_summary");
  CHECK(s.at("monotone") == true);
  CHECK(s.at("lower_bound") == "1/3");
  CHECK(s.at("subcritical_from_upper_bound") == true);
}

TEST_CASE("parallel_for covers every index and rethrows") {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, 4, [&](std::size_t i) { ++hits[i]; });
  for (const auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](std::size_t i) {
                                 if (i == 7) throw ValidationError("seven");
                               }),
                  ValidationError);
  parallel_for(0, 2, [](std::size_t) { FAIL("called"); });
}
