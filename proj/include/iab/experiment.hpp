#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "iab/families.hpp"
#include "iab/io.hpp"
#include "iab/stats.hpp"

namespace iab {

enum class ExperimentKind { kSampleUst, kSampleInterlacement, kDynamics, kHitting, kCapacity, kCounterexample, kVerify };

const char* to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& s);

struct ConfigError : ValidationError {
  using ValidationError::ValidationError;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kVerify;
  FamilySpec family;
  std::optional<std::vector<VertexId>> retained;  // overrides the family's own wiring
  std::string sampler = "wilson";                 // aldous_broder | wilson | interlacement
  VertexId root = 0;                              // for free-boundary samplers
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  double window_a = 0.0;
  double window_b = 1.0;
  std::vector<double> t_grid{1.0, 0.0};
  std::vector<VertexId> set;  // quotient ids
  double t = 1.0;
  std::string emit = "stats";    // forest | process | stats
  std::string format = "json";   // json | csv | dot
  std::string out;               // empty: standard output
};

// FamilySpec as JSON: {family, d, radius, n, k, m, branching, depth,
// path_length, wired, boundary, condensed, vertex_budget}; missing fields
// take their defaults.
FamilySpec family_spec_from_json(const Json& j);
Json family_spec_to_json(const FamilySpec& spec);

// Throws ConfigError with a field-level message.
ExperimentConfig config_from_json(const Json& j);
Json config_to_json(const ExperimentConfig& config);
void validate(const ExperimentConfig& config);

// Writes JSON lines (or CSV / DOT) to `out`. Returns 0 when every check
// passes and 1 otherwise; only the verify kind can fail. Deterministic given
// the config, independently of `threads`.
int run(const ExperimentConfig& config, std::ostream& out);

// The invariant suite behind the verify kind.
std::vector<TestReport> verify_suite(std::uint64_t seed, unsigned threads);

// Calls f(i) for i in [0, n) on up to `threads` workers. The first exception
// thrown by any call is rethrown after all workers stop.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& f);

}  // namespace iab
