#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "iab/forest.hpp"

namespace iab {

using Key = ForestKey;

struct EmpiricalDistribution {
  std::map<Key, std::uint64_t> counts;
  std::uint64_t total = 0;

  void add(const Key& key, std::uint64_t n = 1) {
    counts[key] += n;
    total += n;
  }
  double frequency(const Key& key) const;
};

using ProbabilityMap = std::map<Key, double>;

// 1/2 sum |p_hat - p| over the union of supports.
double tv_distance(const EmpiricalDistribution& emp, const ProbabilityMap& exact);
double tv_distance(const ProbabilityMap& p, const ProbabilityMap& q);

struct ChiSquared {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t degrees_of_freedom = 0;
};

// Pearson goodness of fit. Cells with expected count < 5 are pooled into one
// cell; empirical mass outside the exact support gives statistic = inf.
ChiSquared chi_squared_test(const EmpiricalDistribution& emp, const ProbabilityMap& exact);

struct MeanCi {
  double mean = 0.0;
  double half_width = 0.0;
  double standard_error = 0.0;
};

// Normal-approximation interval at the given two-sided confidence.
MeanCi mc_mean_ci(std::span<const double> samples, double confidence = 0.95);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// One-sample Kolmogorov-Smirnov test against a continuous CDF.
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

// Asymptotic Kolmogorov survival function P(K > x).
double kolmogorov_survival(double x);

// |observed - expected| / sigma, with sigma = 0 treated as exact agreement.
double z_score(double observed, double expected, double sigma);

struct TestReport {
  std::string test;
  double statistic = 0.0;
  double p_value = 1.0;
  bool pass = false;
  std::string detail;
};

}  // namespace iab
