#include "iab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "iab/types.hpp"

namespace iab {

double EmpiricalDistribution::frequency(const Key& key) const {
  if (total == 0) return 0.0;
  auto it = counts.find(key);
  return it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
}

double tv_distance(const EmpiricalDistribution& emp, const ProbabilityMap& exact) {
  if (emp.total == 0) throw ValidationError("empty empirical distribution");
  double acc = 0.0;
  for (const auto& [key, p] : exact) acc += std::abs(emp.frequency(key) - p);
  for (const auto& [key, n] : emp.counts)
    if (!exact.contains(key)) acc += static_cast<double>(n) / static_cast<double>(emp.total);
  return 0.5 * acc;
}

double tv_distance(const ProbabilityMap& p, const ProbabilityMap& q) {
  double acc = 0.0;
  for (const auto& [key, x] : p) {
    auto it = q.find(key);
    acc += std::abs(x - (it == q.end() ? 0.0 : it->second));
  }
  for (const auto& [key, y] : q)
    if (!p.contains(key)) acc += y;
  return 0.5 * acc;
}

ChiSquared chi_squared_test(const EmpiricalDistribution& emp, const ProbabilityMap& exact) {
  if (emp.total == 0) throw ValidationError("empty empirical distribution");
  double mass = 0.0;
  for (const auto& [key, p] : exact) {
    if (p < 0) throw ValidationError("negative probability in exact law");
    mass += p;
  }
  if (exact.size() < 2 || std::abs(mass - 1.0) > 1e-9) throw ValidationError("degenerate exact distribution");

  const double n = static_cast<double>(emp.total);
  ChiSquared out;
  for (const auto& [key, cnt] : emp.counts)
    if (!exact.contains(key) || exact.at(key) == 0.0) {
      out.statistic = std::numeric_limits<double>::infinity();
      out.p_value = 0.0;
      out.degrees_of_freedom = exact.size() - 1;
      return out;
    }

  double pooled_expected = 0.0, pooled_observed = 0.0;
  std::size_t cells = 0;
  for (const auto& [key, p] : exact) {
    const double expected = n * p;
    auto it = emp.counts.find(key);
    const double observed = it == emp.counts.end() ? 0.0 : static_cast<double>(it->second);
    if (expected < 5.0) {
      pooled_expected += expected;
      pooled_observed += observed;
      continue;
    }
    out.statistic += (observed - expected) * (observed - expected) / expected;
    ++cells;
  }
  if (pooled_expected > 0.0) {
    out.statistic += (pooled_observed - pooled_expected) * (pooled_observed - pooled_expected) / pooled_expected;
    ++cells;
  }
  if (cells < 2) throw ValidationError("too few cells for a chi-squared test after pooling");
  out.degrees_of_freedom = cells - 1;
  out.p_value = boost::math::gamma_q(0.5 * static_cast<double>(out.degrees_of_freedom), 0.5 * out.statistic);
  return out;
}

MeanCi mc_mean_ci(std::span<const double> samples, double confidence) {
  if (samples.size() < 2) throw ValidationError("confidence interval needs at least two samples");
  if (!(confidence > 0.0 && confidence < 1.0)) throw ValidationError("confidence must lie in (0, 1)");
  const double n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double se = std::sqrt(ss / (n - 1.0) / n);
  const double z = boost::math::quantile(boost::math::normal(), 0.5 + 0.5 * confidence);
  return {mean, z * se, se};
}

double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) return 1.0;  // the series below has not converged; P(K > 0.2) = 1 - 6e-23
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw ValidationError("KS test needs samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  const double sqrt_n = std::sqrt(n);
  // Stephens' finite-n correction to the asymptotic distribution.
  return {d, kolmogorov_survival((sqrt_n + 0.12 + 0.11 / sqrt_n) * d)};
}

double z_score(double observed, double expected, double sigma) {
  if (sigma <= 0.0) return observed == expected ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(observed - expected) / sigma;
}

}  // namespace iab
