#include <doctest.h>

#include <cmath>
#include <limits>

#include "iab/rng.hpp"
#include "iab/stats.hpp"

using namespace iab;

namespace {

Key key(std::uint64_t x) { return Key{x}; }

}  // namespace

TEST_CASE("empirical frequencies and total variation") {
  EmpiricalDistribution emp;
  emp.add(key(1), 3);
  emp.add(key(2));
  CHECK(emp.total == 4);
  CHECK(emp.frequency(key(1)) == 0.75);
  CHECK(emp.frequency(key(9)) == 0.0);
  const ProbabilityMap exact{{key(1), 0.5}, {key(2), 0.25}, {key(3), 0.25}};
  CHECK(tv_distance(emp, exact) == doctest::Approx(0.25));
  emp.add(key(4), 4);
  // 1/2 (|3/8 - 1/2| + |1/8 - 1/4| + 1/4 + 1/2)
  CHECK(tv_distance(emp, exact) == doctest::Approx(0.5));
  const ProbabilityMap q{{key(1), 1.0}};
  CHECK(tv_distance(exact, q) == doctest::Approx(0.5));
  CHECK(tv_distance(q, q) == 0.0);
  CHECK_THROWS_AS(tv_distance(EmpiricalDistribution{}, exact), ValidationError);
}

TEST_CASE("chi-squared statistic and p-value") {
  const ProbabilityMap exact{{key(1), 0.5}, {key(2), 0.25}, {key(3), 0.25}};
  EmpiricalDistribution emp;
  emp.add(key(1), 60);
  emp.add(key(2), 20);
  emp.add(key(3), 20);
  const ChiSquared c = chi_squared_test(emp, exact);
  // (10^2/50 + 5^2/25 + 5^2/25) = 4, two degrees of freedom: p = e^{-2}.
  CHECK(c.statistic == doctest::Approx(4.0));
  CHECK(c.degrees_of_freedom == 2);
  CHECK(c.p_value == doctest::Approx(std::exp(-2.0)));

  SUBCASE("mass outside the support") {
    emp.add(key(8));
    const ChiSquared bad = chi_squared_test(emp, exact);
    CHECK(std::isinf(bad.statistic));
    CHECK(bad.p_value == 0.0);
  }
  SUBCASE("cells with small expectation are pooled") {
    const ProbabilityMap skew{{key(1), 0.97}, {key(2), 0.01}, {key(3), 0.01}, {key(4), 0.01}};
    EmpiricalDistribution e;
    e.add(key(1), 97);
    e.add(key(2), 3);
    const ChiSquared pooled = chi_squared_test(e, skew);
    CHECK(pooled.degrees_of_freedom == 1);
    CHECK(pooled.statistic == doctest::Approx(0.0));
  }
  SUBCASE("degenerate input") {
    CHECK_THROWS_AS(chi_squared_test(emp, ProbabilityMap{{key(1), 1.0}}), ValidationError);
    CHECK_THROWS_AS(chi_squared_test(emp, ProbabilityMap{{key(1), 0.5}, {key(2), 0.2}}), ValidationError);
    CHECK_THROWS_AS(chi_squared_test(EmpiricalDistribution{}, exact), ValidationError);
  }
}

TEST_CASE("chi-squared p-values are roughly uniform under the null") {
  const ProbabilityMap exact{{key(0), 0.1}, {key(1), 0.2}, {key(2), 0.3}, {key(3), 0.4}};
  Rng rng(4);
  int small = 0;
  const int reps = 400;
  for (int r = 0; r < reps; ++r) {
    EmpiricalDistribution emp;
    for (int i = 0; i < 500; ++i) {
      const double u = rng.uniform();
      emp.add(key(u < 0.1 ? 0 : u < 0.3 ? 1 : u < 0.6 ? 2 : 3));
    }
    small += chi_squared_test(emp, exact).p_value < 0.05;
  }
  CHECK(small > 5);
  CHECK(small < 40);
}

TEST_CASE("mean confidence interval") {
  const double xs[] = {1, 2, 3, 4, 5};
  const MeanCi ci = mc_mean_ci(xs, 0.95);
  CHECK(ci.mean == 3.0);
  CHECK(ci.standard_error == doctest::Approx(std::sqrt(2.5 / 5)));
  CHECK(ci.half_width == doctest::Approx(1.959964 * std::sqrt(0.5)).epsilon(1e-6));
  const double one[] = {1};
  CHECK_THROWS_AS(mc_mean_ci(one), ValidationError);
  CHECK_THROWS_AS(mc_mean_ci(xs, 1.0), ValidationError);
}

TEST_CASE("Kolmogorov distribution") {
  CHECK(kolmogorov_survival(0.0) == 1.0);
  CHECK(kolmogorov_survival(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(kolmogorov_survival(1.6276) == doctest::Approx(0.01).epsilon(1e-3));
  CHECK(kolmogorov_survival(0.8276) == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(kolmogorov_survival(5.0) < 1e-20);
}

TEST_CASE("KS test") {
  const auto uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
  const auto expo = [](double x) { return x <= 0 ? 0.0 : -std::expm1(-x); };
  Rng rng(10);
  std::vector<double> u(20000), e(20000);
  for (auto& x : u) x = rng.uniform();
  for (auto& x : e) x = exponential(rng, 1.0);
  CHECK(ks_test(u, uniform).p_value > 1e-3);
  CHECK(ks_test(e, expo).p_value > 1e-3);
  CHECK(ks_test(u, expo).p_value < 1e-6);
  std::vector<double> scaled(e);
  for (auto& x : scaled) x *= 1.1;
  CHECK(ks_test(scaled, expo).p_value < 1e-6);

  const KsResult one = ks_test({0.5}, uniform);
  CHECK(one.statistic == doctest::Approx(0.5));
  CHECK_THROWS_AS(ks_test({}, uniform), ValidationError);
}

TEST_CASE("z-score") {
  CHECK(z_score(1.2, 1.0, 0.1) == doctest::Approx(2.0));
  CHECK(z_score(0.8, 1.0, 0.1) == doctest::Approx(2.0));
  CHECK(z_score(1.0, 1.0, 0.0) == 0.0);
  CHECK(std::isinf(z_score(1.1, 1.0, 0.0)));
}

TEST_CASE("rng substreams are reproducible and distinct") {
  const Rng base(42);
  Rng a = base.substream(3), b = base.substream(3), c = base.substream(4);
  CHECK(a() == b());
  CHECK(a() != c());
  Rng d(42);
  const auto first = d();
  CHECK(Rng(42)() == first);
  CHECK(Rng(43)() != first);
  double sum = 0;
  for (int i = 0; i < 100000; ++i) sum += d.uniform();
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
  Rng p(1);
  double mean = 0;
  for (int i = 0; i < 20000; ++i) mean += poisson(p, 3.5);
  CHECK(mean / 20000 == doctest::Approx(3.5).epsilon(0.02));
  CHECK(poisson(p, 0.0) == 0);
}
