#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "budget_stream/error.hpp"
#include "budget_stream/feature_stats.hpp"
#include "budget_stream/rng.hpp"
#include "oracles.hpp"

using namespace budget_stream;

namespace {

FeatureStats observe_all(const std::vector<double>& values) {
  FeatureStats s;
  for (double v : values) s.observe(v);
  return s;
}

double relative_error(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace

TEST_CASE("single observation") {
  const FeatureStats s = observe_all({0.5});
  CHECK(s.count == 1);
  CHECK(s.mean == 0.5);
  CHECK(s.m2 == 0.0);
  CHECK(s.min == 0.5);
  CHECK(s.max == 0.5);
  CHECK_FALSE(s.rescaled_variance().has_value());
  CHECK_FALSE(FeatureStats{}.rescaled_variance().has_value());
}

TEST_CASE("two and three observations") {
  const FeatureStats two = observe_all({0.0, 1.0});
  CHECK(two.count == 2);
  CHECK(two.mean == 0.5);
  CHECK(two.m2 == 0.5);

  const FeatureStats three = observe_all({10.0, 20.0, 30.0});
  CHECK(three.mean == 20.0);
  CHECK(three.m2 == doctest::Approx(200.0).epsilon(1e-15));
  CHECK(three.min == 10.0);
  CHECK(three.max == 30.0);
  CHECK(*three.rescaled_variance() == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("constant feature has zero rescaled variance") {
  CHECK(*observe_all({5.0, 5.0, 5.0}).rescaled_variance() == 0.0);
}

TEST_CASE("non-finite values are rejected") {
  FeatureStats s;
  CHECK_THROWS_AS(s.observe(std::numeric_limits<double>::quiet_NaN()), ParameterError);
  CHECK_THROWS_AS(s.observe(std::numeric_limits<double>::infinity()), ParameterError);
  CHECK(s.count == 0);
}

TEST_CASE("streaming result matches the two-pass computation") {
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.below(200);
    const double scale = std::pow(10.0, rng.uniform(-3.0, 3.0));
    const double offset = rng.uniform(-1000.0, 1000.0);
    std::vector<double> values;
    for (std::size_t i = 0; i < n; ++i) values.push_back(offset + scale * rng.normal());
    const FeatureStats s = observe_all(values);
    CHECK(relative_error(*s.rescaled_variance(), *oracle::rescaled_variance(values)) < 1e-9);
    CHECK(s.min <= s.mean);
    CHECK(s.mean <= s.max);
    CHECK(s.m2 >= 0.0);
  }
}

TEST_CASE("affine maps and shuffles leave the statistic unchanged") {
  Rng rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.below(100);
    std::vector<double> values;
    for (std::size_t i = 0; i < n; ++i) values.push_back(rng.uniform());
    const double a = rng.uniform(0.1, 10.0), b = rng.uniform(-100.0, 100.0);
    std::vector<double> mapped;
    for (double v : values) mapped.push_back(a * v + b);
    const double base = *observe_all(values).rescaled_variance();
    CHECK(relative_error(base, *observe_all(mapped).rescaled_variance()) < 1e-12);
    std::vector<double> shuffled = values;
    rng.shuffle(std::span<double>(shuffled));
    CHECK(relative_error(base, *observe_all(shuffled).rescaled_variance()) < 1e-9);
  }
}
