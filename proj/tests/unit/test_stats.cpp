#include "doctest.h"

#include "arc/stats.hpp"
#include "testing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

using namespace arc;
using arc::testing::Gen;

TEST_SUITE("stats") {

TEST_CASE("linear quantiles on small sets") {
  const std::vector<double> v{1, 2, 3, 4, 5};
  CHECK(quantile_linear(v, 0.25) == 2.0);
  CHECK(quantile_linear(v, 0.5) == 3.0);
  CHECK(quantile_linear(v, 0.75) == 4.0);
  CHECK(quantile_linear(v, 0.0) == 1.0);
  CHECK(quantile_linear(v, 1.0) == 5.0);

  const std::vector<double> w{0, 0, 0, 100};
  CHECK(quantile_linear(w, 0.75) == doctest::Approx(25.0));
  CHECK(quantile_linear(w, 0.95) == doctest::Approx(85.0));
  CHECK(median(std::vector<double>{4, 1, 3, 2}) == doctest::Approx(2.5));

  CHECK_THROWS_AS(quantile_linear(std::vector<double>{}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(quantile_linear(v, 1.5), std::invalid_argument);
}

TEST_CASE("quantile agrees with a sort-based oracle") {
  Gen gen(11);
  for (int trial = 0; trial < 1000; ++trial) {
    auto v = gen.normals(static_cast<std::size_t>(gen.integer(1, 40)), 10.0);
    const double p = gen.uniform(0.0, 1.0);
    auto sorted = v;
    std::sort(sorted.begin(), sorted.end());
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double expect = sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    REQUIRE(quantile_linear(v, p) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("logsumexp is shift-stable and exact on simple inputs") {
  CHECK(logsumexp(std::vector<double>{0.0, 0.0}) == doctest::Approx(std::log(2.0)));
  CHECK(logsumexp(std::vector<double>{1000.0, 1000.0}) == doctest::Approx(1000.0 + std::log(2.0)));
  CHECK(logsumexp(std::vector<double>{-1e300, 0.0}) == doctest::Approx(0.0));

  Gen gen(12);
  for (int trial = 0; trial < 1000; ++trial) {
    auto v = gen.normals(static_cast<std::size_t>(gen.integer(1, 30)), 5.0);
    const double shift = gen.uniform(-500.0, 500.0);
    auto shifted = v;
    for (double& x : shifted) x += shift;
    REQUIRE(logsumexp(shifted) == doctest::Approx(logsumexp(v) + shift).epsilon(1e-12));
    REQUIRE(logsumexp(v) >= *std::max_element(v.begin(), v.end()));
  }
}

TEST_CASE("mean and population standard deviation") {
  const std::vector<double> v{10, -10, 10};
  CHECK(mean(v) == doctest::Approx(10.0 / 3.0));
  CHECK(population_stddev(v) == doctest::Approx(std::sqrt(800.0 / 9.0)));
  CHECK(population_stddev(std::vector<double>{3, 3, 3}) == 0.0);
}

}  // TEST_SUITE
