#include <doctest.h>

#include <cmath>

#include "n00n/bootstrap.hpp"
#include "n00n/errors.hpp"

using namespace n00n;

TEST_CASE("zero counts resample to zero") {
  const CountVector zero{{0, 0, 0, 0}, 1.0};
  for (const auto& r : resample_replicas(zero, 5, 1)) CHECK(r == zero);
}

TEST_CASE("replica count and exposure") {
  const CountVector c{{10, 20, 30, 40}, 2.5};
  const auto reps = resample_replicas(c, 50, 9);
  CHECK(reps.size() == 50);
  for (const auto& r : reps) CHECK(r.exposure_s == 2.5);
  CHECK(reps[17] == resample_replica(c, 9, 17));
  CHECK(reps == resample_replicas(c, 50, 9));
  CHECK_THROWS_AS(resample_replicas(c, 0, 9), InvalidArgument);
}

TEST_CASE("replica mean and spread follow Poisson(count)") {
  const CountVector c{{10000, 2500, 0, 7}, 1.0};
  constexpr int n = 10000;
  const auto reps = resample_replicas(c, n, 77);
  double s = 0.0, s2 = 0.0;
  for (const auto& r : reps) {
    const double x = static_cast<double>(r.counts[0]);
    s += x;
    s2 += x * x;
    CHECK(r.counts[2] == 0);
  }
  const double mean = s / n;
  const double var = (s2 - n * mean * mean) / (n - 1);
  CHECK(std::abs(mean - 10000.0) < 4.0 * std::sqrt(10000.0 / n));
  const double lambda = 10000.0;
  const double se_var = std::sqrt((lambda + 2 * lambda * lambda * n / (n - 1.0)) / n);
  CHECK(std::abs(var - lambda) < 4.0 * se_var);
  CHECK(std::abs(std::sqrt(var) - 100.0) < 4.0 * 100.0 / std::sqrt(2.0 * n));
}

TEST_CASE("frequencies") {
  const auto f = to_frequencies(CountVector{{1, 3, 0, 4}, 1.0});
  CHECK(f == FrequencyVector{0.125, 0.375, 0.0, 0.5});
  // Scaling all counts leaves the frequencies bit-identical.
  CHECK(to_frequencies(CountVector{{3, 9, 0, 12}, 1.0}) == f);
  CHECK(to_frequencies(CountVector{{1000, 3000, 0, 4000}, 7.0}) == f);
  CHECK_THROWS_AS(to_frequencies(CountVector{{0, 0, 0, 0}, 1.0}), EmptyDataError);
}
