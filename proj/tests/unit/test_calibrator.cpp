#include <doctest.h>

#include <cmath>
#include <sstream>

#include "n00n/calibrator.hpp"
#include "n00n/errors.hpp"

using namespace n00n;

namespace {

CalibrationRecord small_record(std::uint64_t seed = 4) {
  return simulate_record(SensorModel::symmetric(), 0.0, 180.0, 10.0, 0.2, seed);
}

TrainConfig quick_config() {
  TrainConfig cfg;
  cfg.max_epochs = 30;
  return cfg;
}

}  // namespace

TEST_CASE("simulated record layout") {
  const auto rec = small_record();
  CHECK(rec.size() == 18);
  CHECK(rec.points.front().phase.deg() == 0.0);
  CHECK(rec.points.back().phase.deg() == 170.0);
  CHECK(rec.channels() == 4);
  CHECK(rec == small_record());
  CHECK(simulate_record(SensorModel::symmetric(), 0.0, 180.0, 1.0, 1.0, 1).size() == 180);
  CHECK_THROWS_AS(simulate_record(SensorModel::symmetric(), 0.0, 180.0, 0.0, 1.0, 1), InvalidArgument);
}

TEST_CASE("record hash identifies the record") {
  auto rec = small_record();
  const auto h = rec.hash();
  CHECK(h == small_record().hash());
  rec.points[3].counts.counts[1] += 1;
  CHECK(rec.hash() != h);
}

TEST_CASE("record validation") {
  auto rec = small_record();
  std::swap(rec.points[1], rec.points[2]);
  CHECK_THROWS_AS(rec.validate(), InvalidArgument);
  CHECK_THROWS_AS(CalibrationRecord{}.validate(), InvalidArgument);
}

TEST_CASE("training set: size, simplex inputs, phase labels") {
  const auto rec = small_record();
  const auto data = build_training_set(rec, 7, 3);
  CHECK(data.size() == rec.size() * 7);
  CHECK(data.input_dim() == 4);
  for (std::size_t i = 0; i < data.size(); ++i) {
    double s = 0.0;
    for (double f : data.input(i)) {
      CHECK(f >= 0.0);
      s += f;
    }
    CHECK(std::abs(s - 1.0) < 1e-12);
    CHECK(data.target(i) == rec.points[i / 7].phase.deg());
  }
  CHECK(data == build_training_set(rec, 7, 3));
  CHECK_THROWS_AS(build_training_set(rec, 0, 3), InvalidArgument);
}

TEST_CASE("a point without counts is named in the error") {
  auto rec = small_record();
  rec.points[4].counts.counts = {0, 0, 0, 0};
  try {
    build_training_set(rec, 5, 1);
    FAIL("expected EmptyDataError");
  } catch (const EmptyDataError& e) {
    CHECK(std::string(e.what()).find("40") != std::string::npos);
  }
}

TEST_CASE("calibration is reproducible and records provenance") {
  const auto rec = small_record();
  const auto topo = Topology::parse("5", 4);
  const auto a = calibrate_with_record(rec, topo, quick_config(), 10, 21);
  const auto b = calibrate(rec, topo, quick_config(), 10, 21);
  CHECK(a.estimator == b);
  CHECK(a.estimator.provenance().record_hash == rec.hash());
  CHECK(a.estimator.provenance().record_size == 18);
  CHECK(a.estimator.provenance().n_b == 10);
  CHECK(a.estimator.provenance().seed == 21);
  CHECK(a.estimator.phase_min_deg() == 0.0);
  CHECK(a.estimator.phase_max_deg() == 170.0);
  CHECK(a.test_rmse_deg > 0.0);
  CHECK_FALSE(calibrate(rec, topo, quick_config(), 10, 22) == b);
  CHECK_THROWS_AS(calibrate(rec, Topology::parse("5", 3), quick_config(), 10, 1), DimensionError);
}

TEST_CASE("estimator file round-trip") {
  const auto est = calibrate(small_record(), Topology::parse("4", 4), quick_config(), 10, 2);
  std::stringstream ss;
  est.write(ss);
  const auto back = TrainedEstimator::read(ss);
  CHECK(back == est);
  std::istringstream bad("something else\n");
  CHECK_THROWS_AS(TrainedEstimator::read(bad), ParseError);
}

TEST_CASE("point estimate: scale invariance and clamping") {
  const auto est = calibrate(small_record(), Topology::parse("5", 4), quick_config(), 10, 2);
  const CountVector c{{3000, 4500, 1200, 1300}, 1.0};
  const CountVector c3{{9000, 13500, 3600, 3900}, 3.0};
  const auto a = est.point(c);
  const auto b = est.point(c3);
  CHECK(a.phi_deg == b.phi_deg);
  CHECK(a.raw_deg == b.raw_deg);
  CHECK(a.phi_deg >= est.phase_min_deg());
  CHECK(a.phi_deg <= est.phase_max_deg());
  CHECK(a.clamped == (a.raw_deg != a.phi_deg));
  CHECK_THROWS_AS(est.point(CountVector{{0, 0, 0, 0}, 1.0}), EmptyDataError);
  CHECK_THROWS_AS(est.point(CountVector{{1, 2, 3}, 1.0}), InvalidArgument);
}

TEST_CASE("bootstrap uncertainty") {
  const auto est = calibrate(small_record(), Topology::parse("5", 4), quick_config(), 10, 2);
  const CountVector c{{3000, 4500, 1200, 1300}, 1.0};
  const auto e = estimate(est, c, 50, 8, true);
  CHECK(e.n_b == 50);
  CHECK(e.replicas.size() == 50);
  CHECK(e.delta_phi_deg == sample_std(e.replicas));
  CHECK(e.delta_phi_deg > 0.0);
  CHECK(e.phi_hat_deg == est.point(c).phi_deg);
  const auto again = estimate(est, c, 50, 8);
  CHECK(again.delta_phi_deg == e.delta_phi_deg);
  CHECK(again.replicas.empty());
  CHECK(estimate(est, c, 1, 8).delta_phi_deg == 0.0);
}

TEST_CASE("sample standard deviation") {
  const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
  CHECK(sample_std(v) == doctest::Approx(std::sqrt(32.0 / 7.0)));
  CHECK(sample_std(std::vector<double>{1.0}) == 0.0);
}
