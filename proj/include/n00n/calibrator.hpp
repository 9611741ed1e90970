#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "n00n/bootstrap.hpp"
#include "n00n/regressor.hpp"
#include "n00n/sensor_model.hpp"

namespace n00n {

struct CalibrationPoint {
  Phase phase;
  CountVector counts;

  friend bool operator==(const CalibrationPoint&, const CalibrationPoint&) = default;
};

/// Labeled acquisitions at known phases, in strictly increasing phase order.
struct CalibrationRecord {
  std::vector<CalibrationPoint> points;
  double step_deg = 1.0;

  std::size_t size() const noexcept { return points.size(); }
  std::size_t channels() const;
  /// Throws InvalidArgument on an empty record, unsorted phases, mixed K or negative counts.
  void validate() const;
  /// FNV-1a 64 over a canonical text rendering of the phases, counts and exposures.
  std::uint64_t hash() const;

  friend bool operator==(const CalibrationRecord&, const CalibrationRecord&) = default;
};

/// Phases start, start + step, ... strictly below end; point i uses seed stream i.
CalibrationRecord simulate_record(const SensorModel& model, double start_deg, double end_deg,
                                  double step_deg, double exposure_s, std::uint64_t seed);

/// n_b Poisson replicas per record point turned into (frequencies, phase) samples.
/// Point i is resampled with derive_seed(seed, i). Throws EmptyDataError naming
/// the phase when a record point has no counts.
Dataset build_training_set(const CalibrationRecord& record, std::size_t n_b, std::uint64_t seed);

struct Provenance {
  std::uint64_t record_hash = 0;
  std::size_t record_size = 0;
  std::size_t n_b = 0;
  std::uint64_t seed = 0;
  TrainConfig train{};
  std::size_t epochs = 0;
  std::string stop_reason;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct PointEstimate {
  double phi_deg = 0.0;  // clamped to the phase domain
  double raw_deg = 0.0;  // network output before clamping
  bool clamped = false;
};

struct Estimate {
  double phi_hat_deg = 0.0;
  double delta_phi_deg = 0.0;  // sample standard deviation over replica outputs
  std::size_t n_b = 0;         // replicas that entered delta_phi
  bool clamped = false;
  std::vector<double> replicas;  // filled on request
};

class TrainedEstimator {
 public:
  TrainedEstimator(Regressor model, double phase_min_deg, double phase_max_deg,
                   Provenance provenance);

  const Regressor& model() const noexcept { return model_; }
  double phase_min_deg() const noexcept { return phase_min_; }
  double phase_max_deg() const noexcept { return phase_max_; }
  std::size_t channels() const noexcept { return model_.input_dim(); }
  const Provenance& provenance() const noexcept { return provenance_; }

  /// Network phase for a frequency vector, in degrees, unclamped.
  double raw_phase(const FrequencyVector& freqs) const;
  PointEstimate point(const CountVector& counts) const;

  void write(std::ostream& out) const;
  static TrainedEstimator read(std::istream& in);
  void save(const std::string& path) const;
  static TrainedEstimator load(const std::string& path);

  friend bool operator==(const TrainedEstimator&, const TrainedEstimator&) = default;

 private:
  Regressor model_;
  double phase_min_;
  double phase_max_;
  Provenance provenance_;
};

struct CalibrationResult {
  TrainedEstimator estimator;
  TrainingRecord record;
  double test_rmse_deg = 0.0;
};

/// build_training_set -> split -> train. The bootstrap uses derive_seed(seed, 0)
/// and training runs with config.seed replaced by derive_seed(seed, 1).
CalibrationResult calibrate_with_record(const CalibrationRecord& record, const Topology& topology,
                                        const TrainConfig& config, std::size_t n_b,
                                        std::uint64_t seed);

TrainedEstimator calibrate(const CalibrationRecord& record, const Topology& topology,
                           const TrainConfig& config, std::size_t n_b, std::uint64_t seed);

/// Point estimate from the measured frequencies; uncertainty from n_b Poisson replicas.
Estimate estimate(const TrainedEstimator& estimator, const CountVector& counts, std::size_t n_b,
                  std::uint64_t seed, bool keep_replicas = false);

/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_std(std::span<const double> values);

}  // namespace n00n
