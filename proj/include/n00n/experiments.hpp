#pragma once

// Study drivers: estimator error over simulated acquisitions, training
// parameter sweeps, the F_M table and CRB curves. Every study is a pure
// function of its settings and master seed; sub-seeds are derived per
// (parameter value, training, phase) so results never depend on execution order.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "n00n/calibrator.hpp"
#include "n00n/config.hpp"
#include "n00n/crb.hpp"
#include "n00n/sensor_model.hpp"

namespace n00n {

/// 30 phases at the centres of 6-degree bins: 3, 9, ..., 177.
std::vector<double> default_error_phases();
/// Phases of the repeated acquisitions: 20.8, 45, 90, 140, 168.8 degrees.
std::vector<double> default_fm_phases();
/// Total event counts of the repeated acquisitions: 1000, 5000, 10000, 40000.
std::vector<double> default_fm_events();
/// 5, 10, 20, 30, 20x10, 50.
std::vector<std::vector<std::size_t>> default_neuron_grid();
/// 5, 10, 25, 50, 100.
std::vector<std::size_t> default_bootstrap_grid();

/// Everything a study needs besides its swept parameter.
struct StudySettings {
  SensorModel model = SensorModel::symmetric();
  std::vector<std::size_t> hidden{30};
  TrainConfig train{};
  std::size_t n_b = 50;

  double record_start_deg = 0.0;
  double record_end_deg = 180.0;  // exclusive
  double record_step_deg = 1.0;
  double record_exposure_s = 1.0;

  std::vector<double> error_phases = default_error_phases();
  std::size_t repetitions = 100;
  double events = 10000.0;  // M for error evaluation

  std::size_t n_trainings = 35;
  std::vector<std::vector<std::size_t>> neuron_grid = default_neuron_grid();
  std::vector<std::size_t> bootstrap_grid = default_bootstrap_grid();

  double fm_step_deg = 2.0;
  std::vector<double> fm_events = default_fm_events();
  std::vector<double> fm_phases = default_fm_phases();

  double crb_events = 10000.0;
  double crb_step_deg = 1.0;

  std::uint64_t seed = 1;

  Topology topology() const;

  static StudySettings from_config(const KeyValueConfig& cfg);
  /// Full configuration, including defaults, as key-value pairs.
  KeyValueConfig to_config() const;
};

/// Config keys understood by StudySettings::from_config and the CLI.
const std::vector<std::string>& known_config_keys();

CalibrationRecord simulate_study_record(const StudySettings& s, double step_deg, std::uint64_t seed);

struct ErrorEvaluation {
  std::vector<double> phases_deg;
  std::size_t repetitions = 0;
  double events = 0.0;
  std::vector<double> mean_deg;
  std::vector<double> std_deg;
  std::vector<double> rmse_deg;  // about the true phase
  double epsilon_deg = 0.0;      // mean of std_deg
};

using PhaseEstimatorFn = std::function<double(const CountVector&)>;

/// For each phase (in order) simulate `repetitions` acquisitions with mean
/// total `events` and estimate each. Acquisition j of phase i uses seed
/// derive_seed(derive_seed(seed, i), j).
ErrorEvaluation evaluate_error(const PhaseEstimatorFn& estimator, const SensorModel& model,
                               std::span<const double> phases_deg, std::size_t repetitions,
                               double events, std::uint64_t seed);

/// Uses the clamped point estimate. Throws InvalidArgument for phases outside the domain.
ErrorEvaluation evaluate_error(const TrainedEstimator& estimator, const SensorModel& model,
                               std::span<const double> phases_deg, std::size_t repetitions,
                               double events, std::uint64_t seed);

struct SweepResult {
  std::string parameter;            // "n_n" or "n_b"
  std::vector<std::string> values;  // "30", "20x10", ...
  std::vector<double> eps_deg;      // mean over trainings
  std::vector<double> eps_err_deg;  // std over trainings
  std::size_t n_trainings = 0;
  double crb_reference_deg = 0.0;   // mean CRB sigma over the evaluation phases
};

/// A single simulated record (unless one is given) is shared by every training;
/// trainings differ by calibration seed only.
SweepResult sweep_neurons(const StudySettings& s, const std::optional<CalibrationRecord>& record,
                          const std::vector<std::vector<std::size_t>>& grid);
SweepResult sweep_bootstrap(const StudySettings& s, const std::optional<CalibrationRecord>& record,
                            const std::vector<std::size_t>& grid);

struct FmRow {
  double events = 0.0;
  double fm = 0.0;                     // mean over phases of per-phase F
  std::vector<double> variance_deg2;   // per phase
  std::vector<double> crb_sigma_deg;   // per phase
  std::vector<double> per_phase_fm;
};

struct FmTable {
  double step_deg = 0.0;
  std::vector<double> phases_deg;
  std::vector<FmRow> rows;
  TrainingRecord training;
};

/// Calibrate on a simulated record at `step_deg`, then estimate at each M.
FmTable fm_table(const StudySettings& s, double step_deg);

/// Same measurement with an existing estimator.
FmTable fm_table(const StudySettings& s, const TrainedEstimator& estimator, double step_deg);

std::vector<CrbPoint> crb_curve(const SensorModel& model, double step_deg, double events);

// CSV writers. Each starts with the comment block given.
void write_sweep_csv(std::ostream& out, const SweepResult& r, std::string_view comments);
void write_crb_csv(std::ostream& out, const std::vector<CrbPoint>& pts, std::string_view comments);
void write_fm_csv(std::ostream& out, const FmTable& t, std::string_view comments);
void write_evaluation_csv(std::ostream& out, const ErrorEvaluation& e, std::string_view comments);
void write_estimate_csv(std::ostream& out, const Estimate& e);

}  // namespace n00n
