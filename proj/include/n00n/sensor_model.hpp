#pragma once

// Parametric surrogate of the two-photon polarization interferometer.
//
// Projection k records coincidences with unnormalized weight
//
//   w_k(phi) = eta_k * (1 + V_k * cos(2*phi - delta_k))
//
// and p_k = w_k / sum_j w_j. The doubled argument is the two-photon fringe;
// four quarter-spaced offsets make the phase unambiguous on [0, 180) degrees.
// Angles are degrees at every interface.

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "n00n/config.hpp"

namespace n00n {

inline constexpr double kDegPerRad = 180.0 / std::numbers::pi;

constexpr double deg_to_rad(double deg) noexcept { return deg / kDegPerRad; }
constexpr double rad_to_deg(double rad) noexcept { return rad * kDegPerRad; }

/// Reduce to [0, 360) and evaluate; exact at multiples of 90 degrees.
double cos_deg(double deg);
double sin_deg(double deg);

/// Interferometer phase. Stored in degrees.
class Phase {
 public:
  constexpr Phase() = default;
  static constexpr Phase degrees(double deg) noexcept { return Phase(deg); }
  static constexpr Phase radians(double rad) noexcept { return Phase(rad_to_deg(rad)); }

  constexpr double deg() const noexcept { return deg_; }
  constexpr double rad() const noexcept { return deg_to_rad(deg_); }

  friend constexpr bool operator==(Phase, Phase) = default;

 private:
  constexpr explicit Phase(double deg) noexcept : deg_(deg) {}
  double deg_ = 0.0;
};

/// The test waveplate at angle chi imprints phi = 4 chi.
constexpr Phase hwp_to_phase(double chi_deg) noexcept { return Phase::degrees(4.0 * chi_deg); }

struct ProjectionSetting {
  double offset_deg = 0.0;
  double visibility = 1.0;
  double efficiency = 1.0;
};

class SensorModel {
 public:
  static constexpr double kDefaultVisibility = 0.93;
  static constexpr double kDefaultRate = 10000.0;

  /// Throws InvalidArgument unless K >= 3, 0 <= V <= 1, eta > 0, and rate > 0.
  SensorModel(std::vector<ProjectionSetting> projections, double rate);

  /// K evenly spaced offsets (0, 360/K, ...) with shared visibility and efficiency.
  static SensorModel symmetric(std::size_t k = 4, double visibility = kDefaultVisibility,
                               double efficiency = 1.0, double rate = kDefaultRate);

  /// Keys: K, offsets_deg, visibility, efficiency, rate. A single value in a
  /// per-projection list is broadcast to all K projections.
  static SensorModel from_config(const KeyValueConfig& cfg);
  void write_config(KeyValueConfig& cfg) const;

  std::size_t channels() const noexcept { return projections_.size(); }
  std::span<const ProjectionSetting> projections() const noexcept { return projections_; }
  /// Mean total events per second of exposure.
  double rate() const noexcept { return rate_; }

  std::vector<double> weights(Phase phi) const;
  /// Normalized projection probabilities. Throws DegenerateModelError when all weights vanish.
  std::vector<double> probabilities(Phase phi) const;

 private:
  std::vector<ProjectionSetting> projections_;
  double rate_;
};

struct CountVector {
  std::vector<std::int64_t> counts;
  double exposure_s = 1.0;

  std::size_t size() const noexcept { return counts.size(); }
  std::int64_t total() const noexcept;

  /// Throws InvalidArgument on negative entries, a non-positive exposure, or (when
  /// expected_k > 0) a length other than expected_k.
  void validate(std::size_t expected_k = 0) const;

  friend bool operator==(const CountVector&, const CountVector&) = default;
};

/// Independent Poisson counts with means rate * exposure * p_k(phi). Deterministic in seed.
CountVector simulate_counts(const SensorModel& model, Phase phi, double exposure_s,
                            std::uint64_t seed);

}  // namespace n00n
