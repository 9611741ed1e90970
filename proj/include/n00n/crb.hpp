#pragma once

// Classical Fisher information of the frequency statistics and the
// corresponding Cramér–Rao bound for M detected events.

#include <span>

#include "n00n/sensor_model.hpp"

namespace n00n {

struct FisherInformation {
  double per_event = 0.0;  // rad^-2; +inf when `infinite`
  bool infinite = false;   // some p_k = 0 while dp_k/dphi != 0
};

/// sum_k (dp_k/dphi)^2 / p_k from explicit probabilities and derivatives (phi in
/// radians). Channels with p_k = 0 and dp_k = 0 contribute nothing; p_k = 0 with
/// dp_k != 0 sets the infinite flag.
FisherInformation fisher_from_probabilities(std::span<const double> p, std::span<const double> dp);

/// Analytic Fisher information of the normalized fringe model. A channel sitting
/// exactly on a fringe null contributes its continuous limit, so the result is
/// continuous in phi.
FisherInformation fisher_per_event(const SensorModel& model, Phase phi);

/// Same quantity with dp/dphi from central differences of probabilities(); only
/// channels with p_k > p_floor enter. For cross-checking the analytic form.
double fisher_numeric(const SensorModel& model, Phase phi, double step_rad = 1e-6,
                      double p_floor = 1e-9);

/// Analytic d p_k / d phi (phi in radians).
std::vector<double> probability_derivatives(const SensorModel& model, Phase phi);

struct CrbPoint {
  double phase_deg = 0.0;
  double fisher = 0.0;     // rad^-2
  double sigma_rad = 0.0;
  double sigma_deg = 0.0;
  double events = 0.0;
};

/// (180/pi) / sqrt(M F). Throws UnboundedCrbError when F = 0, InvalidArgument when M < 1.
/// An infinite F gives 0.
double crb_sigma(const SensorModel& model, Phase phi, double events);
CrbPoint crb_point(const SensorModel& model, Phase phi, double events);

/// measured_variance_deg2 / crb_sigma(model, phi, M)^2
double fm_ratio(double measured_variance_deg2, const SensorModel& model, Phase phi, double events);

}  // namespace n00n
