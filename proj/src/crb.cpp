#include "n00n/crb.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "n00n/errors.hpp"

namespace n00n {

namespace {

struct FringeTerms {
  std::vector<double> w;      // eta (1 + V cos x)
  std::vector<double> dw;     // d w / d phi, phi in radians
  std::vector<double> ratio;  // dw^2 / w, evaluated without cancellation
  double z = 0.0;
  double dz = 0.0;
};

// With x = 2 phi - delta: dw/dphi = -2 eta V sin x and
// dw^2 / w = 4 eta V^2 (1 - cos x)(1 + cos x) / (1 + V cos x),
// which for V = 1 reduces to 4 eta (1 - cos x) and stays finite on a null.
FringeTerms fringe_terms(const SensorModel& model, Phase phi) {
  FringeTerms t;
  for (const auto& p : model.projections()) {
    const double x = 2.0 * phi.deg() - p.offset_deg;
    const double c = cos_deg(x);
    const double s = sin_deg(x);
    const double v = p.visibility;
    t.w.push_back(p.efficiency * (1.0 + v * c));
    t.dw.push_back(-2.0 * p.efficiency * v * s);
    double ratio = 0.0;
    if (v == 1.0) {
      ratio = 4.0 * p.efficiency * (1.0 - c);
    } else if (v > 0.0) {
      ratio = 4.0 * p.efficiency * v * v * (1.0 - c) * (1.0 + c) / (1.0 + v * c);
    }
    t.ratio.push_back(ratio);
  }
  t.z = std::accumulate(t.w.begin(), t.w.end(), 0.0);
  t.dz = std::accumulate(t.dw.begin(), t.dw.end(), 0.0);
  if (!(t.z > 0.0)) {
    throw DegenerateModelError("fringe weights vanish at phase " + format_double(phi.deg()) + " deg");
  }
  return t;
}

}  // namespace

FisherInformation fisher_from_probabilities(std::span<const double> p, std::span<const double> dp) {
  if (p.size() != dp.size()) throw DimensionError("probability and derivative lengths differ");
  FisherInformation f;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] > 0.0) {
      f.per_event += dp[k] * dp[k] / p[k];
    } else if (dp[k] != 0.0) {
      f.infinite = true;
    }
  }
  if (f.infinite) f.per_event = std::numeric_limits<double>::infinity();
  return f;
}

std::vector<double> probability_derivatives(const SensorModel& model, Phase phi) {
  const FringeTerms t = fringe_terms(model, phi);
  std::vector<double> dp(t.w.size());
  for (std::size_t k = 0; k < dp.size(); ++k) dp[k] = (t.dw[k] * t.z - t.w[k] * t.dz) / (t.z * t.z);
  return dp;
}

// For p_k = w_k / Z:  sum_k p_k'^2 / p_k = (sum_k w_k'^2 / w_k - Z'^2 / Z) / Z.
FisherInformation fisher_per_event(const SensorModel& model, Phase phi) {
  const FringeTerms t = fringe_terms(model, phi);
  FisherInformation f;
  for (std::size_t k = 0; k < t.w.size(); ++k) {
    // Only reachable for a zero weight whose derivative does not vanish.
    if (t.w[k] <= 0.0 && t.dw[k] != 0.0 && t.ratio[k] == 0.0) f.infinite = true;
  }
  if (f.infinite) {
    f.per_event = std::numeric_limits<double>::infinity();
    return f;
  }
  const double sum = std::accumulate(t.ratio.begin(), t.ratio.end(), 0.0);
  f.per_event = std::max(0.0, (sum - t.dz * t.dz / t.z) / t.z);
  return f;
}

double fisher_numeric(const SensorModel& model, Phase phi, double step_rad, double p_floor) {
  const auto p = model.probabilities(phi);
  const auto hi = model.probabilities(Phase::radians(phi.rad() + step_rad));
  const auto lo = model.probabilities(Phase::radians(phi.rad() - step_rad));
  double f = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] <= p_floor) continue;
    const double d = (hi[k] - lo[k]) / (2.0 * step_rad);
    f += d * d / p[k];
  }
  return f;
}

double crb_sigma(const SensorModel& model, Phase phi, double events) {
  return crb_point(model, phi, events).sigma_deg;
}

CrbPoint crb_point(const SensorModel& model, Phase phi, double events) {
  if (!(events >= 1.0)) throw InvalidArgument("event count must be at least 1");
  const FisherInformation f = fisher_per_event(model, phi);
  if (!f.infinite && !(f.per_event > 0.0)) {
    throw UnboundedCrbError("Fisher information vanishes at phase " + format_double(phi.deg()) +
                            " deg");
  }
  CrbPoint pt;
  pt.phase_deg = phi.deg();
  pt.fisher = f.per_event;
  pt.events = events;
  pt.sigma_rad = f.infinite ? 0.0 : 1.0 / std::sqrt(events * f.per_event);
  pt.sigma_deg = rad_to_deg(pt.sigma_rad);
  return pt;
}

double fm_ratio(double measured_variance_deg2, const SensorModel& model, Phase phi, double events) {
  const double sigma = crb_sigma(model, phi, events);
  return measured_variance_deg2 / (sigma * sigma);
}

}  // namespace n00n
