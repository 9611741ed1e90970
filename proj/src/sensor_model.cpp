#include "n00n/sensor_model.hpp"

#include <cmath>
#include <numeric>

#include "n00n/errors.hpp"
#include "n00n/rng.hpp"

namespace n00n {

namespace {

double reduce_deg(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  return r;
}

std::vector<double> broadcast(const std::vector<double>& values, std::size_t k,
                              const std::string& key) {
  if (values.size() == 1) return std::vector<double>(k, values.front());
  if (values.size() != k) {
    throw InvalidArgument(key + ": expected 1 or " + std::to_string(k) + " values, got " +
                          std::to_string(values.size()));
  }
  return values;
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_double(values[i]);
  }
  return out;
}

}  // namespace

double cos_deg(double deg) {
  const double r = reduce_deg(deg);
  if (r == 0.0) return 1.0;
  if (r == 90.0 || r == 270.0) return 0.0;
  if (r == 180.0) return -1.0;
  return std::cos(deg_to_rad(r));
}

double sin_deg(double deg) {
  const double r = reduce_deg(deg);
  if (r == 0.0 || r == 180.0) return 0.0;
  if (r == 90.0) return 1.0;
  if (r == 270.0) return -1.0;
  return std::sin(deg_to_rad(r));
}

SensorModel::SensorModel(std::vector<ProjectionSetting> projections, double rate)
    : projections_(std::move(projections)), rate_(rate) {
  if (projections_.size() < 3) {
    throw InvalidArgument("sensor model needs at least 3 projections, got " +
                          std::to_string(projections_.size()));
  }
  for (std::size_t k = 0; k < projections_.size(); ++k) {
    const auto& p = projections_[k];
    const std::string where = "projection " + std::to_string(k + 1);
    if (!std::isfinite(p.offset_deg)) throw InvalidArgument(where + ": offset must be finite");
    if (!(p.visibility >= 0.0 && p.visibility <= 1.0)) {
      throw InvalidArgument(where + ": visibility must lie in [0, 1]");
    }
    if (!(p.efficiency > 0.0) || !std::isfinite(p.efficiency)) {
      throw InvalidArgument(where + ": efficiency must be positive");
    }
  }
  if (!(rate_ > 0.0) || !std::isfinite(rate_)) throw InvalidArgument("rate must be positive");
}

SensorModel SensorModel::symmetric(std::size_t k, double visibility, double efficiency,
                                   double rate) {
  std::vector<ProjectionSetting> projections;
  for (std::size_t i = 0; i < k; ++i) {
    projections.push_back({360.0 * static_cast<double>(i) / static_cast<double>(k), visibility,
                           efficiency});
  }
  return SensorModel(std::move(projections), rate);
}

SensorModel SensorModel::from_config(const KeyValueConfig& cfg) {
  const auto k_raw = cfg.get_int("K", 4);
  if (k_raw < 3) throw InvalidArgument("K must be at least 3");
  const auto k = static_cast<std::size_t>(k_raw);

  std::vector<double> default_offsets;
  for (std::size_t i = 0; i < k; ++i) {
    default_offsets.push_back(360.0 * static_cast<double>(i) / static_cast<double>(k));
  }
  const auto offsets = broadcast(cfg.get_doubles("offsets_deg", default_offsets), k, "offsets_deg");
  const auto vis = broadcast(cfg.get_doubles("visibility", {kDefaultVisibility}), k, "visibility");
  const auto eff = broadcast(cfg.get_doubles("efficiency", {1.0}), k, "efficiency");

  std::vector<ProjectionSetting> projections;
  for (std::size_t i = 0; i < k; ++i) projections.push_back({offsets[i], vis[i], eff[i]});
  return SensorModel(std::move(projections), cfg.get_double("rate", kDefaultRate));
}

void SensorModel::write_config(KeyValueConfig& cfg) const {
  std::vector<double> offsets, vis, eff;
  for (const auto& p : projections_) {
    offsets.push_back(p.offset_deg);
    vis.push_back(p.visibility);
    eff.push_back(p.efficiency);
  }
  cfg.set("K", std::to_string(channels()));
  cfg.set("offsets_deg", join(offsets));
  cfg.set("visibility", join(vis));
  cfg.set("efficiency", join(eff));
  cfg.set("rate", format_double(rate_));
}

std::vector<double> SensorModel::weights(Phase phi) const {
  std::vector<double> w;
  w.reserve(projections_.size());
  for (const auto& p : projections_) {
    w.push_back(p.efficiency * (1.0 + p.visibility * cos_deg(2.0 * phi.deg() - p.offset_deg)));
  }
  return w;
}

std::vector<double> SensorModel::probabilities(Phase phi) const {
  auto w = weights(phi);
  const double z = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(z > 0.0)) {
    throw DegenerateModelError("fringe weights vanish at phase " + format_double(phi.deg()) +
                               " deg");
  }
  for (auto& x : w) x = std::max(0.0, x / z);
  return w;
}

std::int64_t CountVector::total() const noexcept {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

void CountVector::validate(std::size_t expected_k) const {
  if (expected_k > 0 && counts.size() != expected_k) {
    throw InvalidArgument("count vector has " + std::to_string(counts.size()) +
                          " entries, expected " + std::to_string(expected_k));
  }
  for (auto c : counts) {
    if (c < 0) throw InvalidArgument("negative count " + std::to_string(c));
  }
  if (!(exposure_s > 0.0)) throw InvalidArgument("exposure must be positive");
}

CountVector simulate_counts(const SensorModel& model, Phase phi, double exposure_s,
                            std::uint64_t seed) {
  if (!(exposure_s > 0.0)) throw InvalidArgument("exposure must be positive");
  const auto p = model.probabilities(phi);
  const double events = model.rate() * exposure_s;
  Rng rng(derive_seed(seed, 0));
  CountVector out{{}, exposure_s};
  out.counts.reserve(p.size());
  for (double pk : p) out.counts.push_back(poisson(rng, events * pk));
  return out;
}

}  // namespace n00n
