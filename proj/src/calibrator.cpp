#include "n00n/calibrator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "n00n/config.hpp"
#include "n00n/errors.hpp"
#include "n00n/rng.hpp"

namespace n00n {

namespace {

constexpr const char* kMagic = "n00n-estimator";
constexpr int kVersion = 1;
constexpr std::size_t kMaxRedraws = 1000;

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xCBF29CE484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

// A replica of a non-empty acquisition can come out all-zero when counts are
// tiny; it is redrawn from a fresh sub-stream so every replica has frequencies.
FrequencyVector replica_frequencies(const CountVector& counts, std::uint64_t seed, std::size_t r) {
  for (std::size_t attempt = 0; attempt < kMaxRedraws; ++attempt) {
    const std::size_t stream = r + (attempt << 32);
    CountVector rep = resample_replica(counts, seed, stream);
    if (rep.total() > 0) return to_frequencies(rep);
  }
  throw EmptyDataError("bootstrap replicas keep coming out empty; counts are too low");
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
T read_value(std::istream& in, std::string_view key) {
  std::string tok;
  if (!(in >> tok) || tok != key) {
    throw ParseError("estimator", 0, "expected '" + std::string(key) + "'");
  }
  std::string value;
  if (!(in >> value)) throw ParseError("estimator", 0, "missing value for '" + std::string(key) + "'");
  if constexpr (std::is_same_v<T, double>) {
    return parse_double(value, std::string(key));
  } else if constexpr (std::is_same_v<T, std::string>) {
    return value;
  } else {
    KeyValueConfig tmp;
    tmp.set("v", value);
    return static_cast<T>(tmp.get_u64("v", 0));
  }
}

}  // namespace

std::size_t CalibrationRecord::channels() const {
  return points.empty() ? 0 : points.front().counts.size();
}

void CalibrationRecord::validate() const {
  if (points.empty()) throw InvalidArgument("calibration record is empty");
  const std::size_t k = channels();
  for (std::size_t i = 0; i < points.size(); ++i) {
    points[i].counts.validate(k);
    if (!std::isfinite(points[i].phase.deg())) throw InvalidArgument("non-finite phase");
    if (i > 0 && !(points[i].phase.deg() > points[i - 1].phase.deg())) {
      throw InvalidArgument("calibration phases must be strictly increasing (at " +
                            format_double(points[i].phase.deg()) + " deg)");
    }
  }
}

std::uint64_t CalibrationRecord::hash() const {
  std::uint64_t h = fnv1a("n00n-record");
  for (const auto& p : points) {
    std::string line = format_double(p.phase.deg());
    for (auto c : p.counts.counts) line += "," + std::to_string(c);
    line += "," + format_double(p.counts.exposure_s) + "\n";
    h = fnv1a(line, h);
  }
  return h;
}

CalibrationRecord simulate_record(const SensorModel& model, double start_deg, double end_deg,
                                  double step_deg, double exposure_s, std::uint64_t seed) {
  if (!(step_deg > 0.0)) throw InvalidArgument("phase step must be positive");
  if (!(end_deg > start_deg)) throw InvalidArgument("phase range is empty");
  CalibrationRecord rec;
  rec.step_deg = step_deg;
  for (std::size_t i = 0;; ++i) {
    const double phi = start_deg + static_cast<double>(i) * step_deg;
    if (phi >= end_deg - 1e-9) break;
    rec.points.push_back(
        {Phase::degrees(phi), simulate_counts(model, Phase::degrees(phi), exposure_s, derive_seed(seed, i))});
  }
  return rec;
}

Dataset build_training_set(const CalibrationRecord& record, std::size_t n_b, std::uint64_t seed) {
  if (n_b == 0) throw InvalidArgument("n_b must be at least 1");
  record.validate();
  Dataset data(record.channels());
  data.reserve(record.size() * n_b);
  for (std::size_t i = 0; i < record.size(); ++i) {
    const auto& point = record.points[i];
    if (point.counts.total() == 0) {
      throw EmptyDataError("calibration point at phase " + format_double(point.phase.deg()) +
                           " deg has no counts");
    }
    const std::uint64_t point_seed = derive_seed(seed, i);
    for (std::size_t r = 0; r < n_b; ++r) {
      data.add(replica_frequencies(point.counts, point_seed, r), point.phase.deg());
    }
  }
  return data;
}

TrainedEstimator::TrainedEstimator(Regressor model, double phase_min_deg, double phase_max_deg,
                                   Provenance provenance)
    : model_(std::move(model)),
      phase_min_(phase_min_deg),
      phase_max_(phase_max_deg),
      provenance_(std::move(provenance)) {
  if (!(phase_max_ >= phase_min_)) throw InvalidArgument("phase domain is empty");
}

double TrainedEstimator::raw_phase(const FrequencyVector& freqs) const {
  return model_.predict(freqs);
}

PointEstimate TrainedEstimator::point(const CountVector& counts) const {
  counts.validate(channels());
  const double raw = raw_phase(to_frequencies(counts));
  const double phi = std::clamp(raw, phase_min_, phase_max_);
  return {phi, raw, phi != raw};
}

void TrainedEstimator::write(std::ostream& out) const {
  const auto& p = provenance_;
  out << kMagic << ' ' << kVersion << '\n';
  out << "channels " << channels() << '\n';
  out << "phase_min_deg " << fmt17(phase_min_) << '\n';
  out << "phase_max_deg " << fmt17(phase_max_) << '\n';
  out << "record_hash " << p.record_hash << '\n';
  out << "record_size " << p.record_size << '\n';
  out << "n_b " << p.n_b << '\n';
  out << "seed " << p.seed << '\n';
  out << "train_fraction " << fmt17(p.train.fractions.train) << '\n';
  out << "validation_fraction " << fmt17(p.train.fractions.validation) << '\n';
  out << "test_fraction " << fmt17(p.train.fractions.test) << '\n';
  out << "mu_initial " << fmt17(p.train.mu_initial) << '\n';
  out << "mu_increase " << fmt17(p.train.mu_increase) << '\n';
  out << "mu_decrease " << fmt17(p.train.mu_decrease) << '\n';
  out << "mu_max " << fmt17(p.train.mu_max) << '\n';
  out << "max_epochs " << p.train.max_epochs << '\n';
  out << "patience " << p.train.patience << '\n';
  out << "min_gradient " << fmt17(p.train.min_gradient) << '\n';
  out << "train_seed " << p.train.seed << '\n';
  out << "epochs " << p.epochs << '\n';
  out << "stop " << (p.stop_reason.empty() ? "-" : p.stop_reason) << '\n';
  model_.write(out);
}

TrainedEstimator TrainedEstimator::read(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kMagic) {
    throw ParseError("estimator", 0, "not an estimator file");
  }
  if (version != kVersion) {
    throw ParseError("estimator", 0, "unsupported format version " + std::to_string(version));
  }
  const auto k = read_value<std::size_t>(in, "channels");
  const double lo = read_value<double>(in, "phase_min_deg");
  const double hi = read_value<double>(in, "phase_max_deg");
  Provenance p;
  p.record_hash = read_value<std::uint64_t>(in, "record_hash");
  p.record_size = read_value<std::size_t>(in, "record_size");
  p.n_b = read_value<std::size_t>(in, "n_b");
  p.seed = read_value<std::uint64_t>(in, "seed");
  p.train.fractions.train = read_value<double>(in, "train_fraction");
  p.train.fractions.validation = read_value<double>(in, "validation_fraction");
  p.train.fractions.test = read_value<double>(in, "test_fraction");
  p.train.mu_initial = read_value<double>(in, "mu_initial");
  p.train.mu_increase = read_value<double>(in, "mu_increase");
  p.train.mu_decrease = read_value<double>(in, "mu_decrease");
  p.train.mu_max = read_value<double>(in, "mu_max");
  p.train.max_epochs = read_value<std::size_t>(in, "max_epochs");
  p.train.patience = read_value<std::size_t>(in, "patience");
  p.train.min_gradient = read_value<double>(in, "min_gradient");
  p.train.seed = read_value<std::uint64_t>(in, "train_seed");
  p.epochs = read_value<std::size_t>(in, "epochs");
  p.stop_reason = read_value<std::string>(in, "stop");
  if (p.stop_reason == "-") p.stop_reason.clear();
  Regressor model = Regressor::read(in);
  if (model.input_dim() != k) throw ParseError("estimator", 0, "channel count mismatch");
  return TrainedEstimator(std::move(model), lo, hi, std::move(p));
}

void TrainedEstimator::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write(out);
  if (!out) throw Error("failed writing " + path);
}

TrainedEstimator TrainedEstimator::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return read(in);
}

CalibrationResult calibrate_with_record(const CalibrationRecord& record, const Topology& topology,
                                        const TrainConfig& config, std::size_t n_b,
                                        std::uint64_t seed) {
  record.validate();
  if (topology.input_dim != record.channels()) {
    throw DimensionError("topology input dimension does not match the record's channel count");
  }
  const Dataset data = build_training_set(record, n_b, derive_seed(seed, 0));
  TrainConfig cfg = config;
  cfg.seed = derive_seed(seed, 1);
  TrainResult trained = train(data, topology, cfg);

  Provenance prov;
  prov.record_hash = record.hash();
  prov.record_size = record.size();
  prov.n_b = n_b;
  prov.seed = seed;
  prov.train = cfg;
  prov.epochs = trained.record.epochs();
  prov.stop_reason = std::string(to_string(trained.record.stop));

  const double span = trained.model.target_scaler().hi[0] - trained.model.target_scaler().lo[0];
  const double rmse_deg = std::sqrt(trained.test_mse) * 0.5 * span;
  TrainedEstimator est(std::move(trained.model), record.points.front().phase.deg(),
                       record.points.back().phase.deg(), std::move(prov));
  return {std::move(est), std::move(trained.record), rmse_deg};
}

TrainedEstimator calibrate(const CalibrationRecord& record, const Topology& topology,
                           const TrainConfig& config, std::size_t n_b, std::uint64_t seed) {
  return calibrate_with_record(record, topology, config, n_b, seed).estimator;
}

double sample_std(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

Estimate estimate(const TrainedEstimator& estimator, const CountVector& counts, std::size_t n_b,
                  std::uint64_t seed, bool keep_replicas) {
  if (n_b == 0) throw InvalidArgument("n_b must be at least 1");
  const PointEstimate pt = estimator.point(counts);
  std::vector<double> outputs;
  outputs.reserve(n_b);
  for (std::size_t r = 0; r < n_b; ++r) {
    outputs.push_back(estimator.raw_phase(replica_frequencies(counts, seed, r)));
  }
  Estimate e;
  e.phi_hat_deg = pt.phi_deg;
  e.clamped = pt.clamped;
  e.n_b = n_b;
  e.delta_phi_deg = sample_std(outputs);
  if (keep_replicas) e.replicas = std::move(outputs);
  return e;
}

}  // namespace n00n
