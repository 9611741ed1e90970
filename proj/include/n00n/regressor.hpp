#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "n00n/network.hpp"
#include "n00n/trainer.hpp"

namespace n00n {

/// Per-coordinate affine map of [lo, hi] onto [-1, 1]. A constant coordinate maps to 0.
struct AffineScaler {
  std::vector<double> lo;
  std::vector<double> hi;

  static AffineScaler fit_inputs(const Dataset& data);
  static AffineScaler fit_targets(const Dataset& data);

  double forward(std::size_t coord, double x) const;
  double inverse(std::size_t coord, double y) const;

  friend bool operator==(const AffineScaler&, const AffineScaler&) = default;
};

/// A network together with the input and target normalization it was trained under.
class Regressor {
 public:
  Regressor(Network net, AffineScaler inputs, AffineScaler target);

  const Network& network() const noexcept { return net_; }
  const AffineScaler& input_scaler() const noexcept { return inputs_; }
  const AffineScaler& target_scaler() const noexcept { return target_; }
  std::size_t input_dim() const noexcept { return net_.topology().input_dim; }

  /// Raw input in, raw target out.
  double predict(std::span<const double> raw_input) const;

  Dataset normalize(const Dataset& raw) const;

  /// Versioned plain-text format; every real is written with 17 significant digits.
  void write(std::ostream& out) const;
  static Regressor read(std::istream& in);

  friend bool operator==(const Regressor&, const Regressor&) = default;

 private:
  Network net_;
  AffineScaler inputs_;
  AffineScaler target_;
};

struct TrainResult {
  Regressor model;
  TrainingRecord record;
  DatasetSplit split;
  double test_mse = 0.0;  // normalized units
};

/// Split, fit normalization on the training part, train with early stopping.
TrainResult train(const Dataset& data, const Topology& topology, const TrainConfig& config);

}  // namespace n00n
