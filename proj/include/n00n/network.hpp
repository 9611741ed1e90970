#pragma once

// Dense feed-forward regression network: hidden layers with a symmetric
// sigmoid, one linear output.
//
// Parameters are flattened layer by layer, each layer contributing its weight
// matrix (out x in, row-major) followed by its bias vector. Jacobian columns
// and the serialized format use the same order.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace n00n {

enum class Activation {
  symmetric_sigmoid,  // 2 / (1 + exp(-2x)) - 1, i.e. tanh
  identity,           // test hook: makes the network linear in its inputs
};

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view s);

double activate(Activation a, double x);
/// Derivative expressed through the activation output y = activate(a, x).
double activate_derivative_from_output(Activation a, double y);

struct Topology {
  std::size_t input_dim = 4;
  std::vector<std::size_t> hidden{30};
  Activation hidden_activation = Activation::symmetric_sigmoid;

  /// "30" or "20x10".
  static Topology parse(std::string_view hidden_spec, std::size_t input_dim);
  std::string hidden_string() const;

  std::size_t parameter_count() const;
  /// Sizes must be positive. An empty hidden list is only accepted for the
  /// identity activation (the single-affine-map test hook).
  void validate() const;

  friend bool operator==(const Topology&, const Topology&) = default;
};

struct Layer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;  // out x in, row-major
  std::vector<double> bias;     // out

  double& w(std::size_t row, std::size_t col) { return weights[row * in + col]; }
  double w(std::size_t row, std::size_t col) const { return weights[row * in + col]; }

  friend bool operator==(const Layer&, const Layer&) = default;
};

class Network {
 public:
  /// All weights and biases zero.
  explicit Network(Topology topology);

  /// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero.
  static Network initialize(const Topology& topology, std::uint64_t seed);

  const Topology& topology() const noexcept { return topology_; }
  std::span<Layer> layers() noexcept { return layers_; }
  std::span<const Layer> layers() const noexcept { return layers_; }
  std::size_t parameter_count() const noexcept { return parameter_count_; }

  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> params);

  /// Throws DimensionError when input.size() != input_dim.
  double forward(std::span<const double> input) const;

  /// Outputs of every hidden layer for one input.
  std::vector<std::vector<double>> hidden_outputs(std::span<const double> input) const;

  friend bool operator==(const Network&, const Network&) = default;

 private:
  Topology topology_;
  std::vector<Layer> layers_;
  std::size_t parameter_count_ = 0;
};

/// Regression samples stored row-major.
class Dataset {
 public:
  explicit Dataset(std::size_t input_dim = 0) : dim_(input_dim) {}

  void add(std::span<const double> input, double target);
  void reserve(std::size_t n);

  std::size_t size() const noexcept { return targets_.size(); }
  bool empty() const noexcept { return targets_.empty(); }
  std::size_t input_dim() const noexcept { return dim_; }

  std::span<const double> input(std::size_t i) const { return {inputs_.data() + i * dim_, dim_}; }
  std::span<double> input(std::size_t i) { return {inputs_.data() + i * dim_, dim_}; }
  double target(std::size_t i) const { return targets_[i]; }
  double& target(std::size_t i) { return targets_[i]; }
  std::span<const double> targets() const noexcept { return targets_; }

  Dataset subset(std::span<const std::size_t> indices) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t dim_;
  std::vector<double> inputs_;
  std::vector<double> targets_;
};

struct SplitFractions {
  double train = 0.70;
  double validation = 0.15;
  double test = 0.15;

  void validate() const;

  friend bool operator==(const SplitFractions&, const SplitFractions&) = default;
};

struct DatasetSplit {
  Dataset train;
  Dataset validation;
  Dataset test;
  // Original sample indices of each part.
  std::vector<std::size_t> train_index, validation_index, test_index;
};

/// Seeded uniform permutation; validation and test get floor(fraction * N)
/// samples, training the remainder. Throws DatasetSizeError when validation or
/// test would be empty.
DatasetSplit split_dataset(const Dataset& data, const SplitFractions& fractions,
                           std::uint64_t seed);

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
};

/// residual_i = target_i - forward(input_i)
std::vector<double> residuals(const Network& net, const Dataset& data);
double mean_squared_error(const Network& net, const Dataset& data);

/// d residual_i / d parameter_j by backpropagation; rows = samples, cols = parameters.
Matrix jacobian(const Network& net, const Dataset& data);

/// Jacobian and residuals in one pass.
Matrix jacobian(const Network& net, const Dataset& data, std::vector<double>& residuals_out);

}  // namespace n00n
