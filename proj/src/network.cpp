#include "n00n/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "n00n/config.hpp"
#include "n00n/errors.hpp"
#include "n00n/kernels.hpp"
#include "n00n/rng.hpp"

namespace n00n {

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::symmetric_sigmoid: return "symmetric_sigmoid";
    case Activation::identity: return "identity";
  }
  return "unknown";
}

Activation parse_activation(std::string_view s) {
  if (s == "symmetric_sigmoid") return Activation::symmetric_sigmoid;
  if (s == "identity") return Activation::identity;
  throw InvalidArgument("unknown activation '" + std::string(s) + "'");
}

double activate(Activation a, double x) {
  return a == Activation::identity ? x : std::tanh(x);
}

double activate_derivative_from_output(Activation a, double y) {
  return a == Activation::identity ? 1.0 : 1.0 - y * y;
}

Topology Topology::parse(std::string_view hidden_spec, std::size_t input_dim) {
  Topology t;
  t.input_dim = input_dim;
  t.hidden.clear();
  for (const auto& part : split_list(hidden_spec, 'x')) {
    const auto n = parse_int(part, "hidden layer size");
    if (n <= 0) throw InvalidArgument("hidden layer sizes must be positive");
    t.hidden.push_back(static_cast<std::size_t>(n));
  }
  t.validate();
  return t;
}

std::string Topology::hidden_string() const {
  std::string out;
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    if (i > 0) out += 'x';
    out += std::to_string(hidden[i]);
  }
  return out;
}

std::size_t Topology::parameter_count() const {
  std::size_t count = 0;
  std::size_t in = input_dim;
  for (auto h : hidden) {
    count += h * in + h;
    in = h;
  }
  return count + in + 1;
}

void Topology::validate() const {
  if (input_dim == 0) throw InvalidArgument("input dimension must be positive");
  if (hidden.empty() && hidden_activation != Activation::identity) {
    throw InvalidArgument("a sigmoid network needs at least one hidden layer");
  }
  for (auto h : hidden) {
    if (h == 0) throw InvalidArgument("hidden layer sizes must be positive");
  }
}

Network::Network(Topology topology) : topology_(std::move(topology)) {
  topology_.validate();
  std::size_t in = topology_.input_dim;
  auto add = [&](std::size_t out) {
    layers_.push_back(Layer{in, out, std::vector<double>(out * in, 0.0), std::vector<double>(out, 0.0)});
    in = out;
  };
  for (auto h : topology_.hidden) add(h);
  add(1);
  parameter_count_ = topology_.parameter_count();
}

Network Network::initialize(const Topology& topology, std::uint64_t seed) {
  Network net(topology);
  Rng rng(derive_seed(seed, 0));
  for (auto& layer : net.layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (auto& w : layer.weights) w = dist(rng);
  }
  return net;
}

std::vector<double> Network::parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count_);
  for (const auto& layer : layers_) {
    out.insert(out.end(), layer.weights.begin(), layer.weights.end());
    out.insert(out.end(), layer.bias.begin(), layer.bias.end());
  }
  return out;
}

void Network::set_parameters(std::span<const double> params) {
  if (params.size() != parameter_count_) {
    throw DimensionError("expected " + std::to_string(parameter_count_) + " parameters, got " +
                         std::to_string(params.size()));
  }
  auto it = params.begin();
  for (auto& layer : layers_) {
    std::copy_n(it, layer.weights.size(), layer.weights.begin());
    it += static_cast<std::ptrdiff_t>(layer.weights.size());
    std::copy_n(it, layer.bias.size(), layer.bias.begin());
    it += static_cast<std::ptrdiff_t>(layer.bias.size());
  }
}

namespace {

// Per-layer activations for one sample; acts[0] is the input.
struct ForwardPass {
  std::vector<std::vector<double>> acts;

  explicit ForwardPass(const Network& net) {
    acts.emplace_back(net.topology().input_dim);
    for (const auto& layer : net.layers()) acts.emplace_back(layer.out);
  }

  double run(const Network& net, std::span<const double> input) {
    const auto& k = kernels::active();
    std::copy(input.begin(), input.end(), acts[0].begin());
    const auto layers = net.layers();
    const Activation act = net.topology().hidden_activation;
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const Layer& layer = layers[l];
      const double* a = acts[l].data();
      auto& z = acts[l + 1];
      const bool hidden = l + 1 < layers.size();
      for (std::size_t j = 0; j < layer.out; ++j) {
        const double pre = k.dot(layer.weights.data() + j * layer.in, a, layer.in) + layer.bias[j];
        z[j] = hidden ? activate(act, pre) : pre;
      }
    }
    return acts.back()[0];
  }
};

void check_dim(const Network& net, std::size_t dim) {
  if (dim != net.topology().input_dim) {
    throw DimensionError("input has dimension " + std::to_string(dim) + ", network expects " +
                         std::to_string(net.topology().input_dim));
  }
}

}  // namespace

double Network::forward(std::span<const double> input) const {
  check_dim(*this, input.size());
  ForwardPass pass(*this);
  return pass.run(*this, input);
}

std::vector<std::vector<double>> Network::hidden_outputs(std::span<const double> input) const {
  check_dim(*this, input.size());
  ForwardPass pass(*this);
  pass.run(*this, input);
  return {pass.acts.begin() + 1, pass.acts.end() - 1};
}

void Dataset::add(std::span<const double> input, double target) {
  if (dim_ == 0 && targets_.empty()) dim_ = input.size();
  if (input.size() != dim_) {
    throw DimensionError("sample has dimension " + std::to_string(input.size()) +
                         ", dataset expects " + std::to_string(dim_));
  }
  inputs_.insert(inputs_.end(), input.begin(), input.end());
  targets_.push_back(target);
}

void Dataset::reserve(std::size_t n) {
  inputs_.reserve(n * dim_);
  targets_.reserve(n);
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out(dim_);
  out.reserve(indices.size());
  for (auto i : indices) out.add(input(i), target(i));
  return out;
}

void SplitFractions::validate() const {
  if (!(train > 0.0 && validation > 0.0 && test > 0.0)) {
    throw InvalidArgument("split fractions must be positive");
  }
  if (std::abs(train + validation + test - 1.0) > 1e-9) {
    throw InvalidArgument("split fractions must sum to 1");
  }
}

DatasetSplit split_dataset(const Dataset& data, const SplitFractions& fractions,
                           std::uint64_t seed) {
  fractions.validate();
  const std::size_t n = data.size();
  // The tolerance keeps products like 0.15 * 9000 from flooring to 1349.
  auto part = [n](double f) {
    return static_cast<std::size_t>(std::floor(f * static_cast<double>(n) + 1e-9));
  };
  const std::size_t n_val = part(fractions.validation);
  const std::size_t n_test = part(fractions.test);
  if (n < 3 || n_val == 0 || n_test == 0 || n_val + n_test >= n) {
    throw DatasetSizeError("dataset of " + std::to_string(n) +
                           " samples is too small for a non-empty validation/test split");
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(derive_seed(seed, 0));
  std::shuffle(perm.begin(), perm.end(), rng);

  DatasetSplit out;
  const auto train_end = perm.begin() + static_cast<std::ptrdiff_t>(n - n_val - n_test);
  const auto val_end = train_end + static_cast<std::ptrdiff_t>(n_val);
  out.train_index.assign(perm.begin(), train_end);
  out.validation_index.assign(train_end, val_end);
  out.test_index.assign(val_end, perm.end());
  out.train = data.subset(out.train_index);
  out.validation = data.subset(out.validation_index);
  out.test = data.subset(out.test_index);
  return out;
}

std::vector<double> residuals(const Network& net, const Dataset& data) {
  if (!data.empty()) check_dim(net, data.input_dim());
  ForwardPass pass(net);
  std::vector<double> r(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) r[i] = data.target(i) - pass.run(net, data.input(i));
  return r;
}

double mean_squared_error(const Network& net, const Dataset& data) {
  if (data.empty()) throw DatasetSizeError("mean squared error of an empty dataset");
  const auto r = residuals(net, data);
  return kernels::sum_squares(r) / static_cast<double>(r.size());
}

Matrix jacobian(const Network& net, const Dataset& data, std::vector<double>& residuals_out) {
  if (!data.empty()) check_dim(net, data.input_dim());
  const auto layers = net.layers();
  const Activation act = net.topology().hidden_activation;
  const std::size_t n_layers = layers.size();

  // Column offset of each layer's first weight.
  std::vector<std::size_t> offset(n_layers);
  for (std::size_t l = 0, off = 0; l < n_layers; ++l) {
    offset[l] = off;
    off += layers[l].weights.size() + layers[l].bias.size();
  }

  Matrix jac(data.size(), net.parameter_count());
  residuals_out.assign(data.size(), 0.0);
  ForwardPass pass(net);
  std::vector<double> delta, delta_prev;

  for (std::size_t i = 0; i < data.size(); ++i) {
    residuals_out[i] = data.target(i) - pass.run(net, data.input(i));
    double* row = jac.data.data() + i * jac.cols;

    // delta holds d output / d pre-activation of the current layer.
    delta.assign(1, 1.0);
    for (std::size_t l = n_layers; l-- > 0;) {
      const Layer& layer = layers[l];
      const auto& a_in = pass.acts[l];
      double* w_col = row + offset[l];
      double* b_col = w_col + layer.weights.size();
      for (std::size_t j = 0; j < layer.out; ++j) {
        const double dj = delta[j];
        for (std::size_t c = 0; c < layer.in; ++c) w_col[j * layer.in + c] = -dj * a_in[c];
        b_col[j] = -dj;
      }
      if (l == 0) break;
      delta_prev.assign(layer.in, 0.0);
      for (std::size_t j = 0; j < layer.out; ++j) {
        const double dj = delta[j];
        for (std::size_t c = 0; c < layer.in; ++c) delta_prev[c] += layer.w(j, c) * dj;
      }
      for (std::size_t c = 0; c < layer.in; ++c) {
        delta_prev[c] *= activate_derivative_from_output(act, a_in[c]);
      }
      std::swap(delta, delta_prev);
    }
  }
  return jac;
}

Matrix jacobian(const Network& net, const Dataset& data) {
  std::vector<double> r;
  return jacobian(net, data, r);
}

}  // namespace n00n
