#include "n00n/regressor.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>

#include "n00n/config.hpp"
#include "n00n/errors.hpp"
#include "n00n/rng.hpp"

namespace n00n {

namespace {

constexpr const char* kMagic = "n00n-network";
constexpr int kVersion = 1;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_values(std::ostream& out, const char* key, std::span<const double> values) {
  out << key;
  for (double v : values) out << ' ' << fmt17(v);
  out << '\n';
}

class TokenReader {
 public:
  explicit TokenReader(std::istream& in) : in_(in) {}

  std::string next() {
    std::string tok;
    if (!(in_ >> tok)) throw ParseError("network", 0, "unexpected end of input");
    return tok;
  }
  void expect(std::string_view keyword) {
    const auto tok = next();
    if (tok != keyword) {
      throw ParseError("network", 0, "expected '" + std::string(keyword) + "', got '" + tok + "'");
    }
  }
  double real() { return parse_double(next(), "network value"); }
  std::size_t count() {
    const auto v = parse_int(next(), "network size");
    if (v < 0) throw ParseError("network", 0, "negative size");
    return static_cast<std::size_t>(v);
  }
  std::vector<double> reals(std::size_t n) {
    std::vector<double> out(n);
    for (auto& v : out) v = real();
    return out;
  }

 private:
  std::istream& in_;
};

}  // namespace

AffineScaler AffineScaler::fit_inputs(const Dataset& data) {
  if (data.empty()) throw DatasetSizeError("cannot fit a scaler on an empty dataset");
  AffineScaler s;
  s.lo.assign(data.input_dim(), std::numeric_limits<double>::infinity());
  s.hi.assign(data.input_dim(), -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto x = data.input(i);
    for (std::size_t c = 0; c < x.size(); ++c) {
      s.lo[c] = std::min(s.lo[c], x[c]);
      s.hi[c] = std::max(s.hi[c], x[c]);
    }
  }
  return s;
}

AffineScaler AffineScaler::fit_targets(const Dataset& data) {
  if (data.empty()) throw DatasetSizeError("cannot fit a scaler on an empty dataset");
  const auto [lo, hi] = std::minmax_element(data.targets().begin(), data.targets().end());
  return AffineScaler{{*lo}, {*hi}};
}

double AffineScaler::forward(std::size_t c, double x) const {
  const double span = hi[c] - lo[c];
  if (!(span > 0.0)) return 0.0;
  return 2.0 * (x - lo[c]) / span - 1.0;
}

double AffineScaler::inverse(std::size_t c, double y) const {
  const double span = hi[c] - lo[c];
  if (!(span > 0.0)) return lo[c];
  return lo[c] + (y + 1.0) * 0.5 * span;
}

Regressor::Regressor(Network net, AffineScaler inputs, AffineScaler target)
    : net_(std::move(net)), inputs_(std::move(inputs)), target_(std::move(target)) {
  if (inputs_.lo.size() != net_.topology().input_dim || inputs_.hi.size() != inputs_.lo.size()) {
    throw DimensionError("input scaler does not match the network input dimension");
  }
  if (target_.lo.size() != 1 || target_.hi.size() != 1) {
    throw DimensionError("target scaler must be one-dimensional");
  }
}

double Regressor::predict(std::span<const double> raw_input) const {
  if (raw_input.size() != input_dim()) {
    throw DimensionError("input has dimension " + std::to_string(raw_input.size()) +
                         ", regressor expects " + std::to_string(input_dim()));
  }
  std::vector<double> x(raw_input.size());
  for (std::size_t c = 0; c < x.size(); ++c) x[c] = inputs_.forward(c, raw_input[c]);
  return target_.inverse(0, net_.forward(x));
}

Dataset Regressor::normalize(const Dataset& raw) const {
  Dataset out(raw.input_dim());
  out.reserve(raw.size());
  std::vector<double> x(raw.input_dim());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto in = raw.input(i);
    for (std::size_t c = 0; c < x.size(); ++c) x[c] = inputs_.forward(c, in[c]);
    out.add(x, target_.forward(0, raw.target(i)));
  }
  return out;
}

void Regressor::write(std::ostream& out) const {
  const auto& topo = net_.topology();
  out << kMagic << ' ' << kVersion << '\n';
  out << "activation " << to_string(topo.hidden_activation) << '\n';
  out << "input_dim " << topo.input_dim << '\n';
  out << "hidden " << topo.hidden.size();
  for (auto h : topo.hidden) out << ' ' << h;
  out << '\n';
  write_values(out, "input_lo", inputs_.lo);
  write_values(out, "input_hi", inputs_.hi);
  write_values(out, "target_lo", target_.lo);
  write_values(out, "target_hi", target_.hi);
  for (const auto& layer : net_.layers()) {
    out << "layer " << layer.out << ' ' << layer.in << '\n';
    for (std::size_t j = 0; j < layer.out; ++j) {
      write_values(out, "w", std::span<const double>(layer.weights).subspan(j * layer.in, layer.in));
    }
    write_values(out, "b", layer.bias);
  }
  out << "end\n";
}

Regressor Regressor::read(std::istream& in) {
  TokenReader tok(in);
  tok.expect(kMagic);
  if (const auto version = tok.count(); version != kVersion) {
    throw ParseError("network", 0, "unsupported format version " + std::to_string(version));
  }
  Topology topo;
  tok.expect("activation");
  topo.hidden_activation = parse_activation(tok.next());
  tok.expect("input_dim");
  topo.input_dim = tok.count();
  tok.expect("hidden");
  topo.hidden.resize(tok.count());
  for (auto& h : topo.hidden) h = tok.count();

  AffineScaler inputs, target;
  tok.expect("input_lo");
  inputs.lo = tok.reals(topo.input_dim);
  tok.expect("input_hi");
  inputs.hi = tok.reals(topo.input_dim);
  tok.expect("target_lo");
  target.lo = tok.reals(1);
  tok.expect("target_hi");
  target.hi = tok.reals(1);

  Network net(topo);
  for (auto& layer : net.layers()) {
    tok.expect("layer");
    const auto out_n = tok.count();
    const auto in_n = tok.count();
    if (out_n != layer.out || in_n != layer.in) {
      throw ParseError("network", 0, "layer shape does not match the topology");
    }
    for (std::size_t j = 0; j < layer.out; ++j) {
      tok.expect("w");
      const auto row = tok.reals(layer.in);
      std::copy(row.begin(), row.end(), layer.weights.begin() + static_cast<std::ptrdiff_t>(j * layer.in));
    }
    tok.expect("b");
    layer.bias = tok.reals(layer.out);
  }
  tok.expect("end");
  return Regressor(std::move(net), std::move(inputs), std::move(target));
}

TrainResult train(const Dataset& data, const Topology& topology, const TrainConfig& config) {
  config.validate();
  if (data.input_dim() != topology.input_dim) {
    throw DimensionError("dataset dimension does not match the topology");
  }
  DatasetSplit split = split_dataset(data, config.fractions, derive_seed(config.seed, 1));
  AffineScaler in_scale = AffineScaler::fit_inputs(split.train);
  AffineScaler out_scale = AffineScaler::fit_targets(split.train);
  const Regressor shell(Network(topology), in_scale, out_scale);

  TrainConfig net_config = config;
  net_config.seed = derive_seed(config.seed, 2);
  auto trained = train_network(shell.normalize(split.train), shell.normalize(split.validation),
                               topology, net_config);

  Regressor model(std::move(trained.network), std::move(in_scale), std::move(out_scale));
  const double test_mse = mean_squared_error(model.network(), model.normalize(split.test));
  return {std::move(model), std::move(trained.record), std::move(split), test_mse};
}

}  // namespace n00n
