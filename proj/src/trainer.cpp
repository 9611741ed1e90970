#include "n00n/trainer.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>

#include "n00n/errors.hpp"
#include "n00n/kernels.hpp"
#include "n00n/rng.hpp"

namespace n00n {

void TrainConfig::validate() const {
  fractions.validate();
  if (!(mu_initial > 0.0)) throw InvalidArgument("mu_initial must be positive");
  if (!(mu_increase > 1.0)) throw InvalidArgument("mu_increase must exceed 1");
  if (!(mu_decrease > 0.0 && mu_decrease < 1.0)) {
    throw InvalidArgument("mu_decrease must lie in (0, 1)");
  }
  if (!(mu_max > mu_initial)) throw InvalidArgument("mu_max must exceed mu_initial");
  if (max_epochs == 0) throw InvalidArgument("max_epochs must be positive");
  if (patience == 0) throw InvalidArgument("patience must be positive");
  if (!(min_gradient >= 0.0)) throw InvalidArgument("min_gradient must be non-negative");
}

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::patience: return "patience";
    case StopReason::max_epochs: return "max_epochs";
    case StopReason::gradient_floor: return "gradient_floor";
    case StopReason::mu_overflow: return "mu_overflow";
  }
  return "unknown";
}

double NormalEquations::gradient_norm() const {
  if (samples == 0) return 0.0;
  return 2.0 * std::sqrt(kernels::sum_squares(jtr)) / static_cast<double>(samples);
}

NormalEquations normal_equations(const Network& net, const Dataset& train) {
  if (train.empty()) throw DatasetSizeError("training set is empty");
  std::vector<double> r;
  const Matrix jac = jacobian(net, train, r);

  NormalEquations eq;
  eq.parameters = jac.cols;
  eq.samples = jac.rows;
  eq.gram.assign(jac.cols * jac.cols, 0.0);
  eq.jtr.assign(jac.cols, 0.0);
  kernels::active().gram_accumulate(jac.data.data(), jac.rows, jac.cols, r.data(), eq.gram.data(),
                                    eq.jtr.data());
  for (std::size_t a = 0; a < jac.cols; ++a) {
    for (std::size_t b = a + 1; b < jac.cols; ++b) eq.gram[b * jac.cols + a] = eq.gram[a * jac.cols + b];
  }
  eq.mse = kernels::sum_squares(r) / static_cast<double>(r.size());
  return eq;
}

namespace {

bool solve_damped(const NormalEquations& eq, double mu, std::vector<double>& delta) {
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const auto n = static_cast<Eigen::Index>(eq.parameters);
  Eigen::MatrixXd a = Eigen::Map<const RowMajor>(eq.gram.data(), n, n);
  a.diagonal().array() += mu;
  const Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) return false;
  const Eigen::VectorXd step = -llt.solve(Eigen::Map<const Eigen::VectorXd>(eq.jtr.data(), n));
  if (!step.allFinite()) return false;
  delta.assign(step.data(), step.data() + n);
  return true;
}

}  // namespace

LmStepResult lm_step(const Network& net, const NormalEquations& eq, const Dataset& train, double mu,
                     const TrainConfig& config) {
  if (!(mu > 0.0)) throw InvalidArgument("damping must be positive");
  if (eq.parameters != net.parameter_count()) {
    throw DimensionError("normal equations do not match the network");
  }
  LmStepResult out{net, false, mu * config.mu_increase, eq.mse, {}};
  if (!solve_damped(eq, mu, out.delta)) {
    out.delta.clear();
    return out;
  }
  auto params = net.parameters();
  kernels::axpy(1.0, out.delta, params);
  Network candidate = net;
  candidate.set_parameters(params);
  const double candidate_mse = mean_squared_error(candidate, train);
  if (candidate_mse < eq.mse) {
    out.weights = std::move(candidate);
    out.accepted = true;
    out.mu = mu * config.mu_decrease;
    out.train_mse = candidate_mse;
  }
  return out;
}

LmStepResult lm_step(const Network& net, const Dataset& train, double mu, const TrainConfig& config) {
  return lm_step(net, normal_equations(net, train), train, mu, config);
}

NetworkTrainingResult train_network(const Dataset& train, const Dataset& validation,
                                    const Topology& topology, const TrainConfig& config) {
  return train_network(Network::initialize(topology, config.seed), train, validation, config);
}

NetworkTrainingResult train_network(Network initial, const Dataset& train,
                                    const Dataset& validation, const TrainConfig& config) {
  config.validate();
  if (train.empty() || validation.empty()) {
    throw DatasetSizeError("training and validation sets must be non-empty");
  }
  Network net = std::move(initial);
  Network best = net;
  TrainingRecord rec;
  double mu = config.mu_initial;
  double best_val = mean_squared_error(net, validation);
  rec.train_mse.push_back(mean_squared_error(net, train));
  rec.validation_mse.push_back(best_val);
  rec.mu.push_back(mu);

  std::size_t fails = 0;
  rec.stop = StopReason::max_epochs;
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const NormalEquations eq = normal_equations(net, train);
    if (eq.gradient_norm() < config.min_gradient) {
      rec.stop = StopReason::gradient_floor;
      break;
    }
    bool overflow = false;
    double train_mse = eq.mse;
    while (true) {
      LmStepResult step = lm_step(net, eq, train, mu, config);
      mu = step.mu;
      if (step.accepted) {
        net = std::move(step.weights);
        train_mse = step.train_mse;
        break;
      }
      if (mu > config.mu_max) {
        overflow = true;
        break;
      }
    }

    const double val = mean_squared_error(net, validation);
    rec.train_mse.push_back(train_mse);
    rec.validation_mse.push_back(val);
    rec.mu.push_back(mu);
    if (val < best_val) {
      best_val = val;
      best = net;
      rec.best_epoch = epoch;
      fails = 0;
    } else {
      ++fails;
    }
    if (overflow) {
      rec.stop = StopReason::mu_overflow;
      break;
    }
    if (fails >= config.patience) {
      rec.stop = StopReason::patience;
      break;
    }
  }
  return {std::move(best), std::move(rec)};
}

}  // namespace n00n
