#pragma once

// Levenberg–Marquardt training with validation-based early stopping.
//
// One epoch is one full-batch LM iteration: the residual Jacobian of the whole
// training set is formed once, then the damped normal equations
//
//   (J^T J + mu I) delta = -J^T r
//
// are re-solved with growing mu until the step lowers the training MSE (mu
// then shrinks) or mu exceeds mu_max.

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "n00n/network.hpp"

namespace n00n {

struct TrainConfig {
  SplitFractions fractions{};
  double mu_initial = 1e-3;
  double mu_increase = 10.0;
  double mu_decrease = 0.1;
  double mu_max = 1e10;
  std::size_t max_epochs = 1000;
  std::size_t patience = 6;
  double min_gradient = 1e-7;
  std::uint64_t seed = 1;

  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

enum class StopReason { patience, max_epochs, gradient_floor, mu_overflow };

std::string_view to_string(StopReason r);

struct TrainingRecord {
  // Entry 0 is the initialized network, entry e the state after epoch e.
  std::vector<double> train_mse;
  std::vector<double> validation_mse;
  std::vector<double> mu;
  StopReason stop = StopReason::max_epochs;
  std::size_t best_epoch = 0;

  std::size_t epochs() const noexcept { return train_mse.empty() ? 0 : train_mse.size() - 1; }
  double best_validation_mse() const { return validation_mse.at(best_epoch); }
};

/// Damped-system ingredients at fixed weights. `gram` is the full symmetric J^T J.
struct NormalEquations {
  std::size_t parameters = 0;
  std::vector<double> gram;
  std::vector<double> jtr;
  double mse = 0.0;
  std::size_t samples = 0;

  /// Norm of the MSE gradient, (2/N) J^T r.
  double gradient_norm() const;
};

NormalEquations normal_equations(const Network& net, const Dataset& train);

struct LmStepResult {
  Network weights;      // candidate when accepted, the input network otherwise
  bool accepted = false;
  double mu = 0.0;      // damping for the next attempt
  double train_mse = 0.0;
  std::vector<double> delta;  // the solved step, empty when the solve failed
};

/// One damped step from precomputed normal equations. A failed Cholesky
/// factorization counts as a rejection.
LmStepResult lm_step(const Network& net, const NormalEquations& eq, const Dataset& train, double mu,
                     const TrainConfig& config);

LmStepResult lm_step(const Network& net, const Dataset& train, double mu, const TrainConfig& config);

struct NetworkTrainingResult {
  Network network;  // weights of the best validation epoch
  TrainingRecord record;
};

/// Trains on already-normalized splits from Network::initialize(topology, config.seed).
NetworkTrainingResult train_network(const Dataset& train, const Dataset& validation,
                                    const Topology& topology, const TrainConfig& config);

/// Same, starting from the given network.
NetworkTrainingResult train_network(Network initial, const Dataset& train,
                                    const Dataset& validation, const TrainConfig& config);

}  // namespace n00n
