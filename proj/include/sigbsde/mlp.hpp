#pragma once

// A small feedforward network phi(y, r, R) trained to return the rate in
// [r, R] that maximizes -beta * y, and the BSDE driver built from it.

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "sigbsde/bsde.hpp"

namespace sigbsde {

struct DenseLayer {
  Eigen::MatrixXd weights;  // outputs x inputs
  Eigen::VectorXd bias;
};

/// Affine layers with rectifiers between them and an identity output.
struct MlpParams {
  std::vector<DenseLayer> layers;

  std::vector<int> sizes() const;
  bool all_finite() const;
};

/// Three hidden layers of eleven units on inputs (y, r, R).
std::vector<int> air_layer_sizes(int hidden_layers = 3, int hidden_units = 11);

/// He-normal weights and zero biases.
MlpParams make_mlp(const std::vector<int>& sizes, std::uint64_t seed);

/// inputs is P x input_size; returns the P outputs of a scalar-output network.
Eigen::VectorXd forward(const MlpParams& params, const Eigen::MatrixXd& inputs);
double forward(const MlpParams& params, std::span<const double> input);

/// Gradient of sum_p dloss(p) * phi(inputs_p) with respect to every parameter.
std::vector<DenseLayer> backprop(const MlpParams& params, const Eigen::MatrixXd& inputs,
                                 const Eigen::VectorXd& dloss_doutput);

/// mean_p phi(inputs_p) * y_p, the AIR loss before clamping. y is inputs.col(0).
double pre_clamp_loss(const MlpParams& params, const Eigen::MatrixXd& inputs);

/// max(r, min(R, raw)) elementwise.
Eigen::VectorXd clamp_beta(const Eigen::VectorXd& raw, const Eigen::VectorXd& lower,
                           const Eigen::VectorXd& upper);
double clamp_beta(double raw, double lower, double upper);

struct TrainConfig {
  int epochs = 2000;
  int batch_size = 256;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double rate_min = 0.0;  // r and R are drawn uniformly from [rate_min, rate_max]
  double rate_max = 1.0;
  std::uint64_t seed = 7;

  void validate() const;
};

struct AdamState {
  std::vector<DenseLayer> first_moment;
  std::vector<DenseLayer> second_moment;
  long step = 0;
};

struct TrainResult {
  MlpParams params;
  std::vector<double> loss_history;  // one batch loss per epoch
  AdamState optimizer;
};

/// Each epoch draws a batch (y ~ N(0,1); r <= R uniform), minimizes the batch
/// mean of clamp_beta(phi(y, r, R)) * y by one Adam step. The clamp passes
/// gradient only where it is inactive.
TrainResult train(MlpParams params, const TrainConfig& cfg);

/// f(t, x, y, z) = -clamp_beta(phi(y, r, R)) * y.
DriverSpec network_driver(std::shared_ptr<const MlpParams> params, double rate_lower,
                          double rate_upper);

void save_checkpoint(std::ostream& os, const MlpParams& params);
MlpParams load_checkpoint(std::istream& is);

/// CSV with header `epoch,loss`.
void write_loss_csv(std::ostream& os, const std::vector<double>& history);

}  // namespace sigbsde
