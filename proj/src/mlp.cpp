#include "sigbsde/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "sigbsde/errors.hpp"
#include "sigbsde/simulate.hpp"

namespace sigbsde {

std::vector<int> MlpParams::sizes() const {
  std::vector<int> out;
  if (layers.empty()) return out;
  out.push_back(static_cast<int>(layers.front().weights.cols()));
  for (const auto& l : layers) out.push_back(static_cast<int>(l.weights.rows()));
  return out;
}

bool MlpParams::all_finite() const {
  return std::all_of(layers.begin(), layers.end(), [](const DenseLayer& l) {
    return l.weights.allFinite() && l.bias.allFinite();
  });
}

std::vector<int> air_layer_sizes(int hidden_layers, int hidden_units) {
  if (hidden_layers < 1 || hidden_units < 1) {
    throw PreconditionError("network needs at least one hidden layer and unit");
  }
  std::vector<int> sizes{3};
  sizes.insert(sizes.end(), static_cast<std::size_t>(hidden_layers), hidden_units);
  sizes.push_back(1);
  return sizes;
}

MlpParams make_mlp(const std::vector<int>& sizes, std::uint64_t seed) {
  if (sizes.size() < 2 || std::any_of(sizes.begin(), sizes.end(), [](int s) { return s < 1; })) {
    throw PreconditionError("make_mlp: need at least two positive layer sizes");
  }
  SplitMix64 rng(seed);
  MlpParams params;
  for (std::size_t l = 1; l < sizes.size(); ++l) {
    std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / sizes[l - 1]));
    DenseLayer layer{Eigen::MatrixXd(sizes[l], sizes[l - 1]), Eigen::VectorXd::Zero(sizes[l])};
    for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) {
      for (Eigen::Index j = 0; j < layer.weights.cols(); ++j) layer.weights(i, j) = normal(rng);
    }
    params.layers.push_back(std::move(layer));
  }
  return params;
}

namespace {

void check_input_width(const MlpParams& params, Eigen::Index width) {
  if (params.layers.empty()) throw PreconditionError("network has no layers");
  if (params.layers.front().weights.cols() != width) {
    throw ShapeError("network expects " + std::to_string(params.layers.front().weights.cols()) +
                     " inputs, got " + std::to_string(width));
  }
  if (params.layers.back().weights.rows() != 1) throw ShapeError("network output must be scalar");
}

// Pre-activations of every layer, each units x P.
std::vector<Eigen::MatrixXd> forward_pass(const MlpParams& params, const Eigen::MatrixXd& inputs) {
  check_input_width(params, inputs.cols());
  std::vector<Eigen::MatrixXd> pre;
  pre.reserve(params.layers.size());
  Eigen::MatrixXd act = inputs.transpose();
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& layer = params.layers[l];
    Eigen::MatrixXd z = (layer.weights * act).colwise() + layer.bias;
    if (l + 1 < params.layers.size()) act = z.cwiseMax(0.0);
    pre.push_back(std::move(z));
  }
  return pre;
}

}  // namespace

Eigen::VectorXd forward(const MlpParams& params, const Eigen::MatrixXd& inputs) {
  return forward_pass(params, inputs).back().row(0).transpose();
}

double forward(const MlpParams& params, std::span<const double> input) {
  check_input_width(params, static_cast<Eigen::Index>(input.size()));
  thread_local std::vector<double> cur, next;
  cur.assign(input.begin(), input.end());
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& w = params.layers[l].weights;
    const auto& b = params.layers[l].bias;
    const bool hidden = l + 1 < params.layers.size();
    next.resize(static_cast<std::size_t>(w.rows()));
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      double s = b(i);
      for (Eigen::Index j = 0; j < w.cols(); ++j) s += w(i, j) * cur[j];
      next[i] = hidden ? std::max(s, 0.0) : s;
    }
    cur.swap(next);
  }
  return cur[0];
}

std::vector<DenseLayer> backprop(const MlpParams& params, const Eigen::MatrixXd& inputs,
                                 const Eigen::VectorXd& dloss_doutput) {
  if (dloss_doutput.size() != inputs.rows()) throw ShapeError("backprop: batch size mismatch");
  const auto pre = forward_pass(params, inputs);
  const std::size_t depth = params.layers.size();
  std::vector<DenseLayer> grads(depth);
  Eigen::MatrixXd delta = dloss_doutput.transpose();  // 1 x P
  for (std::size_t l = depth; l-- > 0;) {
    const Eigen::MatrixXd act =
        l == 0 ? Eigen::MatrixXd(inputs.transpose()) : Eigen::MatrixXd(pre[l - 1].cwiseMax(0.0));
    grads[l].weights = delta * act.transpose();
    grads[l].bias = delta.rowwise().sum();
    if (l > 0) {
      delta = (params.layers[l].weights.transpose() * delta).cwiseProduct(
          (pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  return grads;
}

double pre_clamp_loss(const MlpParams& params, const Eigen::MatrixXd& inputs) {
  return forward(params, inputs).cwiseProduct(inputs.col(0)).mean();
}

double clamp_beta(double raw, double lower, double upper) {
  if (!(lower <= upper)) throw PreconditionError("clamp_beta: lower bound exceeds upper bound");
  return std::max(lower, std::min(upper, raw));
}

Eigen::VectorXd clamp_beta(const Eigen::VectorXd& raw, const Eigen::VectorXd& lower,
                           const Eigen::VectorXd& upper) {
  if (raw.size() != lower.size() || raw.size() != upper.size()) {
    throw ShapeError("clamp_beta: size mismatch");
  }
  Eigen::VectorXd out(raw.size());
  for (Eigen::Index p = 0; p < raw.size(); ++p) out(p) = clamp_beta(raw(p), lower(p), upper(p));
  return out;
}

void TrainConfig::validate() const {
  if (epochs < 1) throw PreconditionError("train: epochs must be >= 1");
  if (batch_size < 1) throw PreconditionError("train: batch size must be >= 1");
  if (!(learning_rate > 0.0)) throw PreconditionError("train: learning rate must be positive");
  if (!(rate_min <= rate_max)) throw PreconditionError("train: need rate_min <= rate_max");
}

TrainResult train(MlpParams params, const TrainConfig& cfg) {
  cfg.validate();
  check_input_width(params, 3);
  const std::size_t depth = params.layers.size();
  AdamState adam;
  for (const auto& l : params.layers) {
    adam.first_moment.push_back(
        {Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()), Eigen::VectorXd::Zero(l.bias.size())});
  }
  adam.second_moment = adam.first_moment;

  SplitMix64 rng(derive_seed(cfg.seed, 0xA1));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(cfg.rate_min, cfg.rate_max);

  std::vector<double> history;
  history.reserve(static_cast<std::size_t>(cfg.epochs));
  const int p_count = cfg.batch_size;
  Eigen::MatrixXd batch(p_count, 3);
  Eigen::VectorXd dloss(p_count);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (int p = 0; p < p_count; ++p) {
      const double y = normal(rng);
      double r = uniform(rng);
      double big_r = uniform(rng);
      if (r > big_r) std::swap(r, big_r);
      batch.row(p) << y, r, big_r;
    }
    const Eigen::VectorXd raw = forward(params, batch);
    double loss = 0.0;
    for (int p = 0; p < p_count; ++p) {
      const double r = batch(p, 1);
      const double big_r = batch(p, 2);
      const double y = batch(p, 0);
      loss += clamp_beta(raw(p), r, big_r) * y;
      // Zero subgradient wherever the clamp is active.
      dloss(p) = (raw(p) > r && raw(p) < big_r) ? y / p_count : 0.0;
    }
    loss /= p_count;
    if (!std::isfinite(loss)) {
      throw TrainingError("train: non-finite loss at epoch " + std::to_string(epoch));
    }
    history.push_back(loss);

    const auto grads = backprop(params, batch, dloss);
    ++adam.step;
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(adam.step));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(adam.step));
    auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
      m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
      v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
      param.array() -= cfg.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg.epsilon);
    };
    for (std::size_t l = 0; l < depth; ++l) {
      update(params.layers[l].weights, grads[l].weights, adam.first_moment[l].weights,
             adam.second_moment[l].weights);
      update(params.layers[l].bias, grads[l].bias, adam.first_moment[l].bias,
             adam.second_moment[l].bias);
    }
  }
  if (!params.all_finite()) throw TrainingError("train: parameters diverged");
  return TrainResult{std::move(params), std::move(history), std::move(adam)};
}

DriverSpec network_driver(std::shared_ptr<const MlpParams> params, double rate_lower,
                          double rate_upper) {
  if (!params) throw PreconditionError("network_driver: no parameters");
  if (!(rate_lower <= rate_upper)) throw PreconditionError("network_driver: need r <= R");
  check_input_width(*params, 3);
  return DriverSpec{"ambiguous-network",
                    [params, rate_lower, rate_upper](double, double, double y, double) {
                      const double in[3] = {y, rate_lower, rate_upper};
                      return -clamp_beta(forward(*params, in), rate_lower, rate_upper) * y;
                    },
                    true};
}

void save_checkpoint(std::ostream& os, const MlpParams& params) {
  os.precision(17);
  os << "layers " << params.layers.size() << '\n';
  for (const auto& l : params.layers) {
    os << "dense " << l.weights.rows() << ' ' << l.weights.cols() << '\n';
    for (Eigen::Index i = 0; i < l.weights.rows(); ++i) {
      for (Eigen::Index j = 0; j < l.weights.cols(); ++j) {
        os << (j ? "," : "") << l.weights(i, j);
      }
      os << '\n';
    }
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) os << (i ? "," : "") << l.bias(i);
    os << '\n';
  }
}

namespace {

std::vector<double> parse_row(std::istream& is, Eigen::Index expected) {
  std::string line;
  if (!std::getline(is, line)) throw PreconditionError("checkpoint: truncated file");
  std::vector<double> values;
  std::istringstream row(line);
  std::string cell;
  while (std::getline(row, cell, ',')) {
    try {
      values.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw PreconditionError("checkpoint: bad number '" + cell + "'");
    }
  }
  if (static_cast<Eigen::Index>(values.size()) != expected) {
    throw PreconditionError("checkpoint: expected " + std::to_string(expected) + " values, got " +
                            std::to_string(values.size()));
  }
  return values;
}

}  // namespace

MlpParams load_checkpoint(std::istream& is) {
  std::string tag;
  std::size_t count = 0;
  if (!(is >> tag >> count) || tag != "layers" || count == 0) {
    throw PreconditionError("checkpoint: missing 'layers' header");
  }
  MlpParams params;
  for (std::size_t l = 0; l < count; ++l) {
    Eigen::Index rows = 0, cols = 0;
    if (!(is >> tag >> rows >> cols) || tag != "dense" || rows < 1 || cols < 1) {
      throw PreconditionError("checkpoint: bad layer header");
    }
    is.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
    DenseLayer layer{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
    for (Eigen::Index i = 0; i < rows; ++i) {
      const auto row = parse_row(is, cols);
      for (Eigen::Index j = 0; j < cols; ++j) layer.weights(i, j) = row[j];
    }
    const auto bias = parse_row(is, rows);
    for (Eigen::Index i = 0; i < rows; ++i) layer.bias(i) = bias[i];
    if (!params.layers.empty() && params.layers.back().weights.rows() != cols) {
      throw PreconditionError("checkpoint: layer shapes do not chain");
    }
    params.layers.push_back(std::move(layer));
  }
  return params;
}

void write_loss_csv(std::ostream& os, const std::vector<double>& history) {
  os.precision(17);
  os << "epoch,loss\n";
  for (std::size_t i = 0; i < history.size(); ++i) os << i << ',' << history[i] << '\n';
}

}  // namespace sigbsde
