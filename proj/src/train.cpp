#include "homconv/train.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace homconv {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError(fmt::format("learning_rate must be > 0, got {}", learning_rate));
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (patience > max_epochs) {
    throw ConfigError(fmt::format("patience {} exceeds max_epochs {}", patience, max_epochs));
  }
}

Adam::Adam(std::size_t size, double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), epsilon_(epsilon), m_(size, 0.0), v_(size, 0.0) {}

void Adam::step(std::span<double> parameters, std::span<const double> gradients) {
  if (parameters.size() != m_.size() || gradients.size() != m_.size()) {
    throw ConfigError("Adam: parameter/gradient size mismatch");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < m_.size(); ++i) {
    const double g = gradients[i];
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g * g;
    parameters[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + epsilon_);
  }
}

TrainResult train(HcnnModel model, const Matrix& train_x, std::span<const int> train_y, const Matrix& val_x,
                  std::span<const int> val_y, const TrainConfig& config) {
  config.validate();
  if (train_x.rows() == 0 || val_x.rows() == 0) throw DataError("training and validation sets must be nonempty");
  if (train_y.size() != train_x.rows() || val_y.size() != val_x.rows()) {
    throw DataError("label count does not match row count");
  }

  Rng shuffle_rng(config.seed);
  Rng dropout_rng(mix_seed(config.seed, 1));
  Adam adam(model.parameters.size(), config.learning_rate);

  std::vector<std::size_t> order(train_x.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<int> batch_y;

  TrainResult result;
  result.model = model;
  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    try {
      for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
        const std::size_t stop = std::min(order.size(), start + config.batch_size);
        const std::span<const std::size_t> rows(order.data() + start, stop - start);
        const Matrix batch = train_x.select_rows(rows);
        batch_y.clear();
        for (auto r : rows) batch_y.push_back(train_y[r]);
        const auto lg = loss_and_gradients(model, batch, batch_y, true, &dropout_rng);
        loss_sum += lg.loss * static_cast<double>(rows.size());
        adam.step(model.parameters, lg.gradients);
      }
    } catch (const NumericError& e) {
      throw TrainingError(fmt::format("training diverged in epoch {}: {}", epoch, e.what()), result.history);
    }
    double val_loss = 0.0;
    try {
      val_loss = evaluate_loss(model, val_x, val_y);
    } catch (const NumericError& e) {
      throw TrainingError(fmt::format("validation loss diverged in epoch {}: {}", epoch, e.what()), result.history);
    }
    result.history.push_back({epoch, loss_sum / static_cast<double>(order.size()), val_loss});

    if (val_loss < best_loss) {
      best_loss = val_loss;
      result.model.parameters = model.parameters;
      result.best_epoch = epoch;
      stale = 0;
    } else {
      ++stale;
    }
    if (stale >= config.patience) break;
  }
  return result;
}

}  // namespace homconv
