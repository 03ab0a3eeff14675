#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "homconv/error.hpp"
#include "homconv/matrix.hpp"
#include "homconv/net.hpp"

namespace homconv {

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 64;
  std::size_t max_epochs = 300;
  std::size_t patience = 20;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double validation_loss = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainResult {
  HcnnModel model;  // weights of the best validation epoch
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
};

/// Training aborted (non-finite loss); carries the epochs completed so far.
class TrainingError : public Error {
 public:
  TrainingError(const std::string& what, std::vector<EpochRecord> history)
      : Error(what), history_(std::move(history)) {}
  const std::vector<EpochRecord>& history() const { return history_; }

 private:
  std::vector<EpochRecord> history_;
};

/// Adam optimizer state over a flat parameter vector.
class Adam {
 public:
  Adam(std::size_t size, double learning_rate, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);
  void step(std::span<double> parameters, std::span<const double> gradients);
  std::size_t steps() const { return t_; }

 private:
  double lr_;
  double beta1_;
  double beta2_;
  double epsilon_;
  std::size_t t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

/// Mini-batch Adam with per-epoch shuffling and validation early stopping.
/// Stops once `patience` consecutive epochs fail to lower the validation loss.
TrainResult train(HcnnModel model, const Matrix& train_x, std::span<const int> train_y, const Matrix& val_x,
                  std::span<const int> val_y, const TrainConfig& config);

}  // namespace homconv
