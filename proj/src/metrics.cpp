#include "homconv/metrics.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numeric>

namespace homconv {

ConfusionMatrix::ConfusionMatrix(std::size_t classes) : classes_(classes), counts_(classes * classes, 0) {
  if (classes == 0) throw DataError("confusion matrix needs at least one class");
}

ConfusionMatrix::ConfusionMatrix(std::size_t classes, std::vector<std::int64_t> counts)
    : classes_(classes), counts_(std::move(counts)) {
  if (classes == 0) throw DataError("confusion matrix needs at least one class");
  if (counts_.size() != classes * classes) {
    throw DataError(fmt::format("{} counts for a {}x{} confusion matrix", counts_.size(), classes, classes));
  }
  for (auto c : counts_) {
    if (c < 0) throw DataError("negative confusion count");
  }
}

ConfusionMatrix ConfusionMatrix::from_labels(std::span<const int> truth, std::span<const int> predicted,
                                             std::size_t classes) {
  if (truth.size() != predicted.size()) throw DataError("truth and prediction lengths differ");
  ConfusionMatrix cm(classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto t = static_cast<std::size_t>(truth[i]);
    const auto p = static_cast<std::size_t>(predicted[i]);
    if (truth[i] < 0 || predicted[i] < 0 || t >= classes || p >= classes) {
      throw DataError(fmt::format("label pair ({}, {}) outside [0, {})", truth[i], predicted[i], classes));
    }
    cm.add(t, p);
  }
  return cm;
}

std::int64_t ConfusionMatrix::total() const { return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0}); }

namespace {

double require_total(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  if (total == 0) throw DataError("metric of an empty confusion matrix");
  return static_cast<double>(total);
}

}  // namespace

double accuracy(const ConfusionMatrix& cm) {
  const double total = require_total(cm);
  double diag = 0.0;
  for (std::size_t k = 0; k < cm.classes(); ++k) diag += static_cast<double>(cm(k, k));
  return diag / total;
}

double macro_f1(const ConfusionMatrix& cm) {
  require_total(cm);
  const std::size_t c = cm.classes();
  double sum = 0.0;
  for (std::size_t k = 0; k < c; ++k) {
    double predicted = 0.0;
    double actual = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      predicted += static_cast<double>(cm(j, k));
      actual += static_cast<double>(cm(k, j));
    }
    const double tp = static_cast<double>(cm(k, k));
    const double precision = predicted > 0.0 ? tp / predicted : 0.0;
    const double recall = actual > 0.0 ? tp / actual : 0.0;
    if (precision + recall > 0.0) sum += 2.0 * precision * recall / (precision + recall);
  }
  return sum / static_cast<double>(c);
}

double mcc(const ConfusionMatrix& cm) {
  const double s = require_total(cm);
  const std::size_t c = cm.classes();
  double correct = 0.0;
  double pt = 0.0;
  double pp = 0.0;
  double tt = 0.0;
  for (std::size_t k = 0; k < c; ++k) {
    double p_k = 0.0;
    double t_k = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      p_k += static_cast<double>(cm(j, k));
      t_k += static_cast<double>(cm(k, j));
    }
    correct += static_cast<double>(cm(k, k));
    pt += p_k * t_k;
    pp += p_k * p_k;
    tt += t_k * t_k;
  }
  const double denom = std::sqrt(s * s - pp) * std::sqrt(s * s - tt);
  if (denom == 0.0) return 0.0;
  return (correct * s - pt) / denom;
}

}  // namespace homconv
