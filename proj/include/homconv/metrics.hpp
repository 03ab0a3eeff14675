#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "homconv/error.hpp"

namespace homconv {

/// C x C counts, rows = true class, columns = predicted class.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes);
  /// Row-major counts; must be square and nonnegative.
  ConfusionMatrix(std::size_t classes, std::vector<std::int64_t> counts);

  static ConfusionMatrix from_labels(std::span<const int> truth, std::span<const int> predicted,
                                     std::size_t classes);

  std::size_t classes() const { return classes_; }
  std::int64_t operator()(std::size_t truth, std::size_t predicted) const {
    return counts_[truth * classes_ + predicted];
  }
  void add(std::size_t truth, std::size_t predicted) { ++counts_[truth * classes_ + predicted]; }
  std::int64_t total() const;

 private:
  std::size_t classes_;
  std::vector<std::int64_t> counts_;
};

double accuracy(const ConfusionMatrix& cm);
/// Unweighted mean of per-class F1; a class with P + R = 0 scores 0.
double macro_f1(const ConfusionMatrix& cm);
/// Multiclass (Gorodkin) MCC; 0 when the denominator vanishes.
double mcc(const ConfusionMatrix& cm);

}  // namespace homconv
