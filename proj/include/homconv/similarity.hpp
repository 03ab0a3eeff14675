#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "homconv/matrix.hpp"

namespace homconv {

enum class CorrelationMethod { kPearson, kSpearman };

std::string_view to_string(CorrelationMethod method);
CorrelationMethod parse_correlation_method(std::string_view name);

/// n x n matrix of squared correlation coefficients. Symmetric, entries in
/// [0, 1], unit diagonal.
struct SimilarityMatrix {
  Matrix values;
  CorrelationMethod method = CorrelationMethod::kPearson;

  std::size_t size() const { return values.rows(); }
  double operator()(std::size_t a, std::size_t b) const { return values(a, b); }

  friend bool operator==(const SimilarityMatrix&, const SimilarityMatrix&) = default;
};

struct BootstrapSpec {
  std::size_t replica_count = 100;
  std::uint64_t master_seed = 0;
  CorrelationMethod method = CorrelationMethod::kPearson;
};

/// Average ranks (1-based); tied values share the mean of their ranks.
std::vector<double> average_ranks(std::span<const double> values);

/// Squared Pearson (or Spearman, via average ranks) correlation of every
/// column pair. A constant column correlates 0 with every other column.
SimilarityMatrix squared_correlation(const Matrix& features, CorrelationMethod method);

/// Seed of replica `index` under `master_seed`.
std::uint64_t replica_seed(std::uint64_t master_seed, std::size_t index);

/// T rows drawn uniformly with replacement.
std::vector<std::size_t> bootstrap_rows(std::size_t sample_count, std::uint64_t seed);

/// squared_correlation of a with-replacement row resample of `features`.
SimilarityMatrix bootstrap_replica(const Matrix& features, std::uint64_t seed, CorrelationMethod method);

/// Entry-wise arithmetic mean. Sums pairwise over the replica sequence.
SimilarityMatrix mean_similarity(std::span<const SimilarityMatrix> replicas);

/// Streaming pairwise-sum fold of similarity replicas. Holds O(log r)
/// partial sums; result is bitwise equal to mean_similarity over the same
/// sequence.
class MeanSimilarityAccumulator {
 public:
  void add(const SimilarityMatrix& replica);
  std::size_t count() const { return count_; }
  SimilarityMatrix mean() const;

 private:
  struct Partial {
    Matrix sum;
    std::size_t weight = 0;
  };
  std::vector<Partial> stack_;
  std::size_t count_ = 0;
  std::size_t n_ = 0;
  CorrelationMethod method_ = CorrelationMethod::kPearson;
};

/// MeanSimMatrix estimate: the mean of `spec.replica_count` bootstrap replicas.
SimilarityMatrix bootstrap_mean_similarity(const Matrix& features, const BootstrapSpec& spec);

}  // namespace homconv
