#include "homconv/similarity.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "homconv/error.hpp"
#include "homconv/rng.hpp"

namespace homconv {

std::string_view to_string(CorrelationMethod method) {
  return method == CorrelationMethod::kPearson ? "pearson" : "spearman";
}

CorrelationMethod parse_correlation_method(std::string_view name) {
  if (name == "pearson") return CorrelationMethod::kPearson;
  if (name == "spearman") return CorrelationMethod::kSpearman;
  throw ConfigError(fmt::format("unknown correlation method '{}'", name));
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    // positions i..j-1 hold ranks i+1..j
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

SimilarityMatrix squared_correlation(const Matrix& features, CorrelationMethod method) {
  const std::size_t t = features.rows();
  const std::size_t n = features.cols();
  if (t < 2) throw DataError(fmt::format("correlation needs at least 2 samples, got {}", t));

  // Column-major centered copy, one column per feature.
  std::vector<std::vector<double>> centered(n);
  std::vector<double> sum_sq(n, 0.0);
  std::vector<bool> constant(n, false);
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<double> col = features.column(c);
    const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    if (*lo == *hi) {
      constant[c] = true;
      continue;
    }
    if (method == CorrelationMethod::kSpearman) col = average_ranks(col);
    const double mean = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(t);
    double ss = 0.0;
    for (auto& v : col) {
      v -= mean;
      ss += v * v;
    }
    sum_sq[c] = ss;
    centered[c] = std::move(col);
  }

  SimilarityMatrix out{Matrix(n, n, 0.0), method};
  for (std::size_t a = 0; a < n; ++a) {
    out.values(a, a) = 1.0;
    if (constant[a]) continue;
    for (std::size_t b = a + 1; b < n; ++b) {
      if (constant[b]) continue;
      const auto& xa = centered[a];
      const auto& xb = centered[b];
      double dot = 0.0;
      for (std::size_t i = 0; i < t; ++i) dot += xa[i] * xb[i];
      const double rho = dot / std::sqrt(sum_sq[a] * sum_sq[b]);
      const double rho2 = std::min(1.0, rho * rho);
      out.values(a, b) = rho2;
      out.values(b, a) = rho2;
    }
  }
  return out;
}

std::uint64_t replica_seed(std::uint64_t master_seed, std::size_t index) {
  return mix_seed(master_seed, static_cast<std::uint64_t>(index));
}

std::vector<std::size_t> bootstrap_rows(std::size_t sample_count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::size_t> rows(sample_count);
  for (auto& r : rows) r = static_cast<std::size_t>(rng.uniform_index(sample_count));
  return rows;
}

SimilarityMatrix bootstrap_replica(const Matrix& features, std::uint64_t seed, CorrelationMethod method) {
  if (features.rows() < 2) {
    throw DataError(fmt::format("bootstrap needs at least 2 samples, got {}", features.rows()));
  }
  const auto rows = bootstrap_rows(features.rows(), seed);
  return squared_correlation(features.select_rows(rows), method);
}

void MeanSimilarityAccumulator::add(const SimilarityMatrix& replica) {
  if (count_ == 0) {
    n_ = replica.size();
    method_ = replica.method;
  } else if (replica.size() != n_) {
    throw DataError(fmt::format("replica of size {} does not match {}", replica.size(), n_));
  } else if (replica.method != method_) {
    throw DataError("replicas mix correlation methods");
  }
  stack_.push_back({replica.values, 1});
  ++count_;
  // Binary-counter merge: equal-weight neighbours are combined, earlier + later.
  while (stack_.size() >= 2 && stack_[stack_.size() - 2].weight == stack_.back().weight) {
    Partial top = std::move(stack_.back());
    stack_.pop_back();
    auto& below = stack_.back();
    auto dst = below.sum.data();
    const auto src = top.sum.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    below.weight += top.weight;
  }
}

SimilarityMatrix MeanSimilarityAccumulator::mean() const {
  if (count_ == 0) throw DataError("mean of an empty replica sequence");
  Matrix total = stack_.front().sum;
  for (std::size_t s = 1; s < stack_.size(); ++s) {
    auto dst = total.data();
    const auto src = stack_[s].sum.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
  const double r = static_cast<double>(count_);
  for (auto& v : total.data()) v /= r;
  for (std::size_t i = 0; i < n_; ++i) total(i, i) = 1.0;
  return {std::move(total), method_};
}

SimilarityMatrix mean_similarity(std::span<const SimilarityMatrix> replicas) {
  if (replicas.empty()) throw DataError("mean of an empty replica sequence");
  MeanSimilarityAccumulator acc;
  for (const auto& r : replicas) acc.add(r);
  return acc.mean();
}

SimilarityMatrix bootstrap_mean_similarity(const Matrix& features, const BootstrapSpec& spec) {
  if (spec.replica_count == 0) throw ConfigError("replica_count must be >= 1");
  MeanSimilarityAccumulator acc;
  for (std::size_t i = 0; i < spec.replica_count; ++i) {
    acc.add(bootstrap_replica(features, replica_seed(spec.master_seed, i), spec.method));
  }
  return acc.mean();
}

}  // namespace homconv
