#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "homconv/error.hpp"
#include "homconv/matrix.hpp"

namespace homconv {

/// Feature matrix (T samples x n numeric features) with integer labels.
struct TabularDataset {
  Matrix features;
  std::vector<int> labels;
  int n_classes = 0;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;
  std::optional<std::int64_t> source_id;

  std::size_t sample_count() const { return features.rows(); }
  std::size_t feature_count() const { return features.cols(); }

  /// Rows in list order; labels follow, class metadata is kept.
  TabularDataset subset(std::span<const std::size_t> rows) const;

  /// Throws DataError when an invariant is broken.
  void validate() const;
};

/// Shuffled train/validation/test partition of 0..T-1.
struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
  std::uint64_t seed = 0;

  friend bool operator==(const SplitIndices&, const SplitIndices&) = default;
};

struct StandardizationParams {
  std::vector<double> mean;
  std::vector<double> std_dev;
};

/// What to do with rows containing a missing value.
enum class MissingValuePolicy { kReject, kDropRows };

/// Label column given by header name or by 0-based position.
using ColumnRef = std::variant<std::string, std::size_t>;

// CSV: comma separated, header row, '.' decimals. Labels are re-encoded to
// 0..C-1 in order of first appearance.
TabularDataset load_csv(const std::filesystem::path& path, const ColumnRef& label_column);
TabularDataset parse_csv(std::string_view text, const ColumnRef& label_column);

struct ArffOptions {
  /// Name of the class attribute; empty selects the last attribute.
  std::string target_attribute;
  MissingValuePolicy missing = MissingValuePolicy::kReject;
};

/// Parses the dense ARFF subset used by OpenML numeric benchmarks: numeric
/// (real/integer/numeric) attributes plus one nominal or numeric-coded class.
TabularDataset parse_arff(std::string_view text, const ArffOptions& options = {});

/// Minimal HTTP transport, injectable so the fetcher can be tested offline.
class HttpClient {
 public:
  struct Response {
    int status = 0;
    std::string body;
  };
  virtual ~HttpClient() = default;
  virtual Response get(const std::string& url) = 0;
};

/// HTTPS client backed by cpp-httplib; follows redirects.
class DefaultHttpClient final : public HttpClient {
 public:
  Response get(const std::string& url) override;
};

struct FetchOptions {
  MissingValuePolicy missing = MissingValuePolicy::kReject;
  /// nullptr uses DefaultHttpClient.
  HttpClient* client = nullptr;
};

/// Cache directory: $HOMCONV_CACHE when set, otherwise ~/.cache/homconv.
std::filesystem::path default_cache_dir();

/// Downloads dataset `dataset_id` from OpenML (description JSON, then the ARFF
/// body it points to) unless {cache_dir}/{id}.arff and {id}.meta.json exist.
TabularDataset fetch_openml(std::int64_t dataset_id, const std::filesystem::path& cache_dir,
                            const FetchOptions& options = {});

/// 50/25/25 split of a seeded uniform shuffle of 0..sample_count-1.
SplitIndices split(std::size_t sample_count, std::uint64_t seed);
SplitIndices split(const TabularDataset& dataset, std::uint64_t seed);

/// Per-feature mean and population standard deviation over `train_indices`.
StandardizationParams standardize_fit(const TabularDataset& dataset,
                                      std::span<const std::size_t> train_indices);
TabularDataset standardize_apply(const TabularDataset& dataset, const StandardizationParams& params);
/// x * std + mean, with the same zero-std guard as standardize_apply.
Matrix standardize_inverse(const Matrix& features, const StandardizationParams& params);

}  // namespace homconv
