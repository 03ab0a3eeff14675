#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "homconv/data.hpp"
#include "homconv/error.hpp"
#include "homconv/net.hpp"
#include "homconv/similarity.hpp"
#include "homconv/tmfg.hpp"
#include "homconv/train.hpp"

namespace homconv {

/// "openml:<id>" or "csv:<path>".
struct DatasetSource {
  enum class Kind { kOpenml, kCsv };
  Kind kind = Kind::kOpenml;
  std::int64_t openml_id = 0;
  std::filesystem::path csv_path;
  std::string label_column;  // csv only; empty selects the last column

  static DatasetSource parse(std::string_view text);
  std::string to_string() const;
};

Construction parse_variant(std::string_view name);  // "mean" | "bootstrap"

/// The ten default experiment seeds.
const std::vector<std::uint64_t>& default_seeds();

/// Candidate values per axis. tmfg_confidence is ignored for MeanSimMatrix.
struct SearchSpace {
  std::vector<int> n_filters_l1{4, 8, 12, 16};
  std::vector<int> n_filters_l2{32, 36, 40, 44, 48, 52, 56, 60, 64};
  std::vector<std::size_t> tmfg_iterations{100, 400, 700, 1000};
  std::vector<double> tmfg_confidence{0.90, 0.95, 0.99};
  std::vector<CorrelationMethod> tmfg_similarity{CorrelationMethod::kPearson, CorrelationMethod::kSpearman};

  void validate(Construction variant) const;
  std::size_t grid_size(Construction variant) const;
};

struct Hyperparameters {
  int n_filters_l1 = 8;
  int n_filters_l2 = 32;
  std::size_t tmfg_iterations = 100;
  std::optional<double> tmfg_confidence;  // BootstrapNet only
  CorrelationMethod tmfg_similarity = CorrelationMethod::kPearson;

  friend bool operator==(const Hyperparameters&, const Hyperparameters&) = default;
};

struct ExperimentConfig {
  DatasetSource dataset;
  Construction variant = Construction::kMeanSimMatrix;
  std::size_t search_budget = 50;
  std::vector<std::uint64_t> seeds = default_seeds();
  TrainConfig train;
  SearchSpace space;
  std::filesystem::path output_dir = "results";
  std::filesystem::path cache_dir;  // empty: default_cache_dir()
  MissingValuePolicy missing = MissingValuePolicy::kDropRows;
  double dropout_rate = 0.25;
  std::size_t workers = 1;  // parallel search trials

  void validate() const;
};

/// Reads a JSON config. Keys mirror ExperimentConfig; omitted keys keep
/// their defaults.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(std::string_view json_text);

TabularDataset load_dataset(const ExperimentConfig& config);

/// Standardized split of one seed, shared by search and the final run.
struct PreparedSplit {
  std::uint64_t seed = 0;
  Matrix train_x;
  std::vector<int> train_y;
  Matrix val_x;
  std::vector<int> val_y;
  Matrix test_x;
  std::vector<int> test_y;
  int n_classes = 0;
};

PreparedSplit prepare_split(const TabularDataset& dataset, std::uint64_t seed);

/// Everything a trained pipeline produced for one hyperparameter point.
struct PipelineOutcome {
  FilteredGraph graph;
  SimplicialFamilies families;
  TrainResult trained;
  double validation_f1 = 0.0;
};

/// Caches per-seed similarity estimates so trials sharing
/// (tmfg_iterations, tmfg_similarity) reuse one bootstrap.
class PipelineBuilder {
 public:
  PipelineBuilder(const PreparedSplit& split, const ExperimentConfig& config);

  /// Bootstrap statistics for every listed point, computed up front so that
  /// concurrent build() calls only read the caches.
  void warm(const std::vector<Hyperparameters>& points);
  FilteredGraph graph(const Hyperparameters& h);
  PipelineOutcome build(const Hyperparameters& h);

 private:
  struct Key {
    std::size_t iterations;
    CorrelationMethod method;
    auto operator<=>(const Key&) const = default;
  };
  const SimilarityMatrix& similarity(Key key);
  const EdgeFrequencyTable& frequencies(Key key);

  const PreparedSplit& split_;
  const ExperimentConfig& config_;
  std::vector<std::pair<Key, SimilarityMatrix>> similarity_cache_;
  std::vector<std::pair<Key, EdgeFrequencyTable>> frequency_cache_;
};

struct TrialRecord {
  Hyperparameters point;
  std::optional<double> validation_f1;  // empty when the trial failed
  std::string error;
};

struct SearchResult {
  Hyperparameters best;
  std::size_t best_index = 0;
  std::vector<TrialRecord> trials;  // in sampling order
};

/// Every search trial failed.
class SearchError : public Error {
 public:
  SearchError(const std::string& what, std::vector<TrialRecord> trials) : Error(what), trials_(std::move(trials)) {}
  const std::vector<TrialRecord>& trials() const { return trials_; }

 private:
  std::vector<TrialRecord> trials_;
};

/// Distinct grid points in sampling order: min(budget, grid size) of them.
std::vector<Hyperparameters> sample_search_points(const SearchSpace& space, Construction variant,
                                                  std::size_t budget, std::uint64_t seed);

/// Validation macro-F1 argmax over the sampled points; ties go to the
/// earliest sample.
SearchResult random_search(PipelineBuilder& builder, const ExperimentConfig& config, std::uint64_t seed);

struct RunResult {
  std::uint64_t seed = 0;
  Hyperparameters hyperparameters;
  double f1 = 0.0;
  double accuracy = 0.0;
  double mcc = 0.0;
  double tune_seconds = 0.0;
  double train_test_seconds = 0.0;
  std::size_t param_count = 0;
};

struct SeedFailure {
  std::uint64_t seed = 0;
  std::string message;
};

struct ExperimentReport {
  std::vector<RunResult> results;  // config seed order
  std::vector<SeedFailure> failures;

  int exit_code() const { return failures.empty() ? 0 : 1; }
};

RunResult run_seed(const TabularDataset& dataset, const ExperimentConfig& config, std::uint64_t seed);
ExperimentReport run_experiment(const ExperimentConfig& config);
ExperimentReport run_experiment(const ExperimentConfig& config, const TabularDataset& dataset);

/// Writes results.csv and summary.json into `output_dir`.
void emit_results(const ExperimentReport& report, const ExperimentConfig& config,
                  const std::filesystem::path& output_dir);

}  // namespace homconv
