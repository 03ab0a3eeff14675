#include "homconv/harness.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>
#include <thread>

#include "homconv/homology.hpp"
#include "homconv/metrics.hpp"

namespace homconv {

namespace {

// Stream indices for mix_seed(seed, ...): one independent stream per stage.
constexpr std::uint64_t kBootstrapStream = 1;
constexpr std::uint64_t kInitStream = 2;
constexpr std::uint64_t kTrainStream = 3;
constexpr std::uint64_t kSearchStream = 4;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

DatasetSource DatasetSource::parse(std::string_view text) {
  DatasetSource s;
  if (text.starts_with("openml:")) {
    const auto digits = text.substr(7);
    std::int64_t id = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), id);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || id <= 0) {
      throw ConfigError(fmt::format("invalid OpenML dataset id in '{}'", text));
    }
    s.kind = Kind::kOpenml;
    s.openml_id = id;
    return s;
  }
  if (text.starts_with("csv:") && text.size() > 4) {
    s.kind = Kind::kCsv;
    s.csv_path = std::string(text.substr(4));
    return s;
  }
  throw ConfigError(fmt::format("dataset must be 'openml:<id>' or 'csv:<path>', got '{}'", text));
}

std::string DatasetSource::to_string() const {
  return kind == Kind::kOpenml ? fmt::format("openml:{}", openml_id) : fmt::format("csv:{}", csv_path.string());
}

Construction parse_variant(std::string_view name) {
  if (name == "mean" || name == "mean_sim_matrix") return Construction::kMeanSimMatrix;
  if (name == "bootstrap" || name == "bootstrap_net") return Construction::kBootstrapNet;
  throw ConfigError(fmt::format("unknown variant '{}' (expected mean or bootstrap)", name));
}

const std::vector<std::uint64_t>& default_seeds() {
  static const std::vector<std::uint64_t> seeds{12, 190, 903, 7687, 8279, 9433, 12555, 22443, 67822, 9822127};
  return seeds;
}

void SearchSpace::validate(Construction variant) const {
  auto nonempty = [](bool empty, const char* axis) {
    if (empty) throw ConfigError(fmt::format("search space axis '{}' is empty", axis));
  };
  nonempty(n_filters_l1.empty(), "n_filters_l1");
  nonempty(n_filters_l2.empty(), "n_filters_l2");
  nonempty(tmfg_iterations.empty(), "tmfg_iterations");
  nonempty(tmfg_similarity.empty(), "tmfg_similarity");
  if (variant == Construction::kBootstrapNet) nonempty(tmfg_confidence.empty(), "tmfg_confidence");
  for (int v : n_filters_l1) {
    if (v < 1) throw ConfigError("n_filters_l1 values must be >= 1");
  }
  for (int v : n_filters_l2) {
    if (v < 1) throw ConfigError("n_filters_l2 values must be >= 1");
  }
  for (auto v : tmfg_iterations) {
    if (v < 1) throw ConfigError("tmfg_iterations values must be >= 1");
  }
  for (double v : tmfg_confidence) {
    if (!(v > 0.0 && v <= 1.0)) throw ConfigError("tmfg_confidence values must be in (0, 1]");
  }
}

std::size_t SearchSpace::grid_size(Construction variant) const {
  std::size_t size = n_filters_l1.size() * n_filters_l2.size() * tmfg_iterations.size() * tmfg_similarity.size();
  if (variant == Construction::kBootstrapNet) size *= tmfg_confidence.size();
  return size;
}

void ExperimentConfig::validate() const {
  if (dataset.kind == DatasetSource::Kind::kOpenml && dataset.openml_id <= 0) {
    throw ConfigError("dataset is not set");
  }
  if (search_budget < 1 || search_budget > 500) {
    throw ConfigError(fmt::format("search_budget must be in [1, 500], got {}", search_budget));
  }
  if (seeds.empty()) throw ConfigError("seed list is empty");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw ConfigError("dropout_rate must be in [0, 1)");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  train.validate();
  space.validate(variant);
}

ExperimentConfig parse_config(std::string_view json_text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("config is not valid JSON: {}", e.what()));
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  ExperimentConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "dataset") {
        c.dataset = DatasetSource::parse(value.get<std::string>());
      } else if (key == "label_column") {
        c.dataset.label_column = value.get<std::string>();
      } else if (key == "variant") {
        c.variant = parse_variant(value.get<std::string>());
      } else if (key == "search_budget") {
        c.search_budget = value.get<std::size_t>();
      } else if (key == "seeds") {
        c.seeds = value.get<std::vector<std::uint64_t>>();
      } else if (key == "output_dir") {
        c.output_dir = value.get<std::string>();
      } else if (key == "cache_dir") {
        c.cache_dir = value.get<std::string>();
      } else if (key == "missing") {
        const auto policy = value.get<std::string>();
        if (policy == "drop_rows") {
          c.missing = MissingValuePolicy::kDropRows;
        } else if (policy == "reject") {
          c.missing = MissingValuePolicy::kReject;
        } else {
          throw ConfigError(fmt::format("missing must be 'drop_rows' or 'reject', got '{}'", policy));
        }
      } else if (key == "dropout_rate") {
        c.dropout_rate = value.get<double>();
      } else if (key == "workers") {
        c.workers = value.get<std::size_t>();
      } else if (key == "train") {
        for (const auto& [tk, tv] : value.items()) {
          if (tk == "learning_rate") {
            c.train.learning_rate = tv.get<double>();
          } else if (tk == "batch_size") {
            c.train.batch_size = tv.get<std::size_t>();
          } else if (tk == "max_epochs") {
            c.train.max_epochs = tv.get<std::size_t>();
          } else if (tk == "patience") {
            c.train.patience = tv.get<std::size_t>();
          } else {
            throw ConfigError(fmt::format("unknown train key '{}'", tk));
          }
        }
      } else if (key == "search_space") {
        for (const auto& [sk, sv] : value.items()) {
          if (sk == "n_filters_l1") {
            c.space.n_filters_l1 = sv.get<std::vector<int>>();
          } else if (sk == "n_filters_l2") {
            c.space.n_filters_l2 = sv.get<std::vector<int>>();
          } else if (sk == "tmfg_iterations") {
            c.space.tmfg_iterations = sv.get<std::vector<std::size_t>>();
          } else if (sk == "tmfg_confidence") {
            c.space.tmfg_confidence = sv.get<std::vector<double>>();
          } else if (sk == "tmfg_similarity") {
            c.space.tmfg_similarity.clear();
            for (const auto& name : sv) c.space.tmfg_similarity.push_back(parse_correlation_method(name.get<std::string>()));
          } else {
            throw ConfigError(fmt::format("unknown search_space key '{}'", sk));
          }
        }
      } else {
        throw ConfigError(fmt::format("unknown config key '{}'", key));
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("config has a value of the wrong type: {}", e.what()));
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) { return parse_config(read_text(path)); }

TabularDataset load_dataset(const ExperimentConfig& config) {
  const auto& src = config.dataset;
  if (src.kind == DatasetSource::Kind::kOpenml) {
    const auto cache = config.cache_dir.empty() ? default_cache_dir() : config.cache_dir;
    FetchOptions options;
    options.missing = config.missing;
    return fetch_openml(src.openml_id, cache, options);
  }
  if (!src.label_column.empty()) return load_csv(src.csv_path, ColumnRef{src.label_column});
  // Last column: count header fields.
  std::ifstream in(src.csv_path);
  if (!in) throw DataError(fmt::format("cannot open '{}'", src.csv_path.string()));
  std::string header;
  std::getline(in, header);
  const auto fields = static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')) + 1;
  return load_csv(src.csv_path, ColumnRef{fields - 1});
}

PreparedSplit prepare_split(const TabularDataset& dataset, std::uint64_t seed) {
  const SplitIndices s = split(dataset, seed);
  const StandardizationParams params = standardize_fit(dataset, s.train);
  const TabularDataset scaled = standardize_apply(dataset, params);
  PreparedSplit p;
  p.seed = seed;
  p.n_classes = dataset.n_classes;
  auto take = [&](const std::vector<std::size_t>& rows, Matrix& x, std::vector<int>& y) {
    x = scaled.features.select_rows(rows);
    y.clear();
    for (auto r : rows) y.push_back(scaled.labels[r]);
  };
  take(s.train, p.train_x, p.train_y);
  take(s.validation, p.val_x, p.val_y);
  take(s.test, p.test_x, p.test_y);
  return p;
}

PipelineBuilder::PipelineBuilder(const PreparedSplit& split, const ExperimentConfig& config)
    : split_(split), config_(config) {}

const SimilarityMatrix& PipelineBuilder::similarity(Key key) {
  for (const auto& [k, v] : similarity_cache_) {
    if (k == key) return v;
  }
  const BootstrapSpec spec{key.iterations, mix_seed(split_.seed, kBootstrapStream), key.method};
  similarity_cache_.emplace_back(key, bootstrap_mean_similarity(split_.train_x, spec));
  return similarity_cache_.back().second;
}

const EdgeFrequencyTable& PipelineBuilder::frequencies(Key key) {
  for (const auto& [k, v] : frequency_cache_) {
    if (k == key) return v;
  }
  const BootstrapSpec spec{key.iterations, mix_seed(split_.seed, kBootstrapStream), key.method};
  frequency_cache_.emplace_back(key, bootstrap_edge_frequencies(split_.train_x, spec));
  return frequency_cache_.back().second;
}

void PipelineBuilder::warm(const std::vector<Hyperparameters>& points) {
  similarity_cache_.reserve(similarity_cache_.size() + points.size());
  frequency_cache_.reserve(frequency_cache_.size() + points.size());
  for (const auto& h : points) {
    const Key key{h.tmfg_iterations, h.tmfg_similarity};
    if (config_.variant == Construction::kMeanSimMatrix) {
      similarity(key);
    } else {
      frequencies(key);
    }
  }
}

FilteredGraph PipelineBuilder::graph(const Hyperparameters& h) {
  const Key key{h.tmfg_iterations, h.tmfg_similarity};
  if (config_.variant == Construction::kMeanSimMatrix) return build_tmfg(similarity(key));
  if (!h.tmfg_confidence) throw ConfigError("bootstrap_net variant needs tmfg_confidence");
  return bootstrap_net(frequencies(key), *h.tmfg_confidence);
}

PipelineOutcome PipelineBuilder::build(const Hyperparameters& h) {
  PipelineOutcome out;
  out.graph = graph(h);
  out.families = families_from_graph(out.graph);
  HcnnConfig net;
  net.zeta = h.n_filters_l1;
  net.xi = h.n_filters_l2;
  net.dropout_rate = config_.dropout_rate;
  net.n_classes = split_.n_classes;
  HcnnModel model = compile(out.families, net, split_.train_x.cols(), mix_seed(split_.seed, kInitStream));
  TrainConfig tc = config_.train;
  tc.seed = mix_seed(split_.seed, kTrainStream);
  out.trained = train(std::move(model), split_.train_x, split_.train_y, split_.val_x, split_.val_y, tc);
  const auto predicted = predict(out.trained.model, split_.val_x);
  out.validation_f1 = macro_f1(
      ConfusionMatrix::from_labels(split_.val_y, predicted, static_cast<std::size_t>(split_.n_classes)));
  return out;
}

std::vector<Hyperparameters> sample_search_points(const SearchSpace& space, Construction variant,
                                                  std::size_t budget, std::uint64_t seed) {
  space.validate(variant);
  std::vector<Hyperparameters> grid;
  grid.reserve(space.grid_size(variant));
  const std::vector<std::optional<double>> confidences = [&] {
    std::vector<std::optional<double>> out;
    if (variant == Construction::kMeanSimMatrix) return std::vector<std::optional<double>>{std::nullopt};
    for (double c : space.tmfg_confidence) out.emplace_back(c);
    return out;
  }();
  for (int l1 : space.n_filters_l1) {
    for (int l2 : space.n_filters_l2) {
      for (auto it : space.tmfg_iterations) {
        for (const auto& conf : confidences) {
          for (auto method : space.tmfg_similarity) grid.push_back({l1, l2, it, conf, method});
        }
      }
    }
  }
  Rng rng(mix_seed(seed, kSearchStream));
  rng.shuffle(std::span<Hyperparameters>(grid));
  grid.resize(std::min(budget, grid.size()));
  return grid;
}

SearchResult random_search(PipelineBuilder& builder, const ExperimentConfig& config, std::uint64_t seed) {
  const auto points = sample_search_points(config.space, config.variant, config.search_budget, seed);
  builder.warm(points);

  SearchResult result;
  result.trials.resize(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      auto& trial = result.trials[i];
      trial.point = points[i];
      try {
        trial.validation_f1 = builder.build(points[i]).validation_f1;
      } catch (const std::exception& e) {
        trial.error = e.what();
      }
    }
  };
  const std::size_t threads = std::min(config.workers, points.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < result.trials.size(); ++i) {
    const auto& t = result.trials[i];
    if (!t.validation_f1) {
      spdlog::warn("seed {} trial {} failed: {}", seed, i, t.error);
      continue;
    }
    if (!best || *t.validation_f1 > *result.trials[*best].validation_f1) best = i;
  }
  if (!best) {
    std::string detail;
    for (std::size_t i = 0; i < result.trials.size(); ++i) detail += fmt::format("\n  trial {}: {}", i, result.trials[i].error);
    throw SearchError(fmt::format("all {} search trials failed:{}", result.trials.size(), detail), result.trials);
  }
  result.best_index = *best;
  result.best = result.trials[*best].point;
  return result;
}

RunResult run_seed(const TabularDataset& dataset, const ExperimentConfig& config, std::uint64_t seed) {
  const PreparedSplit split = prepare_split(dataset, seed);
  PipelineBuilder builder(split, config);

  const auto tune_start = Clock::now();
  const SearchResult search = random_search(builder, config, seed);
  RunResult r;
  r.seed = seed;
  r.hyperparameters = search.best;
  r.tune_seconds = seconds_since(tune_start);

  const auto final_start = Clock::now();
  const PipelineOutcome outcome = builder.build(search.best);
  const auto predicted = predict(outcome.trained.model, split.test_x);
  const auto cm = ConfusionMatrix::from_labels(split.test_y, predicted, static_cast<std::size_t>(split.n_classes));
  r.f1 = macro_f1(cm);
  r.accuracy = accuracy(cm);
  r.mcc = mcc(cm);
  r.param_count = param_count(outcome.trained.model);
  r.train_test_seconds = seconds_since(final_start);
  return r;
}

ExperimentReport run_experiment(const ExperimentConfig& config, const TabularDataset& dataset) {
  config.validate();
  dataset.validate();
  ExperimentReport report;
  for (auto seed : config.seeds) {
    try {
      report.results.push_back(run_seed(dataset, config, seed));
      const auto& r = report.results.back();
      spdlog::info("seed {}: f1={:.4f} accuracy={:.4f} mcc={:.4f} params={}", seed, r.f1, r.accuracy, r.mcc,
                   r.param_count);
    } catch (const std::exception& e) {
      spdlog::error("seed {} failed: {}", seed, e.what());
      report.failures.push_back({seed, e.what()});
    }
  }
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  return run_experiment(config, load_dataset(config));
}

namespace {

struct Moments {
  double mean = 0.0;
  double std_dev = 0.0;
};

template <typename F>
Moments moments(const std::vector<RunResult>& results, F field) {
  Moments m;
  if (results.empty()) return m;
  for (const auto& r : results) m.mean += field(r);
  m.mean /= static_cast<double>(results.size());
  double ss = 0.0;
  for (const auto& r : results) ss += (field(r) - m.mean) * (field(r) - m.mean);
  m.std_dev = std::sqrt(ss / static_cast<double>(results.size()));
  return m;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << content;
  if (!out) throw Error(fmt::format("write to '{}' failed", path.string()));
}

}  // namespace

void emit_results(const ExperimentReport& report, const ExperimentConfig& config,
                  const std::filesystem::path& output_dir) {
  std::error_code ec;
  std::filesystem::create_directories(output_dir, ec);
  if (ec) throw Error(fmt::format("cannot create '{}': {}", output_dir.string(), ec.message()));

  std::string csv =
      "seed,n_filters_l1,n_filters_l2,tmfg_iterations,tmfg_confidence,tmfg_similarity,"
      "f1,accuracy,mcc,tune_s,traintest_s,params\n";
  for (const auto& r : report.results) {
    const auto& h = r.hyperparameters;
    csv += fmt::format("{},{},{},{},{},{},{},{},{},{:.3f},{:.3f},{}\n", r.seed, h.n_filters_l1, h.n_filters_l2,
                       h.tmfg_iterations, h.tmfg_confidence ? fmt::format("{}", *h.tmfg_confidence) : "",
                       to_string(h.tmfg_similarity), r.f1, r.accuracy, r.mcc, r.tune_seconds,
                       r.train_test_seconds, r.param_count);
  }
  write_file(output_dir / "results.csv", csv);

  nlohmann::ordered_json s;
  s["dataset"] = config.dataset.to_string();
  s["variant"] = std::string(to_string(config.variant));
  s["search_budget"] = config.search_budget;
  s["seeds"] = config.seeds;
  s["completed"] = report.results.size();
  auto& metrics = s["metrics"];
  auto add = [&](const char* name, auto field) {
    const auto m = moments(report.results, field);
    metrics[name] = {{"mean", m.mean}, {"std", m.std_dev}};
  };
  add("f1", [](const RunResult& r) { return r.f1; });
  add("accuracy", [](const RunResult& r) { return r.accuracy; });
  add("mcc", [](const RunResult& r) { return r.mcc; });
  add("tune_s", [](const RunResult& r) { return r.tune_seconds; });
  add("traintest_s", [](const RunResult& r) { return r.train_test_seconds; });
  add("params", [](const RunResult& r) { return static_cast<double>(r.param_count); });
  auto& failures = s["failures"] = nlohmann::ordered_json::array();
  for (const auto& f : report.failures) failures.push_back({{"seed", f.seed}, {"error", f.message}});
  write_file(output_dir / "summary.json", s.dump(2) + "\n");
}

}  // namespace homconv
