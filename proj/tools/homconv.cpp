// homconv: command line front end for the HCNN pipeline.
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "homconv/harness.hpp"
#include "homconv/homology.hpp"

using namespace homconv;

namespace {

constexpr int kExitConfig = 2;

struct GraphArgs {
  std::string dataset;
  std::string label_column;
  std::string variant = "mean";
  std::uint64_t seed = 12;
  std::size_t iterations = 100;
  std::string method = "pearson";
  double confidence = 0.95;
  std::string cache;
  std::string edges;  // read a graph instead of building one
};

void add_graph_options(CLI::App* cmd, GraphArgs& a, bool allow_edges) {
  cmd->add_option("--dataset", a.dataset, "openml:<id> or csv:<path>");
  cmd->add_option("--label", a.label_column, "CSV label column (default: last)");
  cmd->add_option("--variant", a.variant, "mean or bootstrap")->capture_default_str();
  cmd->add_option("--seed", a.seed, "split and bootstrap seed")->capture_default_str();
  cmd->add_option("--iterations", a.iterations, "bootstrap replica count")->capture_default_str();
  cmd->add_option("--similarity", a.method, "pearson or spearman")->capture_default_str();
  cmd->add_option("--confidence", a.confidence, "BootstrapNet edge threshold")->capture_default_str();
  cmd->add_option("--cache", a.cache, "dataset cache directory");
  if (allow_edges) cmd->add_option("--edges", a.edges, "edge list file to use instead of --dataset");
}

FilteredGraph obtain_graph(const GraphArgs& a) {
  if (!a.edges.empty()) {
    std::ifstream in(a.edges);
    if (!in) throw ConfigError("cannot open edge list '" + a.edges + "'");
    return read_edge_list(in);
  }
  if (a.dataset.empty()) throw ConfigError("--dataset is required");
  ExperimentConfig config;
  config.dataset = DatasetSource::parse(a.dataset);
  config.dataset.label_column = a.label_column;
  config.variant = parse_variant(a.variant);
  if (!a.cache.empty()) config.cache_dir = a.cache;
  Hyperparameters h;
  h.tmfg_iterations = a.iterations;
  h.tmfg_similarity = parse_correlation_method(a.method);
  if (config.variant == Construction::kBootstrapNet) h.tmfg_confidence = a.confidence;
  const auto dataset = load_dataset(config);
  const auto split = prepare_split(dataset, a.seed);
  PipelineBuilder builder(split, config);
  return builder.graph(h);
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      seeds.push_back(std::stoull(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ConfigError("invalid seed '" + item + "'");
    }
  }
  return seeds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Homological convolutional networks for tabular classification"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "debug logging");

  auto* run = app.add_subcommand("run", "hyperparameter search and seeded train/test");
  std::string config_file, dataset, label, variant, seeds, out, cache;
  std::optional<std::size_t> budget, workers;
  run->add_option("--config", config_file, "JSON experiment config");
  run->add_option("--dataset", dataset, "openml:<id> or csv:<path>");
  run->add_option("--label", label, "CSV label column (default: last)");
  run->add_option("--variant", variant, "mean or bootstrap");
  run->add_option("--budget", budget, "search trials per seed (1..500)");
  run->add_option("--seeds", seeds, "comma separated seeds");
  run->add_option("--out", out, "output directory");
  run->add_option("--cache", cache, "dataset cache directory");
  run->add_option("--workers", workers, "parallel search trials");

  GraphArgs tmfg_args;
  auto* tmfg = app.add_subcommand("tmfg", "build the filtered graph and print its edge list");
  add_graph_options(tmfg, tmfg_args, false);
  std::string tmfg_out;
  tmfg->add_option("-o,--output", tmfg_out, "write the edge list here instead of stdout");

  GraphArgs fam_args;
  auto* families = app.add_subcommand("families", "list the simplicial families of the graph");
  add_graph_options(families, fam_args, true);

  GraphArgs verify_args;
  auto* verify = app.add_subcommand("verify", "check the structural invariants of the graph");
  add_graph_options(verify, verify_args, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (*run) {
      ExperimentConfig config = config_file.empty() ? ExperimentConfig{} : load_config(config_file);
      if (!dataset.empty()) config.dataset = DatasetSource::parse(dataset);
      if (!label.empty()) config.dataset.label_column = label;
      if (!variant.empty()) config.variant = parse_variant(variant);
      if (budget) config.search_budget = *budget;
      if (!seeds.empty()) config.seeds = parse_seeds(seeds);
      if (!out.empty()) config.output_dir = out;
      if (!cache.empty()) config.cache_dir = cache;
      if (workers) config.workers = *workers;
      config.validate();
      const auto report = run_experiment(config);
      emit_results(report, config, config.output_dir);
      spdlog::info("wrote {}", (config.output_dir / "results.csv").string());
      return report.exit_code();
    }
    if (*tmfg) {
      const auto graph = obtain_graph(tmfg_args);
      if (tmfg_out.empty()) {
        write_edge_list(std::cout, graph);
      } else {
        std::ofstream f(tmfg_out);
        if (!f) throw ConfigError("cannot write '" + tmfg_out + "'");
        write_edge_list(f, graph);
      }
      return 0;
    }
    if (*families) {
      write_families(std::cout, families_from_graph(obtain_graph(fam_args)));
      return 0;
    }
    const auto report = verify_structure(obtain_graph(verify_args));
    for (const auto& c : report.checks) {
      std::cout << (c.passed ? "ok   " : "FAIL ") << c.name << (c.detail.empty() ? "" : "  " + c.detail) << '\n';
    }
    return report.all_passed() ? 0 : 1;
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  } catch (const DataError& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  } catch (const FetchError& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
}
