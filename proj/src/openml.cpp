#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <fmt/format.h>
#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "homconv/data.hpp"
#include "homconv/error.hpp"

namespace homconv {

namespace {

constexpr const char* kDescriptionEndpoint = "https://www.openml.org/api/v1/json/data/";

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FetchError(fmt::format("cannot read cache file '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes to a sibling temporary then renames, so readers never see a partial file.
void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  static std::atomic<unsigned> counter{0};
  auto tmp = path;
  tmp += fmt::format(".tmp.{}.{}", ::getpid(), counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FetchError(fmt::format("cannot write cache file '{}'", tmp.string()));
    out << contents;
    if (!out) throw FetchError(fmt::format("short write to '{}'", tmp.string()));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw FetchError(fmt::format("cannot rename into '{}': {}", path.string(), ec.message()));
  }
}

TabularDataset parse_cached(std::int64_t id, const std::string& arff, const nlohmann::json& meta,
                            const FetchOptions& options) {
  ArffOptions arff_options;
  arff_options.missing = options.missing;
  if (meta.contains("default_target_attribute") && meta["default_target_attribute"].is_string()) {
    arff_options.target_attribute = meta["default_target_attribute"].get<std::string>();
  }
  TabularDataset ds = parse_arff(arff, arff_options);
  ds.source_id = id;
  return ds;
}

}  // namespace

HttpClient::Response DefaultHttpClient::get(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw FetchError(fmt::format("malformed URL '{}'", url));
  const auto path_start = url.find('/', scheme_end + 3);
  const std::string origin = url.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Client client(origin);
  client.set_follow_location(true);
  client.set_connection_timeout(20);
  client.set_read_timeout(120);
  auto res = client.Get(path);
  if (!res) {
    throw FetchError(fmt::format("GET {} failed: {}", url, httplib::to_string(res.error())));
  }
  return {res->status, res->body};
}

std::filesystem::path default_cache_dir() {
  if (const char* env = std::getenv("HOMCONV_CACHE"); env && *env) return env;
  if (const char* home = std::getenv("HOME"); home && *home) {
    return std::filesystem::path(home) / ".cache" / "homconv";
  }
  return std::filesystem::temp_directory_path() / "homconv";
}

TabularDataset fetch_openml(std::int64_t dataset_id, const std::filesystem::path& cache_dir,
                            const FetchOptions& options) {
  if (dataset_id <= 0) throw ConfigError(fmt::format("invalid OpenML dataset ID {}", dataset_id));

  const auto arff_path = cache_dir / fmt::format("{}.arff", dataset_id);
  const auto meta_path = cache_dir / fmt::format("{}.meta.json", dataset_id);
  if (std::filesystem::exists(arff_path) && std::filesystem::exists(meta_path)) {
    return parse_cached(dataset_id, read_all(arff_path), nlohmann::json::parse(read_all(meta_path)), options);
  }

  DefaultHttpClient fallback;
  HttpClient& client = options.client ? *options.client : fallback;

  const std::string description_url = fmt::format("{}{}", kDescriptionEndpoint, dataset_id);
  const auto description = client.get(description_url);
  if (description.status != 200) {
    throw FetchError(fmt::format("GET {} returned HTTP status {}", description_url, description.status));
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(description.body);
  } catch (const nlohmann::json::exception& e) {
    throw FetchError(fmt::format("dataset {} description is not JSON: {}", dataset_id, e.what()));
  }
  const auto& desc = doc.value("data_set_description", nlohmann::json::object());
  if (!desc.contains("url") || !desc["url"].is_string()) {
    throw FetchError(fmt::format("dataset {} description has no data_set_description.url", dataset_id));
  }
  const std::string arff_url = desc["url"].get<std::string>();
  const auto body = client.get(arff_url);
  if (body.status != 200) {
    throw FetchError(fmt::format("GET {} returned HTTP status {}", arff_url, body.status));
  }

  nlohmann::json meta;
  meta["id"] = dataset_id;
  meta["name"] = desc.value("name", "");
  meta["url"] = arff_url;
  meta["format"] = desc.value("format", "");
  meta["default_target_attribute"] = desc.value("default_target_attribute", "");
  meta["md5_checksum"] = desc.value("md5_checksum", "");

  std::error_code ec;
  std::filesystem::create_directories(cache_dir, ec);
  if (ec) throw FetchError(fmt::format("cannot create cache dir '{}': {}", cache_dir.string(), ec.message()));
  write_atomic(arff_path, body.body);
  write_atomic(meta_path, meta.dump(2) + "\n");

  return parse_cached(dataset_id, body.body, meta, options);
}

}  // namespace homconv
