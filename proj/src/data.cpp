#include "homconv/data.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "homconv/error.hpp"
#include "homconv/rng.hpp"

namespace homconv {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && (s.front() == '\'' || s.front() == '"') && s.back() == s.front()) {
    return std::string(s.substr(1, s.size() - 2));
  }
  return std::string(s);
}

std::optional<double> parse_real(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

// Splits one CSV record. Double quotes delimit fields; "" inside a quoted
// field is a literal quote.
std::vector<std::string> split_csv_record(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::string(trim(current)));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(std::string(trim(current)));
  return fields;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

// Assigns 0..C-1 in order of first appearance.
class LabelEncoder {
 public:
  int encode(const std::string& raw) {
    auto it = codes_.find(raw);
    if (it != codes_.end()) return it->second;
    const int code = static_cast<int>(names_.size());
    codes_.emplace(raw, code);
    names_.push_back(raw);
    return code;
  }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::unordered_map<std::string, int> codes_;
  std::vector<std::string> names_;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TabularDataset TabularDataset::subset(std::span<const std::size_t> rows) const {
  TabularDataset out;
  out.features = features.select_rows(rows);
  out.labels.reserve(rows.size());
  for (auto r : rows) out.labels.push_back(labels.at(r));
  out.n_classes = n_classes;
  out.feature_names = feature_names;
  out.class_names = class_names;
  out.source_id = source_id;
  return out;
}

void TabularDataset::validate() const {
  if (features.rows() == 0 || features.cols() == 0) throw DataError("dataset is empty");
  if (labels.size() != features.rows()) {
    throw DataError(fmt::format("{} labels for {} rows", labels.size(), features.rows()));
  }
  if (n_classes < 2) throw DataError("dataset needs at least 2 classes");
  if (feature_names.size() != features.cols()) throw DataError("feature name count mismatch");
  for (int y : labels) {
    if (y < 0 || y >= n_classes) throw DataError(fmt::format("label {} outside [0, {})", y, n_classes));
  }
  for (double v : features.data()) {
    if (!std::isfinite(v)) throw DataError("non-finite feature value");
  }
}

TabularDataset parse_csv(std::string_view text, const ColumnRef& label_column) {
  auto lines = split_lines(text);
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw DataError("CSV has no header row");

  const auto header = split_csv_record(lines[0]);
  std::size_t label_index = 0;
  if (const auto* name = std::get_if<std::string>(&label_column)) {
    const auto it = std::find(header.begin(), header.end(), *name);
    if (it == header.end()) throw DataError(fmt::format("label column '{}' not in header", *name));
    label_index = static_cast<std::size_t>(it - header.begin());
  } else {
    label_index = std::get<std::size_t>(label_column);
    if (label_index >= header.size()) {
      throw DataError(fmt::format("label column {} out of range ({} columns)", label_index, header.size()));
    }
  }

  TabularDataset ds;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != label_index) ds.feature_names.push_back(header[c]);
  }
  const std::size_t n = ds.feature_names.size();
  if (n == 0) throw DataError("CSV has no feature columns");

  std::vector<double> values;
  LabelEncoder encoder;
  std::size_t rows = 0;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    const auto fields = split_csv_record(lines[li]);
    const std::size_t row_number = rows + 1;
    if (fields.size() != header.size()) {
      throw DataError(fmt::format("parse failure at row {}: expected {} columns, found {}", row_number,
                                  header.size(), fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (fields[c].empty()) {
        throw DataError(fmt::format("missing value at row {}, column {}", row_number, c + 1));
      }
      if (c == label_index) continue;
      const auto v = parse_real(fields[c]);
      if (!v) {
        throw DataError(fmt::format("parse failure at row {}, column {}: '{}' is not a finite real",
                                    row_number, c + 1, fields[c]));
      }
      values.push_back(*v);
    }
    ds.labels.push_back(encoder.encode(fields[label_index]));
    ++rows;
  }
  if (rows == 0) throw DataError("CSV has no data rows");
  ds.class_names = encoder.names();
  ds.n_classes = static_cast<int>(ds.class_names.size());
  if (ds.n_classes < 2) throw DataError("fewer than 2 distinct labels");
  ds.features = Matrix(rows, n, std::move(values));
  return ds;
}

TabularDataset load_csv(const std::filesystem::path& path, const ColumnRef& label_column) {
  return parse_csv(read_file(path), label_column);
}

namespace {

struct ArffAttribute {
  std::string name;
  bool numeric = false;
  std::vector<std::string> nominal_values;  // empty for numeric
};

bool iequals_prefix(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
  }
  return true;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Splits "@attribute <name> <type>" where <name> may be quoted.
ArffAttribute parse_attribute(std::string_view decl, std::size_t line_no) {
  decl = trim(decl.substr(std::string_view("@attribute").size()));
  std::string name;
  std::string_view rest;
  if (!decl.empty() && (decl.front() == '\'' || decl.front() == '"')) {
    const char q = decl.front();
    const auto close = decl.find(q, 1);
    if (close == std::string_view::npos) {
      throw DataError(fmt::format("ARFF line {}: unterminated attribute name", line_no));
    }
    name = std::string(decl.substr(1, close - 1));
    rest = trim(decl.substr(close + 1));
  } else {
    const auto ws = decl.find_first_of(" \t");
    if (ws == std::string_view::npos) {
      throw DataError(fmt::format("ARFF line {}: attribute without type", line_no));
    }
    name = std::string(decl.substr(0, ws));
    rest = trim(decl.substr(ws));
  }
  ArffAttribute attr{name, false, {}};
  if (!rest.empty() && rest.front() == '{') {
    const auto close = rest.rfind('}');
    if (close == std::string_view::npos) {
      throw DataError(fmt::format("ARFF line {}: unterminated nominal list", line_no));
    }
    for (auto& v : split_csv_record(rest.substr(1, close - 1))) attr.nominal_values.push_back(unquote(v));
    return attr;
  }
  const auto type = lower(rest);
  if (type.starts_with("numeric") || type.starts_with("real") || type.starts_with("integer")) {
    attr.numeric = true;
    return attr;
  }
  // string/date/relational: kept as non-numeric, rejected later unless it is the target.
  return attr;
}

}  // namespace

TabularDataset parse_arff(std::string_view text, const ArffOptions& options) {
  const auto lines = split_lines(text);
  std::vector<ArffAttribute> attributes;
  std::size_t li = 0;
  for (; li < lines.size(); ++li) {
    const auto line = trim(lines[li]);
    if (line.empty() || line.front() == '%') continue;
    if (iequals_prefix(line, "@attribute")) {
      attributes.push_back(parse_attribute(line, li + 1));
    } else if (iequals_prefix(line, "@data")) {
      ++li;
      break;
    } else if (!iequals_prefix(line, "@relation")) {
      throw DataError(fmt::format("ARFF line {}: unexpected header line", li + 1));
    }
  }
  if (attributes.size() < 2) throw DataError("ARFF needs at least one feature and a class attribute");

  std::size_t target = attributes.size() - 1;
  if (!options.target_attribute.empty()) {
    const auto it = std::find_if(attributes.begin(), attributes.end(),
                                 [&](const auto& a) { return a.name == options.target_attribute; });
    if (it == attributes.end()) {
      throw DataError(fmt::format("ARFF has no attribute '{}'", options.target_attribute));
    }
    target = static_cast<std::size_t>(it - attributes.begin());
  }

  TabularDataset ds;
  for (std::size_t a = 0; a < attributes.size(); ++a) {
    if (a == target) continue;
    if (!attributes[a].numeric) {
      throw DataError(fmt::format("rejected: attribute '{}' is not numeric", attributes[a].name));
    }
    ds.feature_names.push_back(attributes[a].name);
  }

  std::vector<double> values;
  std::vector<double> row_values;
  LabelEncoder encoder;
  std::size_t rows = 0;
  std::size_t dropped = 0;
  for (; li < lines.size(); ++li) {
    const auto line = trim(lines[li]);
    if (line.empty() || line.front() == '%') continue;
    if (line.front() == '{') throw DataError("rejected: sparse ARFF rows are not supported");
    const auto fields = split_csv_record(line);
    if (fields.size() != attributes.size()) {
      throw DataError(fmt::format("ARFF line {}: expected {} values, found {}", li + 1, attributes.size(),
                                  fields.size()));
    }
    bool missing = false;
    row_values.clear();
    std::string label;
    for (std::size_t a = 0; a < fields.size(); ++a) {
      const std::string value = unquote(fields[a]);
      if (value == "?" || value.empty()) {
        if (options.missing == MissingValuePolicy::kReject) {
          throw DataError(fmt::format("rejected: missing value at data row {}, attribute '{}'", rows + dropped + 1,
                                      attributes[a].name));
        }
        missing = true;
        continue;
      }
      if (a == target) {
        label = value;
        continue;
      }
      const auto v = parse_real(value);
      if (!v) {
        throw DataError(fmt::format("ARFF line {}: '{}' is not a finite real", li + 1, value));
      }
      row_values.push_back(*v);
    }
    if (missing) {
      ++dropped;
      continue;
    }
    values.insert(values.end(), row_values.begin(), row_values.end());
    ds.labels.push_back(encoder.encode(label));
    ++rows;
  }
  if (rows == 0) throw DataError("ARFF has no complete data rows");
  ds.class_names = encoder.names();
  ds.n_classes = static_cast<int>(ds.class_names.size());
  if (ds.n_classes < 2) throw DataError("fewer than 2 distinct labels");
  ds.features = Matrix(rows, ds.feature_names.size(), std::move(values));
  return ds;
}

SplitIndices split(std::size_t sample_count, std::uint64_t seed) {
  if (sample_count < 4) {
    throw DataError(fmt::format("cannot split {} samples; need at least 4", sample_count));
  }
  std::vector<std::size_t> order(sample_count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  const std::size_t n_train = sample_count / 2;
  const std::size_t n_val = sample_count / 4;
  SplitIndices out;
  out.seed = seed;
  out.train.assign(order.begin(), order.begin() + n_train);
  out.validation.assign(order.begin() + n_train, order.begin() + n_train + n_val);
  out.test.assign(order.begin() + n_train + n_val, order.end());
  return out;
}

SplitIndices split(const TabularDataset& dataset, std::uint64_t seed) {
  return split(dataset.sample_count(), seed);
}

StandardizationParams standardize_fit(const TabularDataset& dataset,
                                      std::span<const std::size_t> train_indices) {
  if (train_indices.empty()) throw DataError("standardize_fit: empty index list");
  const std::size_t n = dataset.feature_count();
  StandardizationParams p{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  const double count = static_cast<double>(train_indices.size());
  for (auto r : train_indices) {
    if (r >= dataset.sample_count()) throw DataError(fmt::format("row index {} out of range", r));
    const auto row = dataset.features.row(r);
    for (std::size_t c = 0; c < n; ++c) p.mean[c] += row[c];
  }
  for (auto& m : p.mean) m /= count;
  for (auto r : train_indices) {
    const auto row = dataset.features.row(r);
    for (std::size_t c = 0; c < n; ++c) {
      const double d = row[c] - p.mean[c];
      p.std_dev[c] += d * d;
    }
  }
  for (auto& s : p.std_dev) s = std::sqrt(s / count);
  return p;
}

namespace {
double guarded(double s) { return s == 0.0 ? 1.0 : s; }
}  // namespace

TabularDataset standardize_apply(const TabularDataset& dataset, const StandardizationParams& params) {
  const std::size_t n = dataset.feature_count();
  if (params.mean.size() != n || params.std_dev.size() != n) {
    throw DataError(fmt::format("standardization params have length {}, dataset has {} features",
                                params.mean.size(), n));
  }
  TabularDataset out = dataset;
  for (std::size_t r = 0; r < out.sample_count(); ++r) {
    auto row = out.features.row(r);
    for (std::size_t c = 0; c < n; ++c) row[c] = (row[c] - params.mean[c]) / guarded(params.std_dev[c]);
  }
  return out;
}

Matrix standardize_inverse(const Matrix& features, const StandardizationParams& params) {
  if (params.mean.size() != features.cols()) throw DataError("standardize_inverse: dimension mismatch");
  Matrix out = features;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t c = 0; c < out.cols(); ++c) row[c] = row[c] * guarded(params.std_dev[c]) + params.mean[c];
  }
  return out;
}

}  // namespace homconv
