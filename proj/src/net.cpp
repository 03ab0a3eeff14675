#include "homconv/net.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>

namespace homconv {

void HcnnConfig::validate() const {
  if (zeta < 1) throw ConfigError(fmt::format("zeta must be >= 1, got {}", zeta));
  if (xi < 1) throw ConfigError(fmt::format("xi must be >= 1, got {}", xi));
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw ConfigError(fmt::format("dropout_rate must be in [0, 1), got {}", dropout_rate));
  }
  if (n_classes < 2) throw ConfigError(fmt::format("n_classes must be >= 2, got {}", n_classes));
}

namespace {

struct FamilySpec {
  const char* name;
  std::size_t simplex_size;
  std::size_t count;
  const std::vector<int>* indices;
};

std::vector<FamilySpec> nonempty_families(const SimplicialFamilies& f) {
  std::vector<FamilySpec> out;
  if (!f.tetrahedra.empty()) out.push_back({"tetrahedra", 4, f.tetrahedra.size(), &f.h_indices});
  if (!f.triangles.empty()) out.push_back({"triangles", 3, f.triangles.size(), &f.r_indices});
  if (!f.edges.empty()) out.push_back({"edges", 2, f.edges.size(), &f.e_indices});
  return out;
}

std::size_t add_tensor(HcnnModel& m, std::string name, std::vector<std::size_t> shape) {
  std::size_t size = 1;
  for (auto d : shape) size *= d;
  m.tensors.push_back({std::move(name), std::move(shape), m.parameters.size(), size});
  m.parameters.resize(m.parameters.size() + size, 0.0);
  return m.tensors.size() - 1;
}

// Builds the layout with zero weights.
HcnnModel allocate(const SimplicialFamilies& families, const HcnnConfig& config, std::size_t input_dim) {
  config.validate();
  if (families.empty()) throw ConfigError("cannot compile: all simplicial families are empty");
  if (input_dim < families.index_bound()) {
    throw ConfigError(fmt::format("input_dim {} smaller than referenced feature count {}", input_dim,
                                  families.index_bound()));
  }
  HcnnModel m;
  m.config = config;
  m.families = families;
  m.input_dim = input_dim;
  const auto zeta = static_cast<std::size_t>(config.zeta);
  const auto xi = static_cast<std::size_t>(config.xi);
  for (const auto& spec : nonempty_families(families)) {
    FamilyPath p;
    p.family = spec.name;
    p.simplex_size = spec.simplex_size;
    p.simplex_count = spec.count;
    p.gather = *spec.indices;
    p.conv1_weight = add_tensor(m, fmt::format("{}.conv1.weight", spec.name), {zeta, spec.simplex_size});
    p.conv1_bias = add_tensor(m, fmt::format("{}.conv1.bias", spec.name), {zeta});
    p.conv2_weight = add_tensor(m, fmt::format("{}.conv2.weight", spec.name), {xi, zeta, spec.count});
    p.conv2_bias = add_tensor(m, fmt::format("{}.conv2.bias", spec.name), {xi});
    m.paths.push_back(std::move(p));
  }
  const auto classes = static_cast<std::size_t>(config.n_classes);
  m.head_weight = add_tensor(m, "head.weight", {classes, xi * m.paths.size()});
  m.head_bias = add_tensor(m, "head.bias", {classes});
  return m;
}

void fill_uniform(std::span<double> values, std::size_t fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (auto& v : values) v = rng.uniform(-bound, bound);
}

void require_finite(std::span<const double> values, const std::string& layer) {
  for (double v : values) {
    if (!std::isfinite(v)) throw NumericError(fmt::format("non-finite activation in layer '{}'", layer));
  }
}

void check_labels(std::span<const int> labels, std::size_t rows, int classes) {
  if (labels.size() != rows) {
    throw DataError(fmt::format("{} labels for a batch of {} rows", labels.size(), rows));
  }
  for (int y : labels) {
    if (y < 0 || y >= classes) throw DataError(fmt::format("label {} outside [0, {})", y, classes));
  }
}

// Per-unit inverted-dropout scale: 0 with probability p, else 1/(1-p).
void draw_mask(std::vector<double>& mask, double rate, bool active, Rng* rng) {
  if (!active || rate == 0.0) {
    std::fill(mask.begin(), mask.end(), 1.0);
    return;
  }
  const double scale = 1.0 / (1.0 - rate);
  for (auto& m : mask) m = rng->bernoulli(rate) ? 0.0 : scale;
}

}  // namespace

HcnnModel compile(const SimplicialFamilies& families, const HcnnConfig& config, std::size_t input_dim,
                  std::uint64_t seed) {
  HcnnModel m = allocate(families, config, input_dim);
  Rng rng(seed);
  const auto zeta = static_cast<std::size_t>(config.zeta);
  for (const auto& p : m.paths) {
    fill_uniform(m.view(p.conv1_weight), p.simplex_size, rng);
    fill_uniform(m.view(p.conv1_bias), p.simplex_size, rng);
    fill_uniform(m.view(p.conv2_weight), zeta * p.simplex_count, rng);
    fill_uniform(m.view(p.conv2_bias), zeta * p.simplex_count, rng);
  }
  const std::size_t head_fan_in = static_cast<std::size_t>(config.xi) * m.paths.size();
  fill_uniform(m.view(m.head_weight), head_fan_in, rng);
  fill_uniform(m.view(m.head_bias), head_fan_in, rng);
  return m;
}

std::size_t expected_param_count(const SimplicialFamilies& families, const HcnnConfig& config) {
  const auto zeta = static_cast<std::size_t>(config.zeta);
  const auto xi = static_cast<std::size_t>(config.xi);
  const auto classes = static_cast<std::size_t>(config.n_classes);
  std::size_t total = 0;
  const auto specs = nonempty_families(families);
  for (const auto& s : specs) total += zeta * s.simplex_size + zeta + xi * zeta * s.count + xi;
  return total + classes * xi * specs.size() + classes;
}

std::size_t param_count(const HcnnModel& model) { return model.parameters.size(); }

ForwardTrace forward_trace(const HcnnModel& model, const Matrix& batch, bool training, Rng* rng) {
  if (batch.cols() != model.input_dim) {
    throw DataError(fmt::format("batch has {} columns, model expects {}", batch.cols(), model.input_dim));
  }
  const bool dropout = training && model.config.dropout_rate > 0.0;
  if (dropout && rng == nullptr) throw ConfigError("training-mode forward needs a random generator");

  const std::size_t batch_size = batch.rows();
  const auto zeta = static_cast<std::size_t>(model.config.zeta);
  const auto xi = static_cast<std::size_t>(model.config.xi);
  const auto classes = static_cast<std::size_t>(model.config.n_classes);
  const std::size_t families = model.paths.size();

  ForwardTrace trace;
  trace.hidden = Matrix(batch_size, xi * families);
  trace.paths.resize(families);
  for (std::size_t f = 0; f < families; ++f) {
    const auto& p = model.paths[f];
    auto& pt = trace.paths[f];
    const std::size_t k1 = p.simplex_size;
    const std::size_t m = p.simplex_count;
    const auto w1 = model.view(p.conv1_weight);
    const auto b1 = model.view(p.conv1_bias);
    const auto w2 = model.view(p.conv2_weight);
    const auto b2 = model.view(p.conv2_bias);

    // 1st level: kernel = stride = k+1, so each simplex is its own window.
    pt.conv1_pre.assign(batch_size * zeta * m, 0.0);
    for (std::size_t b = 0; b < batch_size; ++b) {
      const auto x = batch.row(b);
      for (std::size_t z = 0; z < zeta; ++z) {
        double* out = &pt.conv1_pre[(b * zeta + z) * m];
        const double* wz = &w1[z * k1];
        for (std::size_t j = 0; j < m; ++j) {
          double acc = b1[z];
          const int* g = &p.gather[j * k1];
          for (std::size_t i = 0; i < k1; ++i) acc += wz[i] * x[static_cast<std::size_t>(g[i])];
          out[j] = acc;
        }
      }
    }
    require_finite(pt.conv1_pre, p.family + ".conv1");
    pt.conv1_mask.resize(pt.conv1_pre.size());
    draw_mask(pt.conv1_mask, model.config.dropout_rate, dropout, rng);
    pt.conv1_out.resize(pt.conv1_pre.size());
    for (std::size_t i = 0; i < pt.conv1_pre.size(); ++i) {
      pt.conv1_out[i] = std::max(0.0, pt.conv1_pre[i]) * pt.conv1_mask[i];
    }

    // 2nd level: one window spanning all m simplices over zeta channels.
    pt.conv2_pre.assign(batch_size * xi, 0.0);
    const std::size_t window = zeta * m;
    for (std::size_t b = 0; b < batch_size; ++b) {
      const double* a1 = &pt.conv1_out[b * window];
      for (std::size_t q = 0; q < xi; ++q) {
        const double* wq = &w2[q * window];
        double acc = b2[q];
        for (std::size_t i = 0; i < window; ++i) acc += wq[i] * a1[i];
        pt.conv2_pre[b * xi + q] = acc;
      }
    }
    require_finite(pt.conv2_pre, p.family + ".conv2");
    pt.conv2_mask.resize(pt.conv2_pre.size());
    draw_mask(pt.conv2_mask, model.config.dropout_rate, dropout, rng);
    pt.conv2_out.resize(pt.conv2_pre.size());
    for (std::size_t b = 0; b < batch_size; ++b) {
      for (std::size_t q = 0; q < xi; ++q) {
        const std::size_t i = b * xi + q;
        pt.conv2_out[i] = std::max(0.0, pt.conv2_pre[i]) * pt.conv2_mask[i];
        trace.hidden(b, f * xi + q) = pt.conv2_out[i];
      }
    }
  }

  const auto wh = model.view(model.head_weight);
  const auto bh = model.view(model.head_bias);
  const std::size_t width = xi * families;
  trace.logits = Matrix(batch_size, classes);
  for (std::size_t b = 0; b < batch_size; ++b) {
    const auto h = trace.hidden.row(b);
    for (std::size_t c = 0; c < classes; ++c) {
      double acc = bh[c];
      const double* wc = &wh[c * width];
      for (std::size_t i = 0; i < width; ++i) acc += wc[i] * h[i];
      trace.logits(b, c) = acc;
    }
  }
  require_finite(trace.logits.data(), "head");
  return trace;
}

Matrix forward(const HcnnModel& model, const Matrix& batch, bool training, Rng* rng) {
  return forward_trace(model, batch, training, rng).logits;
}

Matrix softmax(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (std::size_t b = 0; b < logits.rows(); ++b) {
    const auto row = logits.row(b);
    const double top = *std::max_element(row.begin(), row.end());
    double total = 0.0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      out(b, c) = std::exp(row[c] - top);
      total += out(b, c);
    }
    for (std::size_t c = 0; c < row.size(); ++c) out(b, c) /= total;
  }
  return out;
}

namespace {

double cross_entropy(const Matrix& logits, std::span<const int> labels) {
  double total = 0.0;
  for (std::size_t b = 0; b < logits.rows(); ++b) {
    const auto row = logits.row(b);
    const double top = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (double v : row) sum += std::exp(v - top);
    total += top + std::log(sum) - row[static_cast<std::size_t>(labels[b])];
  }
  return total / static_cast<double>(logits.rows());
}

}  // namespace

double evaluate_loss(const HcnnModel& model, const Matrix& batch, std::span<const int> labels) {
  check_labels(labels, batch.rows(), model.config.n_classes);
  if (batch.rows() == 0) throw DataError("loss over an empty batch");
  const double loss = cross_entropy(forward(model, batch, false, nullptr), labels);
  if (!std::isfinite(loss)) throw NumericError("non-finite loss");
  return loss;
}

LossAndGradients loss_and_gradients(const HcnnModel& model, const Matrix& batch, std::span<const int> labels,
                                    bool training, Rng* rng) {
  check_labels(labels, batch.rows(), model.config.n_classes);
  if (batch.rows() == 0) throw DataError("loss over an empty batch");
  const ForwardTrace trace = forward_trace(model, batch, training, rng);

  const std::size_t batch_size = batch.rows();
  const auto zeta = static_cast<std::size_t>(model.config.zeta);
  const auto xi = static_cast<std::size_t>(model.config.xi);
  const auto classes = static_cast<std::size_t>(model.config.n_classes);
  const std::size_t width = xi * model.paths.size();

  LossAndGradients result;
  result.loss = cross_entropy(trace.logits, labels);
  if (!std::isfinite(result.loss)) throw NumericError("non-finite loss");
  result.gradients.assign(model.parameters.size(), 0.0);
  auto grad_view = [&](std::size_t tensor) {
    return std::span<double>(result.gradients).subspan(model.tensors[tensor].offset, model.tensors[tensor].size);
  };

  // d loss / d logits = (softmax - onehot) / B
  Matrix dlogits = softmax(trace.logits);
  const double inv_b = 1.0 / static_cast<double>(batch_size);
  for (std::size_t b = 0; b < batch_size; ++b) {
    dlogits(b, static_cast<std::size_t>(labels[b])) -= 1.0;
    for (std::size_t c = 0; c < classes; ++c) dlogits(b, c) *= inv_b;
  }

  const auto wh = model.view(model.head_weight);
  auto gwh = grad_view(model.head_weight);
  auto gbh = grad_view(model.head_bias);
  Matrix dhidden(batch_size, width);
  for (std::size_t b = 0; b < batch_size; ++b) {
    const auto h = trace.hidden.row(b);
    auto dh = dhidden.row(b);
    for (std::size_t c = 0; c < classes; ++c) {
      const double d = dlogits(b, c);
      gbh[c] += d;
      double* gwc = &gwh[c * width];
      const double* wc = &wh[c * width];
      for (std::size_t i = 0; i < width; ++i) {
        gwc[i] += d * h[i];
        dh[i] += d * wc[i];
      }
    }
  }

  std::vector<double> dpre2;
  std::vector<double> dpre1;
  for (std::size_t f = 0; f < model.paths.size(); ++f) {
    const auto& p = model.paths[f];
    const auto& pt = trace.paths[f];
    const std::size_t k1 = p.simplex_size;
    const std::size_t m = p.simplex_count;
    const std::size_t window = zeta * m;
    const auto w2 = model.view(p.conv2_weight);
    auto gw1 = grad_view(p.conv1_weight);
    auto gb1 = grad_view(p.conv1_bias);
    auto gw2 = grad_view(p.conv2_weight);
    auto gb2 = grad_view(p.conv2_bias);

    dpre2.assign(batch_size * xi, 0.0);
    for (std::size_t b = 0; b < batch_size; ++b) {
      for (std::size_t q = 0; q < xi; ++q) {
        const std::size_t i = b * xi + q;
        dpre2[i] = pt.conv2_pre[i] > 0.0 ? dhidden(b, f * xi + q) * pt.conv2_mask[i] : 0.0;
      }
    }

    dpre1.assign(batch_size * window, 0.0);
    for (std::size_t b = 0; b < batch_size; ++b) {
      const double* a1 = &pt.conv1_out[b * window];
      double* da1 = &dpre1[b * window];
      for (std::size_t q = 0; q < xi; ++q) {
        const double d = dpre2[b * xi + q];
        if (d == 0.0) continue;
        gb2[q] += d;
        double* gwq = &gw2[q * window];
        const double* wq = &w2[q * window];
        for (std::size_t i = 0; i < window; ++i) {
          gwq[i] += d * a1[i];
          da1[i] += d * wq[i];
        }
      }
      for (std::size_t i = 0; i < window; ++i) {
        const std::size_t u = b * window + i;
        da1[i] = pt.conv1_pre[u] > 0.0 ? da1[i] * pt.conv1_mask[u] : 0.0;
      }
    }

    for (std::size_t b = 0; b < batch_size; ++b) {
      const auto x = batch.row(b);
      for (std::size_t z = 0; z < zeta; ++z) {
        const double* d = &dpre1[(b * zeta + z) * m];
        double* gwz = &gw1[z * k1];
        for (std::size_t j = 0; j < m; ++j) {
          if (d[j] == 0.0) continue;
          gb1[z] += d[j];
          const int* g = &p.gather[j * k1];
          for (std::size_t i = 0; i < k1; ++i) gwz[i] += d[j] * x[static_cast<std::size_t>(g[i])];
        }
      }
    }
  }
  return result;
}

std::vector<int> argmax_rows(const Matrix& logits) {
  std::vector<int> out(logits.rows(), 0);
  for (std::size_t b = 0; b < logits.rows(); ++b) {
    const auto row = logits.row(b);
    std::size_t best = 0;
    for (std::size_t c = 1; c < row.size(); ++c) {
      if (row[c] > row[best]) best = c;
    }
    out[b] = static_cast<int>(best);
  }
  return out;
}

std::vector<int> predict(const HcnnModel& model, const Matrix& batch) {
  return argmax_rows(forward(model, batch, false, nullptr));
}

void save_checkpoint(std::ostream& out, const HcnnModel& model) {
  nlohmann::json j;
  j["format"] = "homconv-hcnn";
  j["version"] = 1;
  j["config"] = {{"zeta", model.config.zeta},
                 {"xi", model.config.xi},
                 {"dropout_rate", model.config.dropout_rate},
                 {"n_classes", model.config.n_classes}};
  j["input_dim"] = model.input_dim;
  j["families"] = {{"tetrahedra", model.families.tetrahedra},
                   {"triangles", model.families.triangles},
                   {"edges", model.families.edges},
                   {"singletons", model.families.singletons}};
  auto& tensors = j["tensors"] = nlohmann::json::array();
  for (std::size_t t = 0; t < model.tensors.size(); ++t) {
    const auto values = model.view(t);
    tensors.push_back({{"name", model.tensors[t].name},
                       {"shape", model.tensors[t].shape},
                       {"values", std::vector<double>(values.begin(), values.end())}});
  }
  out << j.dump(1) << '\n';
}

HcnnModel load_checkpoint(std::istream& in) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("checkpoint is not valid JSON: {}", e.what()));
  }
  if (j.value("format", "") != "homconv-hcnn") throw DataError("not an HCNN checkpoint");
  try {
    HcnnConfig config;
    config.zeta = j.at("config").at("zeta").get<int>();
    config.xi = j.at("config").at("xi").get<int>();
    config.dropout_rate = j.at("config").at("dropout_rate").get<double>();
    config.n_classes = j.at("config").at("n_classes").get<int>();

    std::vector<Clique> cliques;
    const auto& fam = j.at("families");
    for (const char* key : {"tetrahedra", "triangles", "edges"}) {
      for (const auto& c : fam.at(key)) cliques.push_back(c.get<Clique>());
    }
    for (const auto& s : fam.at("singletons")) cliques.push_back({s.get<int>()});
    SimplicialFamilies families = build_families(cliques);

    HcnnModel m = allocate(families, config, j.at("input_dim").get<std::size_t>());
    const auto& tensors = j.at("tensors");
    if (tensors.size() != m.tensors.size()) throw DataError("checkpoint tensor count does not match topology");
    for (std::size_t t = 0; t < m.tensors.size(); ++t) {
      const auto& jt = tensors[t];
      if (jt.at("name").get<std::string>() != m.tensors[t].name ||
          jt.at("shape").get<std::vector<std::size_t>>() != m.tensors[t].shape) {
        throw DataError(fmt::format("checkpoint tensor {} does not match topology", t));
      }
      const auto values = jt.at("values").get<std::vector<double>>();
      if (values.size() != m.tensors[t].size) throw DataError("checkpoint tensor has wrong value count");
      std::copy(values.begin(), values.end(), m.view(t).begin());
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("malformed checkpoint: {}", e.what()));
  }
}

}  // namespace homconv
