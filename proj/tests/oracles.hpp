#pragma once
// Independent reference computations shared by the unit and acceptance tests.
// Nothing here calls the library routine it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "homconv/graph.hpp"
#include "homconv/homology.hpp"
#include "homconv/net.hpp"
#include "homconv/rng.hpp"
#include "homconv/similarity.hpp"

namespace homconv::oracle {

inline SimilarityMatrix random_similarity(std::size_t n, Rng& rng) {
  Matrix m(n, n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    m(a, a) = 1.0;
    for (std::size_t b = a + 1; b < n; ++b) m(a, b) = m(b, a) = rng.uniform();
  }
  return {m, CorrelationMethod::kPearson};
}

inline AdjacencyMatrix random_graph(std::size_t n, double p, Rng& rng) {
  AdjacencyMatrix adj(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (rng.bernoulli(p)) adj.add_edge(a, b);
    }
  }
  return adj;
}

/// Maximal cliques by enumerating every vertex subset.
inline std::vector<Clique> brute_force_maximal_cliques(const AdjacencyMatrix& adj) {
  const std::size_t n = adj.size();
  std::vector<Clique> out;
  auto is_clique = [&](std::uint32_t mask) {
    for (std::size_t a = 0; a < n; ++a) {
      if (!(mask >> a & 1U)) continue;
      for (std::size_t b = a + 1; b < n; ++b) {
        if ((mask >> b & 1U) && !adj.has_edge(a, b)) return false;
      }
    }
    return true;
  };
  for (std::uint32_t mask = 1; mask < (1U << n); ++mask) {
    if (!is_clique(mask)) continue;
    bool maximal = true;
    for (std::size_t v = 0; v < n && maximal; ++v) {
      if (!(mask >> v & 1U) && is_clique(mask | (1U << v))) maximal = false;
    }
    if (!maximal) continue;
    Clique c;
    for (std::size_t v = 0; v < n; ++v) {
      if (mask >> v & 1U) c.push_back(static_cast<int>(v));
    }
    out.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Pearson correlation squared, straight from the textbook definition.
inline double squared_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy * sxy / (sxx * syy);
}

struct MetricValues {
  double accuracy;
  double macro_f1;
  double mcc;  // binary only
};

/// Binary metrics via TP/TN/FP/FN, class 1 positive.
inline MetricValues binary_metrics(double tn, double fp, double fn, double tp) {
  const double total = tn + fp + fn + tp;
  auto f1 = [](double t, double f_pos, double f_neg) {
    return 2 * t + f_pos + f_neg > 0 ? 2 * t / (2 * t + f_pos + f_neg) : 0.0;
  };
  const double denom = std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
  return {(tp + tn) / total, (f1(tp, fp, fn) + f1(tn, fn, fp)) / 2.0,
          denom > 0 ? (tp * tn - fp * fn) / denom : 0.0};
}

struct GradientCheck {
  std::size_t checked = 0;
  std::size_t failures = 0;
  double worst = 0.0;
};

/// Central finite differences of the inference-mode loss against the
/// analytic gradient. Relative error uses a 1e-4 floor on the scale.
inline GradientCheck check_gradients(const HcnnModel& model, const Matrix& batch, const std::vector<int>& labels,
                                     double h = 1e-5, double tolerance = 1e-4) {
  GradientCheck result;
  const auto analytic = loss_and_gradients(model, batch, labels, false, nullptr).gradients;
  HcnnModel probe = model;
  for (std::size_t i = 0; i < probe.parameters.size(); ++i) {
    const double saved = probe.parameters[i];
    probe.parameters[i] = saved + h;
    const double up = evaluate_loss(probe, batch, labels);
    probe.parameters[i] = saved - h;
    const double down = evaluate_loss(probe, batch, labels);
    probe.parameters[i] = saved;
    const double numeric = (up - down) / (2 * h);
    const double scale = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-4});
    const double rel = std::abs(analytic[i] - numeric) / scale;
    result.worst = std::max(result.worst, rel);
    ++result.checked;
    if (rel > tolerance) ++result.failures;
  }
  return result;
}

/// Smallest |pre-activation| over all ReLU units for `batch`. Finite
/// differences are only meaningful away from the ReLU kink.
inline double relu_margin(const HcnnModel& model, const Matrix& batch) {
  const auto trace = forward_trace(model, batch, false, nullptr);
  double margin = INFINITY;
  for (const auto& p : trace.paths) {
    for (double v : p.conv1_pre) margin = std::min(margin, std::abs(v));
    for (double v : p.conv2_pre) margin = std::min(margin, std::abs(v));
  }
  return margin;
}

struct GradientInstance {
  HcnnModel model;
  Matrix batch;
  std::vector<int> labels;
};

/// Random cliques over n features, random config with dropout off, and a
/// batch whose pre-activations all sit at least `margin` from zero.
inline GradientInstance random_gradient_instance(std::uint64_t seed, double margin = 1e-3) {
  Rng rng(seed);
  const std::size_t n = 4 + rng.uniform_index(9);
  std::vector<Clique> cliques;
  const std::size_t count = 1 + rng.uniform_index(6);
  for (std::size_t c = 0; c < count; ++c) {
    const std::size_t size = 2 + rng.uniform_index(3);
    std::vector<int> pool(n);
    for (std::size_t v = 0; v < n; ++v) pool[v] = static_cast<int>(v);
    rng.shuffle(std::span<int>(pool));
    cliques.emplace_back(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size));
  }
  HcnnConfig cfg;
  cfg.zeta = 1 + static_cast<int>(rng.uniform_index(6));
  cfg.xi = 1 + static_cast<int>(rng.uniform_index(8));
  cfg.n_classes = 2 + static_cast<int>(rng.uniform_index(3));
  cfg.dropout_rate = 0.0;
  GradientInstance inst{compile(build_families(cliques), cfg, n, rng()), Matrix(), {}};
  const std::size_t rows = 1 + rng.uniform_index(8);
  for (int attempt = 0;; ++attempt) {
    inst.batch = Matrix(rows, n);
    for (auto& v : inst.batch.data()) v = rng.uniform(-2.0, 2.0);
    if (relu_margin(inst.model, inst.batch) >= margin || attempt > 1000) break;
  }
  for (std::size_t r = 0; r < rows; ++r) inst.labels.push_back(static_cast<int>(rng.uniform_index(cfg.n_classes)));
  return inst;
}

}  // namespace homconv::oracle
