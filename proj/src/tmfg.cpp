#include "homconv/tmfg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "homconv/error.hpp"

namespace homconv {

std::string_view to_string(Construction construction) {
  return construction == Construction::kMeanSimMatrix ? "mean_sim_matrix" : "bootstrap_net";
}

namespace {

constexpr std::size_t kExhaustiveSeedLimit = 15;

double face_gain(const SimilarityMatrix& s, int v, const Triangle& face) {
  const auto vi = static_cast<std::size_t>(v);
  return s(vi, static_cast<std::size_t>(face[0])) + s(vi, static_cast<std::size_t>(face[1])) +
         s(vi, static_cast<std::size_t>(face[2]));
}

Triangle sorted(Triangle t) {
  std::sort(t.begin(), t.end());
  return t;
}

double seed_score(const SimilarityMatrix& s, const Tetrahedron& q) {
  double total = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) {
      total += s(static_cast<std::size_t>(q[i]), static_cast<std::size_t>(q[j]));
    }
  }
  return total;
}

// Best remaining vertex for a face; ties go to the smallest vertex.
struct FaceCandidate {
  Triangle face{};
  int best_vertex = -1;
  double best_gain = -std::numeric_limits<double>::infinity();
};

void rescore(FaceCandidate& fc, const SimilarityMatrix& s, const std::vector<bool>& remaining) {
  fc.best_vertex = -1;
  fc.best_gain = -std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < remaining.size(); ++v) {
    if (!remaining[v]) continue;
    const double g = face_gain(s, static_cast<int>(v), fc.face);
    if (g > fc.best_gain) {
      fc.best_gain = g;
      fc.best_vertex = static_cast<int>(v);
    }
  }
}

FilteredGraph degenerate_graph(const SimilarityMatrix& s) {
  const std::size_t n = s.size();
  FilteredGraph g;
  g.n = n;
  g.adjacency = AdjacencyMatrix(n);
  g.construction = Construction::kMeanSimMatrix;
  g.chordal_guaranteed = true;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      g.adjacency.add_edge(a, b);
      g.total_gain += s(a, b);
    }
  }
  if (n == 3) g.triangles.push_back({0, 1, 2});
  return g;
}

}  // namespace

Tetrahedron select_seed_tetrahedron(const SimilarityMatrix& s) {
  const std::size_t n = s.size();
  if (n < 4) throw DataError(fmt::format("seed tetrahedron needs n >= 4, got {}", n));

  std::vector<int> candidates(n);
  std::iota(candidates.begin(), candidates.end(), 0);
  if (n > kExhaustiveSeedLimit) {
    std::vector<double> row_sum(n, 0.0);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (a != b) row_sum[a] += s(a, b);
      }
    }
    std::stable_sort(candidates.begin(), candidates.end(), [&](int a, int b) {
      return row_sum[static_cast<std::size_t>(a)] > row_sum[static_cast<std::size_t>(b)];
    });
    candidates.resize(kExhaustiveSeedLimit);
    std::sort(candidates.begin(), candidates.end());
  }

  const std::size_t m = candidates.size();
  Tetrahedron best{};
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      for (std::size_t k = j + 1; k < m; ++k) {
        for (std::size_t l = k + 1; l < m; ++l) {
          const Tetrahedron q{candidates[i], candidates[j], candidates[k], candidates[l]};
          const double score = seed_score(s, q);
          if (score > best_score) {
            best_score = score;
            best = q;
          }
        }
      }
    }
  }
  return best;
}

FilteredGraph build_tmfg(const SimilarityMatrix& similarity) {
  const std::size_t n = similarity.size();
  if (n == 0) throw DataError("cannot build a TMFG on zero vertices");
  if (n < 4) return degenerate_graph(similarity);

  FilteredGraph g;
  g.n = n;
  g.adjacency = AdjacencyMatrix(n);
  g.construction = Construction::kMeanSimMatrix;
  g.chordal_guaranteed = true;

  const Tetrahedron seed = select_seed_tetrahedron(similarity);
  g.tetrahedra.push_back(seed);
  g.total_gain = seed_score(similarity, seed);

  std::vector<bool> remaining(n, true);
  for (int v : seed) remaining[static_cast<std::size_t>(v)] = false;

  std::vector<FaceCandidate> faces;
  for (const Triangle& t : {Triangle{seed[0], seed[1], seed[2]}, Triangle{seed[0], seed[1], seed[3]},
                            Triangle{seed[0], seed[2], seed[3]}, Triangle{seed[1], seed[2], seed[3]}}) {
    FaceCandidate fc{t};
    rescore(fc, similarity, remaining);
    faces.push_back(fc);
  }

  for (std::size_t step = 0; step + 4 < n; ++step) {
    // Highest gain; ties to the smallest face, then the smallest vertex.
    std::size_t chosen = 0;
    for (std::size_t f = 1; f < faces.size(); ++f) {
      const auto& a = faces[f];
      const auto& b = faces[chosen];
      if (a.best_gain > b.best_gain ||
          (a.best_gain == b.best_gain &&
           std::tie(a.face, a.best_vertex) < std::tie(b.face, b.best_vertex))) {
        chosen = f;
      }
    }
    const Triangle face = faces[chosen].face;
    const int v = faces[chosen].best_vertex;
    const double gain = faces[chosen].best_gain;

    remaining[static_cast<std::size_t>(v)] = false;
    Tetrahedron tet{face[0], face[1], face[2], v};
    std::sort(tet.begin(), tet.end());
    g.tetrahedra.push_back(tet);
    g.separators.push_back(face);
    g.insertions.push_back({v, face, gain});
    g.total_gain += gain;

    faces.erase(faces.begin() + static_cast<std::ptrdiff_t>(chosen));
    for (auto& fc : faces) {
      if (fc.best_vertex == v) rescore(fc, similarity, remaining);
    }
    for (const Triangle& t : {sorted({face[0], face[1], v}), sorted({face[0], face[2], v}),
                              sorted({face[1], face[2], v})}) {
      FaceCandidate fc{t};
      rescore(fc, similarity, remaining);
      faces.push_back(fc);
    }
  }

  for (const auto& fc : faces) g.triangles.push_back(fc.face);
  std::sort(g.triangles.begin(), g.triangles.end());
  for (const auto& tet : g.tetrahedra) {
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = i + 1; j < 4; ++j) {
        g.adjacency.add_edge(static_cast<std::size_t>(tet[i]), static_cast<std::size_t>(tet[j]));
      }
    }
  }
  return g;
}

std::size_t EdgeFrequencyTable::index(std::size_t a, std::size_t b) const {
  if (a > b) std::swap(a, b);
  // row-major upper triangle without diagonal
  return a * n_ - a * (a + 1) / 2 + (b - a - 1);
}

std::uint32_t EdgeFrequencyTable::count(std::size_t a, std::size_t b) const {
  if (a == b) return 0;
  return counts_[index(a, b)];
}

void EdgeFrequencyTable::add(const FilteredGraph& graph) {
  if (graph.n != n_) {
    throw DataError(fmt::format("replica graph has {} vertices, table has {}", graph.n, n_));
  }
  for (const auto& [a, b] : graph.adjacency.edges()) ++counts_[index(static_cast<std::size_t>(a), static_cast<std::size_t>(b))];
  ++replica_count_;
}

void EdgeFrequencyTable::merge(const EdgeFrequencyTable& other) {
  if (other.n_ != n_) throw DataError("merging frequency tables of different sizes");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  replica_count_ += other.replica_count_;
}

EdgeFrequencyTable count_edges(std::span<const FilteredGraph> replicas) {
  if (replicas.empty()) throw DataError("count_edges needs at least one replica");
  EdgeFrequencyTable table(replicas.front().n);
  for (const auto& g : replicas) table.add(g);
  return table;
}

FilteredGraph bootstrap_net(const EdgeFrequencyTable& table, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw ConfigError(fmt::format("threshold {} outside (0, 1]", threshold));
  }
  if (table.replica_count() == 0) throw ConfigError("frequency table has no replicas");
  const std::size_t n = table.size();
  FilteredGraph g;
  g.n = n;
  g.adjacency = AdjacencyMatrix(n);
  g.construction = Construction::kBootstrapNet;
  g.chordal_guaranteed = false;
  g.total_gain = 0.0;
  const double r = static_cast<double>(table.replica_count());
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (static_cast<double>(table.count(a, b)) / r >= threshold) g.adjacency.add_edge(a, b);
    }
  }
  return g;
}

EdgeFrequencyTable bootstrap_edge_frequencies(const Matrix& features, const BootstrapSpec& spec) {
  if (spec.replica_count == 0) throw ConfigError("replica_count must be >= 1");
  EdgeFrequencyTable table(features.cols());
  for (std::size_t i = 0; i < spec.replica_count; ++i) {
    table.add(build_tmfg(bootstrap_replica(features, replica_seed(spec.master_seed, i), spec.method)));
  }
  return table;
}

bool StructureReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

void write_edge_list(std::ostream& out, const FilteredGraph& graph, const SimilarityMatrix* similarity) {
  out << "# n=" << graph.n << " construction=" << to_string(graph.construction) << '\n';
  for (const auto& [a, b] : graph.adjacency.edges()) {
    const double w = similarity ? (*similarity)(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) : 1.0;
    out << a << ' ' << b << ' ' << fmt::format("{}", w) << '\n';
  }
}

FilteredGraph read_edge_list(std::istream& in) {
  FilteredGraph g;
  std::vector<std::pair<int, int>> edges;
  bool have_n = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::istringstream hs(line.substr(1));
      std::string token;
      while (hs >> token) {
        if (token.starts_with("n=")) {
          g.n = static_cast<std::size_t>(std::stoul(token.substr(2)));
          have_n = true;
        } else if (token == "construction=bootstrap_net") {
          g.construction = Construction::kBootstrapNet;
          g.chordal_guaranteed = false;
        } else if (token == "construction=mean_sim_matrix") {
          g.construction = Construction::kMeanSimMatrix;
          g.chordal_guaranteed = true;
        }
      }
      continue;
    }
    std::istringstream ls(line);
    int a = 0;
    int b = 0;
    double w = 0.0;
    if (!(ls >> a >> b >> w) || a < 0 || b < 0) {
      throw DataError(fmt::format("edge list line {}: expected 'u v weight'", line_no));
    }
    edges.emplace_back(a, b);
  }
  if (!have_n) {
    for (const auto& [a, b] : edges) g.n = std::max(g.n, static_cast<std::size_t>(std::max(a, b)) + 1);
  }
  g.adjacency = AdjacencyMatrix(g.n);
  for (const auto& [a, b] : edges) {
    if (static_cast<std::size_t>(std::max(a, b)) >= g.n) throw DataError("edge list vertex out of range");
    g.adjacency.add_edge(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
  }
  return g;
}

}  // namespace homconv
