#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "homconv/graph.hpp"
#include "homconv/similarity.hpp"

namespace homconv {

using Triangle = std::array<int, 3>;
using Tetrahedron = std::array<int, 4>;

enum class Construction { kMeanSimMatrix, kBootstrapNet };

std::string_view to_string(Construction construction);

/// One greedy step of the TMFG growth: `vertex` attached to face `face`.
struct Insertion {
  int vertex = 0;
  Triangle face{};
  double gain = 0.0;

  friend bool operator==(const Insertion&, const Insertion&) = default;
};

/// Filtered graph plus the bookkeeping of its construction.
struct FilteredGraph {
  std::size_t n = 0;
  AdjacencyMatrix adjacency;
  std::vector<Tetrahedron> tetrahedra;  // insertion order; [0] is the seed
  std::vector<Triangle> triangles;      // final face set, lexicographic
  std::vector<Triangle> separators;     // insertion order
  std::vector<Insertion> insertions;    // one per separator
  double total_gain = 0.0;
  Construction construction = Construction::kMeanSimMatrix;
  bool chordal_guaranteed = true;

  friend bool operator==(const FilteredGraph&, const FilteredGraph&) = default;
};

/// Seed tetrahedron: the 4-set with the largest sum of its six pairwise
/// similarities. Exhaustive for n <= 15, otherwise over the 15 vertices with
/// the largest off-diagonal row sums. Ties resolve to the lexicographically
/// smallest 4-tuple.
Tetrahedron select_seed_tetrahedron(const SimilarityMatrix& similarity);

/// Greedy TMFG. Each step attaches the remaining vertex to the face that
/// maximizes the sum of its similarities to the three face vertices; ties
/// resolve to the lexicographically smallest (face, vertex). n < 4 returns
/// the complete graph (n = 1: a single isolated vertex).
FilteredGraph build_tmfg(const SimilarityMatrix& similarity);

/// Per-pair edge counts over a stream of replica graphs.
class EdgeFrequencyTable {
 public:
  EdgeFrequencyTable() = default;
  explicit EdgeFrequencyTable(std::size_t n) : n_(n), counts_(n * (n - (n > 0 ? 1 : 0)) / 2, 0) {}

  std::size_t size() const { return n_; }
  std::size_t replica_count() const { return replica_count_; }
  std::uint32_t count(std::size_t a, std::size_t b) const;

  void add(const FilteredGraph& graph);
  /// Commutative merge of another table over the same n.
  void merge(const EdgeFrequencyTable& other);

  friend bool operator==(const EdgeFrequencyTable&, const EdgeFrequencyTable&) = default;

 private:
  std::size_t index(std::size_t a, std::size_t b) const;

  std::size_t n_ = 0;
  std::size_t replica_count_ = 0;
  std::vector<std::uint32_t> counts_;
};

EdgeFrequencyTable count_edges(std::span<const FilteredGraph> replicas);

/// Keeps edge (a, b) iff count(a, b) / r >= threshold; threshold in (0, 1].
FilteredGraph bootstrap_net(const EdgeFrequencyTable& table, double threshold);

/// Frequency table of the TMFGs of `spec.replica_count` bootstrap replicas.
EdgeFrequencyTable bootstrap_edge_frequencies(const Matrix& features, const BootstrapSpec& spec);

struct StructureCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct StructureReport {
  std::vector<StructureCheck> checks;
  bool all_passed() const;
};

/// Checks the structural invariants implied by the graph's construction.
StructureReport verify_structure(const FilteredGraph& graph);

/// "u v weight" per edge; weight is the similarity when given, else 1.
/// A leading "# n=<n> construction=<name>" comment carries the vertex count.
void write_edge_list(std::ostream& out, const FilteredGraph& graph, const SimilarityMatrix* similarity = nullptr);
/// Reads write_edge_list output. Construction lists are left empty.
FilteredGraph read_edge_list(std::istream& in);

}  // namespace homconv
