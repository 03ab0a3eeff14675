#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "homconv/graph.hpp"
#include "homconv/tmfg.hpp"

namespace homconv {

using Clique = std::vector<int>;

/// All maximal cliques, each sorted ascending, list sorted lexicographically.
/// Isolated vertices are size-1 cliques. Graphs flagged chordal are handled
/// by perfect-elimination-ordering extraction (falling back when the flag
/// turns out to be wrong), all others by pivoted Bron-Kerbosch.
std::vector<Clique> maximal_cliques(const FilteredGraph& graph);

/// Same, for a bare adjacency.
std::vector<Clique> maximal_cliques_chordal(const AdjacencyMatrix& adj);
std::vector<Clique> maximal_cliques_bron_kerbosch(const AdjacencyMatrix& adj);

/// Maximal cliques grouped by size into the three simplicial families
/// consumed by the network (H: tetrahedra, R: triangles, E: edges) plus the
/// isolated vertices, which the network ignores.
struct SimplicialFamilies {
  std::vector<std::array<int, 4>> tetrahedra;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 2>> edges;
  std::vector<int> singletons;
  std::vector<int> h_indices;
  std::vector<int> r_indices;
  std::vector<int> e_indices;

  bool empty() const { return tetrahedra.empty() && triangles.empty() && edges.empty(); }
  /// Largest feature index referenced plus one (0 when empty).
  std::size_t index_bound() const;

  friend bool operator==(const SimplicialFamilies&, const SimplicialFamilies&) = default;
};

/// Sorts cliques into families. A clique of size s > 4 becomes the s - 3
/// width-4 windows over its sorted vertex list.
SimplicialFamilies build_families(std::span<const Clique> cliques);

/// maximal_cliques followed by build_families; logs dropped singletons.
SimplicialFamilies families_from_graph(const FilteredGraph& graph);

/// Human-readable audit listing of each family.
void write_families(std::ostream& out, const SimplicialFamilies& families);

}  // namespace homconv
