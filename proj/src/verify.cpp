#include <fmt/format.h>

#include <algorithm>

#include "homconv/homology.hpp"
#include "homconv/tmfg.hpp"

namespace homconv {

namespace {

StructureCheck expect_count(std::string name, std::size_t actual, std::size_t expected) {
  return {std::move(name), actual == expected, fmt::format("{} (expected {})", actual, expected)};
}

}  // namespace

StructureReport verify_structure(const FilteredGraph& graph) {
  StructureReport report;
  const auto& adj = graph.adjacency;
  const std::size_t n = graph.n;
  const bool shape_ok = adj.size() == n;
  report.checks.push_back({"adjacency_shape", shape_ok, fmt::format("{} x {} for n={}", adj.size(), adj.size(), n)});
  if (!shape_ok) return report;
  report.checks.push_back({"symmetric", adj.is_symmetric(), ""});
  report.checks.push_back({"zero_diagonal", adj.has_zero_diagonal(), ""});

  if (graph.construction == Construction::kBootstrapNet) {
    const bool lists_empty = graph.tetrahedra.empty() && graph.triangles.empty() && graph.separators.empty();
    report.checks.push_back({"construction_lists_empty", lists_empty, ""});
    report.checks.push_back({"chordal_not_guaranteed", !graph.chordal_guaranteed, ""});
    return report;
  }

  if (n < 4) {
    report.checks.push_back(expect_count("edge_count", adj.edge_count(), n * (n - 1) / 2));
    return report;
  }

  report.checks.push_back(expect_count("edge_count", adj.edge_count(), 3 * n - 6));
  // Construction lists are absent for graphs read back from an edge list.
  const bool has_log = !graph.tetrahedra.empty() || !graph.triangles.empty();
  if (has_log) {
    report.checks.push_back(expect_count("tetrahedra_count", graph.tetrahedra.size(), n - 3));
    report.checks.push_back(expect_count("separator_count", graph.separators.size(), n - 4));
    report.checks.push_back(expect_count("triangle_count", graph.triangles.size(), 2 * n - 4));
  }
  const bool chordal = is_chordal(adj);
  report.checks.push_back({"chordal", chordal, chordal ? "perfect elimination ordering found" : "no PEO"});
  report.checks.push_back({"planar", is_planar(adj), ""});

  const auto cliques = maximal_cliques_bron_kerbosch(adj);
  const auto bad = std::count_if(cliques.begin(), cliques.end(), [](const Clique& c) { return c.size() != 4; });
  report.checks.push_back({"maximal_cliques_size_4", bad == 0,
                           fmt::format("{} of {} maximal cliques have size != 4", bad, cliques.size())});
  return report;
}

}  // namespace homconv
