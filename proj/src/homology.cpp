#include "homconv/homology.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <ostream>

#include "homconv/error.hpp"

namespace homconv {

namespace {

bool is_subset(const Clique& small, const Clique& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

void canonicalize(std::vector<Clique>& cliques) {
  for (auto& c : cliques) std::sort(c.begin(), c.end());
  std::sort(cliques.begin(), cliques.end());
  cliques.erase(std::unique(cliques.begin(), cliques.end()), cliques.end());
}

// Tomita-style pivoting: the pivot maximizes |P ∩ N(u)| over u in P ∪ X.
void bron_kerbosch(const AdjacencyMatrix& adj, Clique& r, std::vector<int> p, std::vector<int> x,
                   std::vector<Clique>& out) {
  if (p.empty()) {
    if (x.empty()) out.push_back(r);
    return;
  }
  int pivot = -1;
  std::size_t pivot_hits = 0;
  for (const auto* set : {&p, &x}) {
    for (int u : *set) {
      std::size_t hits = 0;
      for (int w : p) hits += adj.has_edge(static_cast<std::size_t>(u), static_cast<std::size_t>(w)) ? 1 : 0;
      if (pivot < 0 || hits > pivot_hits) {
        pivot = u;
        pivot_hits = hits;
      }
    }
  }
  std::vector<int> branch;
  for (int v : p) {
    if (!adj.has_edge(static_cast<std::size_t>(pivot), static_cast<std::size_t>(v))) branch.push_back(v);
  }
  for (int v : branch) {
    const auto vi = static_cast<std::size_t>(v);
    std::vector<int> p_next;
    std::vector<int> x_next;
    for (int w : p) {
      if (adj.has_edge(vi, static_cast<std::size_t>(w))) p_next.push_back(w);
    }
    for (int w : x) {
      if (adj.has_edge(vi, static_cast<std::size_t>(w))) x_next.push_back(w);
    }
    r.push_back(v);
    bron_kerbosch(adj, r, std::move(p_next), std::move(x_next), out);
    r.pop_back();
    p.erase(std::find(p.begin(), p.end(), v));
    x.push_back(v);
  }
}

}  // namespace

std::vector<Clique> maximal_cliques_bron_kerbosch(const AdjacencyMatrix& adj) {
  std::vector<Clique> out;
  std::vector<int> p(adj.size());
  for (std::size_t v = 0; v < adj.size(); ++v) p[v] = static_cast<int>(v);
  Clique r;
  bron_kerbosch(adj, r, std::move(p), {}, out);
  canonicalize(out);
  return out;
}

std::vector<Clique> maximal_cliques_chordal(const AdjacencyMatrix& adj) {
  const std::size_t n = adj.size();
  const auto order = maximum_cardinality_search(adj);
  if (!is_perfect_elimination_ordering(adj, order)) {
    throw DataError("graph is not chordal; perfect elimination ordering does not exist");
  }
  std::vector<std::size_t> position(n);
  for (std::size_t i = 0; i < n; ++i) position[static_cast<std::size_t>(order[i])] = i;

  std::vector<Clique> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = static_cast<std::size_t>(order[i]);
    Clique c{order[i]};
    for (std::size_t u = 0; u < n; ++u) {
      if (u != v && adj.has_edge(v, u) && position[u] > i) c.push_back(static_cast<int>(u));
    }
    std::sort(c.begin(), c.end());
    candidates.push_back(std::move(c));
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Clique& a, const Clique& b) { return a.size() > b.size(); });
  std::vector<Clique> kept;
  for (auto& c : candidates) {
    const bool covered = std::any_of(kept.begin(), kept.end(), [&](const Clique& k) { return is_subset(c, k); });
    if (!covered) kept.push_back(std::move(c));
  }
  canonicalize(kept);
  return kept;
}

std::vector<Clique> maximal_cliques(const FilteredGraph& graph) {
  if (graph.chordal_guaranteed && is_chordal(graph.adjacency)) return maximal_cliques_chordal(graph.adjacency);
  return maximal_cliques_bron_kerbosch(graph.adjacency);
}

std::size_t SimplicialFamilies::index_bound() const {
  int top = -1;
  for (const auto* v : {&h_indices, &r_indices, &e_indices}) {
    for (int i : *v) top = std::max(top, i);
  }
  return static_cast<std::size_t>(top + 1);
}

SimplicialFamilies build_families(std::span<const Clique> cliques) {
  if (cliques.empty()) throw DataError("build_families: empty clique set");
  SimplicialFamilies f;
  for (const auto& raw : cliques) {
    Clique c = raw;
    std::sort(c.begin(), c.end());
    switch (c.size()) {
      case 0:
        break;
      case 1:
        f.singletons.push_back(c[0]);
        break;
      case 2:
        f.edges.push_back({c[0], c[1]});
        break;
      case 3:
        f.triangles.push_back({c[0], c[1], c[2]});
        break;
      default:
        for (std::size_t w = 0; w + 4 <= c.size(); ++w) f.tetrahedra.push_back({c[w], c[w + 1], c[w + 2], c[w + 3]});
        break;
    }
  }
  auto tidy = [](auto& list) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  };
  tidy(f.tetrahedra);
  tidy(f.triangles);
  tidy(f.edges);
  tidy(f.singletons);
  for (const auto& t : f.tetrahedra) f.h_indices.insert(f.h_indices.end(), t.begin(), t.end());
  for (const auto& t : f.triangles) f.r_indices.insert(f.r_indices.end(), t.begin(), t.end());
  for (const auto& e : f.edges) f.e_indices.insert(f.e_indices.end(), e.begin(), e.end());
  return f;
}

SimplicialFamilies families_from_graph(const FilteredGraph& graph) {
  const auto cliques = maximal_cliques(graph);
  auto families = build_families(cliques);
  if (!families.singletons.empty()) {
    spdlog::warn("dropping {} isolated feature(s) from the network input: {}", families.singletons.size(),
                 fmt::join(families.singletons, ", "));
  }
  return families;
}

void write_families(std::ostream& out, const SimplicialFamilies& f) {
  out << fmt::format("tetrahedra {}\n", f.tetrahedra.size());
  for (const auto& t : f.tetrahedra) out << fmt::format("  {} {} {} {}\n", t[0], t[1], t[2], t[3]);
  out << fmt::format("triangles {}\n", f.triangles.size());
  for (const auto& t : f.triangles) out << fmt::format("  {} {} {}\n", t[0], t[1], t[2]);
  out << fmt::format("edges {}\n", f.edges.size());
  for (const auto& e : f.edges) out << fmt::format("  {} {}\n", e[0], e[1]);
  out << fmt::format("singletons {}\n", f.singletons.size());
  for (int s : f.singletons) out << fmt::format("  {}\n", s);
}

}  // namespace homconv
