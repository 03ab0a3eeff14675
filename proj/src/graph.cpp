#include "homconv/graph.hpp"

#include <algorithm>
#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/boyer_myrvold_planar_test.hpp>

namespace homconv {

std::size_t AdjacencyMatrix::edge_count() const {
  std::size_t count = 0;
  for (std::size_t a = 0; a < n_; ++a) {
    for (std::size_t b = a + 1; b < n_; ++b) count += has_edge(a, b) ? 1 : 0;
  }
  return count;
}

std::size_t AdjacencyMatrix::degree(std::size_t v) const {
  std::size_t d = 0;
  for (std::size_t u = 0; u < n_; ++u) d += (u != v && has_edge(v, u)) ? 1 : 0;
  return d;
}

std::vector<int> AdjacencyMatrix::neighbors(std::size_t v) const {
  std::vector<int> out;
  for (std::size_t u = 0; u < n_; ++u) {
    if (u != v && has_edge(v, u)) out.push_back(static_cast<int>(u));
  }
  return out;
}

bool AdjacencyMatrix::is_symmetric() const {
  for (std::size_t a = 0; a < n_; ++a) {
    for (std::size_t b = a + 1; b < n_; ++b) {
      if (has_edge(a, b) != has_edge(b, a)) return false;
    }
  }
  return true;
}

bool AdjacencyMatrix::has_zero_diagonal() const {
  for (std::size_t a = 0; a < n_; ++a) {
    if (has_edge(a, a)) return false;
  }
  return true;
}

std::vector<std::pair<int, int>> AdjacencyMatrix::edges() const {
  std::vector<std::pair<int, int>> out;
  for (std::size_t a = 0; a < n_; ++a) {
    for (std::size_t b = a + 1; b < n_; ++b) {
      if (has_edge(a, b)) out.emplace_back(static_cast<int>(a), static_cast<int>(b));
    }
  }
  return out;
}

std::vector<int> maximum_cardinality_search(const AdjacencyMatrix& adj) {
  const std::size_t n = adj.size();
  std::vector<int> weight(n, 0);
  std::vector<bool> visited(n, false);
  std::vector<int> order;
  order.reserve(n);
  for (std::size_t step = 0; step < n; ++step) {
    int best = -1;
    for (std::size_t v = 0; v < n; ++v) {
      if (!visited[v] && (best < 0 || weight[v] > weight[static_cast<std::size_t>(best)])) {
        best = static_cast<int>(v);
      }
    }
    const auto b = static_cast<std::size_t>(best);
    visited[b] = true;
    order.push_back(best);
    for (std::size_t u = 0; u < n; ++u) {
      if (!visited[u] && adj.has_edge(b, u)) ++weight[u];
    }
  }
  std::reverse(order.begin(), order.end());
  return order;
}

bool is_perfect_elimination_ordering(const AdjacencyMatrix& adj, const std::vector<int>& order) {
  const std::size_t n = adj.size();
  if (order.size() != n) return false;
  std::vector<std::size_t> position(n);
  for (std::size_t i = 0; i < n; ++i) position[static_cast<std::size_t>(order[i])] = i;
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = static_cast<std::size_t>(order[i]);
    std::vector<std::size_t> later;
    for (std::size_t u = 0; u < n; ++u) {
      if (u != v && adj.has_edge(v, u) && position[u] > i) later.push_back(u);
    }
    for (std::size_t x = 0; x < later.size(); ++x) {
      for (std::size_t y = x + 1; y < later.size(); ++y) {
        if (!adj.has_edge(later[x], later[y])) return false;
      }
    }
  }
  return true;
}

bool is_chordal(const AdjacencyMatrix& adj) {
  return is_perfect_elimination_ordering(adj, maximum_cardinality_search(adj));
}

bool is_planar(const AdjacencyMatrix& adj) {
  using Graph = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS>;
  Graph g(adj.size());
  for (const auto& [a, b] : adj.edges()) boost::add_edge(static_cast<std::size_t>(a), static_cast<std::size_t>(b), g);
  return boost::boyer_myrvold_planarity_test(g);
}

}  // namespace homconv
