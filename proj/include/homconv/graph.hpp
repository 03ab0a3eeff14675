#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace homconv {

/// Dense symmetric boolean adjacency with zero diagonal.
class AdjacencyMatrix {
 public:
  AdjacencyMatrix() = default;
  explicit AdjacencyMatrix(std::size_t n) : n_(n), bits_(n * n, 0) {}

  std::size_t size() const { return n_; }

  bool has_edge(std::size_t a, std::size_t b) const { return bits_[a * n_ + b] != 0; }

  void add_edge(std::size_t a, std::size_t b) {
    if (a == b) return;
    bits_[a * n_ + b] = 1;
    bits_[b * n_ + a] = 1;
  }

  void remove_edge(std::size_t a, std::size_t b) {
    bits_[a * n_ + b] = 0;
    bits_[b * n_ + a] = 0;
  }

  /// Raw cell write, no symmetry enforcement. Lets tests build malformed inputs.
  void set_raw(std::size_t a, std::size_t b, bool value) { bits_[a * n_ + b] = value ? 1 : 0; }

  std::size_t edge_count() const;
  std::size_t degree(std::size_t v) const;
  std::vector<int> neighbors(std::size_t v) const;
  bool is_symmetric() const;
  bool has_zero_diagonal() const;
  /// All (a, b) with a < b, lexicographic.
  std::vector<std::pair<int, int>> edges() const;

  friend bool operator==(const AdjacencyMatrix&, const AdjacencyMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Maximum cardinality search; the reverse of the visit order is a perfect
/// elimination ordering iff the graph is chordal. Ties go to the smallest vertex.
std::vector<int> maximum_cardinality_search(const AdjacencyMatrix& adj);

/// Checks that, for each vertex, its neighbours later in `order` form a clique.
bool is_perfect_elimination_ordering(const AdjacencyMatrix& adj, const std::vector<int>& order);

/// Chordality via MCS + PEO verification.
bool is_chordal(const AdjacencyMatrix& adj);

/// Boyer-Myrvold planarity test.
bool is_planar(const AdjacencyMatrix& adj);

}  // namespace homconv
