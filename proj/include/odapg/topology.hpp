#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "odapg/types.hpp"

namespace odapg {

// Undirected simple graph on agents 0..m-1. Edges are stored as (i, j) with
// i < j, sorted and unique.
class Graph {
 public:
  Graph(int m, std::vector<std::pair<int, int>> edges);

  int agents() const { return m_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }
  bool has_edge(int i, int j) const;
  bool connected() const;

 private:
  int m_;
  std::vector<std::pair<int, int>> edges_;
};

enum class BuiltinKind { ring, path, complete, star };

std::optional<BuiltinKind> parse_builtin_kind(std::string_view name);

// Erdos-Renyi G(m, p), resampled with derived seeds until connected.
// Throws ConnectivityFailure after 1000 disconnected draws.
Graph generate_er_graph(int m, double p, std::uint64_t seed);

Graph builtin_graph(BuiltinKind kind, int m);

// Unit-weight combinatorial Laplacian D - A.
Matrix laplacian(const Graph& g);

// Symmetric mixing matrix with its spectral quantities cached.
class GossipMatrix {
 public:
  // Validates every clause of validate_gossip (throws InvalidGossipMatrix)
  // and caches the spectrum. A 1x1 matrix [1] is accepted with lambda2 = 0.
  static GossipMatrix from_matrix(Matrix w);

  const Matrix& matrix() const { return w_; }
  Index agents() const { return w_.rows(); }
  double lambda2() const { return lambda2_; }
  double gap() const { return 1.0 - lambda2_; }
  // FastMix momentum 1 / (1 + sqrt(1 - lambda2^2)).
  double eta_w() const { return eta_; }
  // Largest Laplacian eigenvalue used to scale W; zero when built from a raw matrix.
  double laplacian_lambda1() const { return laplacian_lambda1_; }

 private:
  friend GossipMatrix gossip_matrix(const Graph& g);
  GossipMatrix(Matrix w, double lambda2, double lambda1);

  Matrix w_;
  double lambda2_;
  double eta_;
  double laplacian_lambda1_;
};

// W = I - L / lambda_max(L). Throws SpectralFailure if the eigensolver fails,
// ConnectivityFailure if g is disconnected.
GossipMatrix gossip_matrix(const Graph& g);

struct ValidationClause {
  std::string name;
  bool passed;
  double residual;
};

struct ValidationReport {
  std::vector<ValidationClause> clauses;
  std::vector<double> eigenvalues;  // ascending; empty if the matrix is not square

  bool all_passed() const;
  const ValidationClause* find(std::string_view name) const;
};

namespace clause {
inline constexpr std::string_view square = "square";
inline constexpr std::string_view symmetric = "symmetric";
inline constexpr std::string_view row_sums = "row sums equal 1";
inline constexpr std::string_view psd = "positive semi-definite";
inline constexpr std::string_view upper = "eigenvalues at most 1";
inline constexpr std::string_view null_space = "lambda2 < 1";
inline constexpr std::string_view sparsity = "sparsity conforms to graph";
}  // namespace clause

// Checks each clause of the mixing-matrix assumption. The sparsity clause is
// only reported when a graph is supplied. Never throws on failing clauses.
ValidationReport validate_gossip(const Matrix& w, const Graph* graph = nullptr);

// Sorted ascending eigenvalues of a symmetric matrix; throws SpectralFailure.
Vector symmetric_eigenvalues(const Matrix& a);

}  // namespace odapg
