#include "odapg/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "odapg/errors.hpp"

namespace odapg {

namespace {

constexpr int kMaxErAttempts = 1000;
constexpr double kSymTol = 1e-12;
constexpr double kRowSumTol = 1e-10;
constexpr double kEigTol = 1e-10;

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::mt19937_64 derived_rng(std::uint64_t seed, int attempt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(attempt)};
  return std::mt19937_64(seq);
}

}  // namespace

Graph::Graph(int m, std::vector<std::pair<int, int>> edges) : m_(m) {
  if (m < 1) throw std::invalid_argument("graph needs at least one agent");
  for (auto& [i, j] : edges) {
    if (i == j) throw std::invalid_argument("self-loop on agent " + std::to_string(i));
    if (i < 0 || j < 0 || i >= m || j >= m) throw std::invalid_argument("edge endpoint out of range");
    if (i > j) std::swap(i, j);
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw std::invalid_argument("duplicate edge");
  }
  edges_ = std::move(edges);
}

bool Graph::has_edge(int i, int j) const {
  if (i > j) std::swap(i, j);
  return std::binary_search(edges_.begin(), edges_.end(), std::pair{i, j});
}

bool Graph::connected() const {
  std::vector<int> parent(static_cast<std::size_t>(m_));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  int components = m_;
  for (const auto& [i, j] : edges_) {
    const int a = find(i);
    const int b = find(j);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

std::optional<BuiltinKind> parse_builtin_kind(std::string_view name) {
  if (name == "ring") return BuiltinKind::ring;
  if (name == "path") return BuiltinKind::path;
  if (name == "complete") return BuiltinKind::complete;
  if (name == "star") return BuiltinKind::star;
  return std::nullopt;
}

Graph generate_er_graph(int m, double p, std::uint64_t seed) {
  if (m < 2) throw std::invalid_argument("ER graph needs m >= 2");
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("edge probability must lie in (0, 1]");
  for (int attempt = 0; attempt < kMaxErAttempts; ++attempt) {
    auto rng = derived_rng(seed, attempt);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        if (unit_uniform(rng) < p) edges.emplace_back(i, j);
      }
    }
    Graph g(m, std::move(edges));
    if (g.connected()) return g;
  }
  throw ConnectivityFailure("no connected ER draw in " + std::to_string(kMaxErAttempts) +
                            " attempts (m=" + std::to_string(m) + ", p=" + std::to_string(p) + ")");
}

Graph builtin_graph(BuiltinKind kind, int m) {
  if (m < 2) throw std::invalid_argument("builtin graph needs m >= 2");
  std::vector<std::pair<int, int>> edges;
  switch (kind) {
    case BuiltinKind::path:
      for (int i = 0; i + 1 < m; ++i) edges.emplace_back(i, i + 1);
      break;
    case BuiltinKind::ring:
      for (int i = 0; i + 1 < m; ++i) edges.emplace_back(i, i + 1);
      if (m > 2) edges.emplace_back(0, m - 1);
      break;
    case BuiltinKind::complete:
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) edges.emplace_back(i, j);
      break;
    case BuiltinKind::star:
      for (int i = 1; i < m; ++i) edges.emplace_back(0, i);
      break;
  }
  return Graph(m, std::move(edges));
}

Matrix laplacian(const Graph& g) {
  const int m = g.agents();
  Matrix l = Matrix::Zero(m, m);
  for (const auto& [i, j] : g.edges()) {
    l(i, j) -= 1.0;
    l(j, i) -= 1.0;
    l(i, i) += 1.0;
    l(j, j) += 1.0;
  }
  return l;
}

Vector symmetric_eigenvalues(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw SpectralFailure("symmetric eigensolver did not converge");
  return solver.eigenvalues();
}

GossipMatrix::GossipMatrix(Matrix w, double lambda2, double lambda1)
    : w_(std::move(w)),
      lambda2_(lambda2),
      eta_(1.0 / (1.0 + std::sqrt(1.0 - lambda2 * lambda2))),
      laplacian_lambda1_(lambda1) {}

GossipMatrix GossipMatrix::from_matrix(Matrix w) {
  if (w.rows() == 1 && w.cols() == 1) {
    if (std::abs(w(0, 0) - 1.0) > kRowSumTol) throw InvalidGossipMatrix("1x1 mixing matrix must be [1]");
    return GossipMatrix(Matrix::Ones(1, 1), 0.0, 0.0);
  }
  const ValidationReport report = validate_gossip(w);
  for (const auto& c : report.clauses) {
    if (!c.passed) throw InvalidGossipMatrix("mixing matrix fails clause '" + c.name + "'");
  }
  const double lambda2 = std::max(0.0, report.eigenvalues[report.eigenvalues.size() - 2]);
  return GossipMatrix(std::move(w), lambda2, 0.0);
}

GossipMatrix gossip_matrix(const Graph& g) {
  if (!g.connected()) throw ConnectivityFailure("gossip matrix requires a connected graph");
  const int m = g.agents();
  if (m == 1) return GossipMatrix(Matrix::Ones(1, 1), 0.0, 0.0);
  const Matrix l = laplacian(g);
  const double lambda1 = symmetric_eigenvalues(l)(m - 1);
  Matrix w = Matrix::Identity(m, m) - l / lambda1;
  // Symmetric by construction; W's spectrum is 1 - spec(L)/lambda1.
  const Vector eig = symmetric_eigenvalues(w);
  return GossipMatrix(std::move(w), std::max(0.0, eig(m - 2)), lambda1);
}

bool ValidationReport::all_passed() const {
  return std::all_of(clauses.begin(), clauses.end(), [](const auto& c) { return c.passed; });
}

const ValidationClause* ValidationReport::find(std::string_view name) const {
  for (const auto& c : clauses)
    if (c.name == name) return &c;
  return nullptr;
}

ValidationReport validate_gossip(const Matrix& w, const Graph* graph) {
  ValidationReport report;
  const bool square = w.rows() == w.cols() && w.rows() > 0;
  report.clauses.push_back({std::string(clause::square), square,
                            static_cast<double>(std::abs(w.rows() - w.cols()))});
  if (!square) return report;
  const Index m = w.rows();

  const double asym = (w - w.transpose()).cwiseAbs().maxCoeff();
  report.clauses.push_back({std::string(clause::symmetric), asym <= kSymTol, asym});

  const double row_dev = (w.rowwise().sum().array() - 1.0).abs().maxCoeff();
  report.clauses.push_back({std::string(clause::row_sums), row_dev <= kRowSumTol, row_dev});

  // Spectrum of the symmetric part; an asymmetric input already failed above.
  const Matrix sym = 0.5 * (w + w.transpose());
  Vector eig = symmetric_eigenvalues(sym);
  report.eigenvalues.assign(eig.data(), eig.data() + eig.size());

  const double smallest = eig(0);
  report.clauses.push_back({std::string(clause::psd), smallest >= -kEigTol, smallest});
  const double largest = eig(m - 1);
  report.clauses.push_back({std::string(clause::upper), largest <= 1.0 + kEigTol, largest});
  const double lambda2 = m >= 2 ? eig(m - 2) : 0.0;
  report.clauses.push_back({std::string(clause::null_space), lambda2 < 1.0 - kEigTol, lambda2});

  if (graph != nullptr) {
    double worst = 0.0;
    bool ok = graph->agents() == m;
    if (ok) {
      for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < m; ++j) {
          if (i == j) continue;
          const bool edge = graph->has_edge(static_cast<int>(i), static_cast<int>(j));
          if (!edge && w(i, j) != 0.0) worst = std::max(worst, std::abs(w(i, j)));
          if (edge && w(i, j) == 0.0) ok = false;
        }
      }
    }
    report.clauses.push_back({std::string(clause::sparsity), ok && worst == 0.0, worst});
  }
  return report;
}

}  // namespace odapg
