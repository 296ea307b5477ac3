#pragma once

#include <Eigen/Dense>

namespace odapg {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// m x d, row i is agent i's local copy. Row-major so per-agent rows are contiguous.
using AgentStates = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Cumulative single-hop communication rounds; one FastMix inner step is one round.
struct CommLedger {
  long long rounds = 0;
};

// Cumulative local gradient evaluations (one per agent per call).
struct GradLedger {
  long long count = 0;
};

}  // namespace odapg
