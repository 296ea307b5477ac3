#include "odapg/consensus.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "odapg/errors.hpp"
#include "odapg/kernels.hpp"

namespace odapg {

AgentStates fast_mix(const AgentStates& x, const GossipMatrix& w, int k, CommLedger& ledger,
                     std::optional<double> eta_override) {
  if (x.rows() != w.agents()) {
    throw DimensionMismatch("fast_mix: state has " + std::to_string(x.rows()) +
                            " rows, mixing matrix is " + std::to_string(w.agents()) + "x" +
                            std::to_string(w.agents()));
  }
  if (k < 0) throw std::invalid_argument("fast_mix: negative step count");
  const double eta = eta_override.value_or(w.eta_w());

  AgentStates prev = x;
  AgentStates cur = x;
  AgentStates next(x.rows(), x.cols());
  for (int step = 0; step < k; ++step) {
    kernels::omp::mix_combine(w.matrix(), cur, prev, 1.0 + eta, -eta, next);
    std::swap(prev, cur);
    std::swap(cur, next);
  }
  ledger.rounds += k;
  return cur;
}

Vector mean_row(const AgentStates& x) {
  if (x.rows() == 0) throw DimensionMismatch("mean_row: no agents");
  return x.colwise().mean().transpose();
}

AgentStates broadcast_row(const Vector& v, Index m) {
  AgentStates out(m, v.size());
  out.rowwise() = v.transpose();
  return out;
}

double consensus_error(const AgentStates& x) {
  const Vector mean = mean_row(x);
  return (x.rowwise() - mean.transpose()).norm();
}

int default_k(double gap, MixRegime regime) {
  if (!(gap > 0.0 && gap <= 1.0)) throw std::invalid_argument("spectral gap must lie in (0, 1]");
  const double c = regime == MixRegime::main ? 15.0 : 11.0;
  return static_cast<int>(std::ceil(c / std::sqrt(gap)));
}

double fast_mix_contraction_bound(double lambda2, int k) {
  const double rate = 1.0 - (1.0 - 1.0 / std::sqrt(2.0)) * std::sqrt(1.0 - lambda2);
  return std::sqrt(14.0) * std::pow(rate, k);
}

}  // namespace odapg
