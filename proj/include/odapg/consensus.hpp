#pragma once

#include <optional>

#include "odapg/topology.hpp"
#include "odapg/types.hpp"

namespace odapg {

// Chebyshev-accelerated gossip: x^0 = x^1 = x, then k applications of
// x^{k+1} = (1 + eta) W x^k - eta x^{k-1}. Row means are preserved. Adds k to
// ledger.rounds. eta defaults to w.eta_w(); an override exists for reduction
// tests (eta = 0 with W = 11^T/m averages in one step).
AgentStates fast_mix(const AgentStates& x, const GossipMatrix& w, int k, CommLedger& ledger,
                     std::optional<double> eta_override = std::nullopt);

// Frobenius norm of x - 1 x_bar, i.e. ||Pi x||.
double consensus_error(const AgentStates& x);

// (1/m) sum of rows.
Vector mean_row(const AgentStates& x);

// Broadcast v to every row of an m x d matrix.
AgentStates broadcast_row(const Vector& v, Index m);

enum class MixRegime { main, extension };

// ceil(15 / sqrt(gap)) for the main method, ceil(11 / sqrt(gap)) for the extension.
int default_k(double gap, MixRegime regime = MixRegime::main);

// Right-hand side factor of the FastMix contraction guarantee:
// sqrt(14) * (1 - (1 - 1/sqrt(2)) * sqrt(1 - lambda2))^k.
double fast_mix_contraction_bound(double lambda2, int k);

}  // namespace odapg
