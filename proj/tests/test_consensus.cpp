#include <doctest.h>

#include <cmath>
#include <random>

#include "odapg/consensus.hpp"
#include "odapg/errors.hpp"
#include "oracles.hpp"

using namespace odapg;

TEST_CASE("fast_mix on a consensus state is the identity") {
  const GossipMatrix w = gossip_matrix(builtin_graph(BuiltinKind::ring, 6));
  const AgentStates x = broadcast_row(Vector{{1.5, -2.0, 0.25}}, 6);
  CommLedger ledger;
  for (int k : {0, 1, 7, 40}) {
    const AgentStates out = fast_mix(x, w, k, ledger);
    CHECK((out - x).cwiseAbs().maxCoeff() <= 1e-12);
  }
  CHECK(ledger.rounds == 48);
}

TEST_CASE("fast_mix one step on the 2-clique") {
  const GossipMatrix w = gossip_matrix(builtin_graph(BuiltinKind::complete, 2));
  AgentStates x(2, 1);
  x << 0.0, 2.0;
  CommLedger ledger;
  const AgentStates out = fast_mix(x, w, 1, ledger);
  CHECK(out(0, 0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(out(1, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mean_row(out)(0) == doctest::Approx(1.0));
  CHECK(consensus_error(x) == doctest::Approx(std::sqrt(2.0)));
  CHECK(consensus_error(out) == doctest::Approx(std::sqrt(0.5)));
  CHECK(ledger.rounds == 1);

  // Oracle: literal recurrence.
  const Matrix direct = oracle::direct_recurrence(w.matrix(), x, 1, 0.5);
  CHECK((Matrix(out) - direct).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("fast_mix agrees with the literal recurrence for many steps") {
  std::mt19937_64 rng(8);
  const GossipMatrix w = gossip_matrix(generate_er_graph(12, 0.3, 4));
  const AgentStates x = oracle::random_matrix(rng, 12, 5);
  CommLedger ledger;
  for (int k : {0, 1, 2, 5, 25}) {
    const Matrix direct = oracle::direct_recurrence(w.matrix(), x, k, w.eta_w());
    CHECK((Matrix(fast_mix(x, w, k, ledger)) - direct).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("fast_mix contraction on the 3-path after 30 steps") {
  std::mt19937_64 rng(30);
  const GossipMatrix w = gossip_matrix(builtin_graph(BuiltinKind::path, 3));
  const double bound = std::sqrt(14.0) * std::pow(1.0 - (1.0 - 1.0 / std::sqrt(2.0)) * std::sqrt(1.0 - 2.0 / 3.0), 30);
  CHECK(fast_mix_contraction_bound(w.lambda2(), 30) == doctest::Approx(bound).epsilon(1e-12));
  for (int trial = 0; trial < 20; ++trial) {
    const AgentStates x = oracle::random_matrix(rng, 3, 4);
    CommLedger ledger;
    CHECK(consensus_error(fast_mix(x, w, 30, ledger)) <= bound * consensus_error(x));
  }
}

TEST_CASE("fast_mix preserves row means and respects the contraction bound") {
  std::mt19937_64 rng(77);
  const std::vector<GossipMatrix> nets = {gossip_matrix(builtin_graph(BuiltinKind::path, 8)),
                                          gossip_matrix(builtin_graph(BuiltinKind::ring, 10)),
                                          gossip_matrix(generate_er_graph(20, 0.3, 1))};
  std::uniform_int_distribution<int> steps(0, 40);
  for (const auto& w : nets) {
    for (int trial = 0; trial < 100; ++trial) {
      const AgentStates x = oracle::random_matrix(rng, w.agents(), 3);
      const int k = steps(rng);
      CommLedger ledger;
      const AgentStates out = fast_mix(x, w, k, ledger);
      CHECK(ledger.rounds == k);
      CHECK((mean_row(out) - mean_row(x)).norm() <= 1e-10);
      CHECK(consensus_error(out) <= fast_mix_contraction_bound(w.lambda2(), k) * consensus_error(x) + 1e-14);
    }
  }
}

TEST_CASE("default K gives per-call contraction rho^2 <= 1/64") {
  std::mt19937_64 rng(64);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const GossipMatrix w = gossip_matrix(generate_er_graph(15, 0.3, seed));
    const int k = default_k(w.gap());
    const double rho = fast_mix_contraction_bound(w.lambda2(), k);
    CHECK(rho * rho <= 1.0 / 64.0);
    const AgentStates x = oracle::random_matrix(rng, 15, 2);
    CommLedger ledger;
    const double measured = consensus_error(fast_mix(x, w, k, ledger)) / consensus_error(x);
    CHECK(measured * measured <= 1.0 / 64.0);
  }
}

TEST_CASE("eta override of 0 on exact averaging mixes in one step") {
  const GossipMatrix w = GossipMatrix::from_matrix(Matrix::Constant(3, 3, 1.0 / 3.0));
  AgentStates x(3, 1);
  x << 1.0, 2.0, 6.0;
  CommLedger ledger;
  const AgentStates out = fast_mix(x, w, 1, ledger, 0.0);
  CHECK((out.array() - 3.0).abs().maxCoeff() < 1e-15);
}

TEST_CASE("fast_mix rejects mismatched shapes") {
  const GossipMatrix w = gossip_matrix(builtin_graph(BuiltinKind::ring, 4));
  CommLedger ledger;
  CHECK_THROWS_AS(fast_mix(AgentStates::Zero(3, 2), w, 1, ledger), DimensionMismatch);
  CHECK(ledger.rounds == 0);
}

TEST_CASE("consensus_error and mean_row examples") {
  AgentStates a(2, 1), b(3, 1), c(2, 2);
  a << 0.0, 2.0;
  b << 1.0, 2.0, 3.0;
  c << 1.0, 0.0, 0.0, 1.0;
  CHECK(consensus_error(a) == doctest::Approx(std::sqrt(2.0)));
  CHECK(consensus_error(b) == doctest::Approx(std::sqrt(2.0)));
  CHECK(consensus_error(broadcast_row(Vector{{3.0, 4.0}}, 5)) <= 1e-14);
  CHECK(mean_row(a)(0) == 1.0);
  CHECK(mean_row(c) == Vector{{0.5, 0.5}});
  CHECK(mean_row(broadcast_row(Vector{{7.0, -1.0}}, 4)) == Vector{{7.0, -1.0}});
}

TEST_CASE("default_k") {
  CHECK(default_k(0.05) == 68);
  CHECK(default_k(1.0) == 15);
  CHECK(default_k(0.05, MixRegime::extension) == 50);
  CHECK_THROWS(default_k(0.0));
}
