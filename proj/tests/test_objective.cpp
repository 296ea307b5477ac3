#include <doctest.h>

#include <cmath>
#include <random>

#include "odapg/consensus.hpp"
#include "odapg/errors.hpp"
#include "odapg/objective.hpp"
#include "oracles.hpp"

using namespace odapg;

namespace {

double rel_err(const Vector& a, const Vector& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

}  // namespace

TEST_CASE("logistic single sample at the origin") {
  Matrix a(1, 2);
  a << 1.0, 0.0;
  const LogisticLocal f(a, Vector{{1.0}});
  CHECK(f.value(Vector::Zero(2)) == doctest::Approx(std::log(2.0)));
  const Vector g = f.gradient(Vector::Zero(2));
  CHECK(g(0) == doctest::Approx(-0.5));
  CHECK(g(1) == 0.0);
  CHECK(f.smoothness() == doctest::Approx(0.25));
}

TEST_CASE("logistic loss decreases monotonically towards zero along a separating direction") {
  Matrix a(1, 2);
  a << 1.0, 2.0;
  const LogisticLocal f(a, Vector{{-1.0}});
  double prev = f.value(Vector::Zero(2));
  for (double s = 1.0; s <= 1e6; s *= 4.0) {
    const double v = f.value(Vector{{-s, -s}});
    CHECK(std::isfinite(v));
    CHECK(v <= prev);
    if (prev > 0.0) CHECK(v < prev);
    CHECK(v >= 0.0);
    prev = v;
  }
  CHECK(prev < 1e-300);
  // Large negative margins stay finite too.
  CHECK(std::isfinite(f.value(Vector{{1e6, 1e6}})));
  CHECK(f.gradient(Vector{{1e6, 1e6}}).allFinite());
}

TEST_CASE("logistic gradient matches central differences") {
  const auto parts = synth_logistic(1, 5, 3, 11);
  const LogisticLocal f(parts[0].features, parts[0].labels);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector v = oracle::random_vector(rng, 3);
    const Vector fd = oracle::finite_difference_gradient([&](const Vector& u) { return f.value(u); }, v);
    CHECK((f.gradient(v) - fd).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(rel_err(f.gradient(v), fd) < 1e-5);
  }
}

TEST_CASE("quadratic local") {
  const QuadraticLocal id(Matrix::Identity(2, 2), Vector::Zero(2));
  CHECK(id.value(Vector{{3.0, 4.0}}) == 12.5);
  CHECK(id.gradient(Vector{{3.0, 4.0}}) == Vector{{3.0, 4.0}});

  const QuadraticLocal zero(Matrix::Zero(2, 2), Vector{{1.0, -2.0}});
  CHECK(zero.gradient(Vector{{5.0, 5.0}}) == Vector{{-1.0, 2.0}});

  std::mt19937_64 rng(4);
  const Matrix q = oracle::random_psd(rng, 6, 0.5, 10.0);
  const QuadraticLocal f(q, oracle::random_vector(rng, 6));
  CHECK(f.smoothness() == doctest::Approx(10.0).epsilon(1e-10));
  CHECK(f.strong_convexity() == doctest::Approx(0.5).epsilon(1e-10));
  for (int trial = 0; trial < 5; ++trial) {
    const Vector v = oracle::random_vector(rng, 6);
    const Vector fd = oracle::finite_difference_gradient([&](const Vector& u) { return f.value(u); }, v);
    CHECK((f.gradient(v) - fd).cwiseAbs().maxCoeff() < 1e-6);
  }

  Matrix bad = Matrix::Identity(2, 2);
  bad(1, 1) = -1.0;
  CHECK_THROWS_AS(QuadraticLocal(bad, Vector::Zero(2)), NonPSD);
}

TEST_CASE("assumption checks on sampled pairs: convexity and L-smoothness") {
  std::mt19937_64 rng(12);
  const auto parts = synth_logistic(3, 8, 5, 2);
  std::vector<LocalPtr> locals = logistic_locals(parts);
  locals.push_back(quadratic_local(oracle::random_psd(rng, 5, 0.0, 3.0), oracle::random_vector(rng, 5)));
  locals.push_back(shifted_local(locals[0], 0.3));
  for (const auto& f : locals) {
    const double L = f->smoothness();
    for (int trial = 0; trial < 50; ++trial) {
      const Vector x = oracle::random_vector(rng, 5);
      const Vector y = oracle::random_vector(rng, 5);
      const double lin = f->value(x) + f->gradient(x).dot(y - x);
      CHECK(f->value(y) >= lin - 1e-9);
      CHECK(f->value(y) <= lin + 0.5 * L * (x - y).squaredNorm() + 1e-9);
    }
  }
}

TEST_CASE("elastic net prox examples") {
  const auto l1 = elastic_net(1.0, 0.0);
  CHECK(l1->prox(0.5, Vector{{1.2}})(0) == doctest::Approx(0.7));
  CHECK(l1->prox(0.5, Vector{{-0.3}})(0) == 0.0);
  CHECK(elastic_net(0.5, 1.0)->prox(1.0, Vector{{2.0}})(0) == doctest::Approx(0.75));
  CHECK(elastic_net(2.0, 4.0)->value(Vector{{1.0, -2.0}}) == doctest::Approx(2.0 * 3.0 + 2.0 * 5.0));
  CHECK_THROWS(elastic_net(-1.0, 0.0));
}

TEST_CASE("elastic net prox satisfies the subgradient optimality condition") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> pos(0.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double sigma = pos(rng), mu = pos(rng), gamma = pos(rng) + 1e-3;
    const ElasticNet g(sigma, mu);
    const Vector v = 2.0 * oracle::random_vector(rng, 4);
    const Vector w = g.prox(gamma, v);
    for (Index k = 0; k < 4; ++k) {
      // 0 in gamma sigma d|w| + gamma mu w + (w - v)
      const double r = v(k) - w(k) - gamma * mu * w(k);
      if (w(k) != 0.0) {
        CHECK(std::abs(r - gamma * sigma * (w(k) > 0 ? 1.0 : -1.0)) <= 1e-10);
      } else {
        CHECK(std::abs(r) <= gamma * sigma + 1e-10);
      }
    }
  }
}

TEST_CASE("prox is non-expansive and the aggregate prox consensus inequality holds") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> pos(0.0, 1.5);
  for (int trial = 0; trial < 200; ++trial) {
    const ElasticNet g(pos(rng), pos(rng));
    const double gamma = pos(rng) + 1e-3;
    const Vector u = oracle::random_vector(rng, 6), v = oracle::random_vector(rng, 6);
    CHECK((g.prox(gamma, u) - g.prox(gamma, v)).norm() <= (u - v).norm() + 1e-12);

    const AgentStates x = oracle::random_matrix(rng, 5, 6);
    const AgentStates avg = broadcast_row(mean_row(x), 5);
    const AgentStates lhs = aggregate_prox(g, gamma, avg) - broadcast_row(mean_row(aggregate_prox(g, gamma, x)), 5);
    CHECK(lhs.norm() <= consensus_error(x) + 1e-12);
  }
}

TEST_CASE("regularizer strong convexity on sampled pairs") {
  std::mt19937_64 rng(41);
  const ElasticNet g(0.7, 0.4);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector x = oracle::random_vector(rng, 3), y = oracle::random_vector(rng, 3);
    // A valid subgradient at x (x has no zero entries almost surely).
    const Vector sub = 0.7 * x.array().sign().matrix() + 0.4 * x;
    CHECK(g.value(y) >= g.value(x) + sub.dot(y - x) + 0.5 * 0.4 * (y - x).squaredNorm() - 1e-9);
  }
}

TEST_CASE("aggregate gradient and prox") {
  const CompositeProblem p = make_problem({quadratic_local(Matrix::Identity(1, 1), Vector::Zero(1)),
                                           quadratic_local(Matrix::Identity(1, 1), Vector::Zero(1))},
                                          zero_regularizer());
  AgentStates x(2, 1);
  x << 1.0, 2.0;
  GradLedger ledger;
  CHECK(aggregate_gradient(p, x, ledger) == x);
  CHECK(ledger.count == 2);
  CHECK_THROWS_AS(aggregate_gradient(p, AgentStates::Zero(3, 1), ledger), DimensionMismatch);

  CHECK(aggregate_prox(*zero_regularizer(), 0.9, x) == x);
  AgentStates y(2, 1);
  y << 1.2, -0.3;
  const AgentStates py = aggregate_prox(*elastic_net(1.0, 0.0), 0.5, y);
  CHECK(py(0, 0) == doctest::Approx(0.7));
  CHECK(py(1, 0) == 0.0);
}

TEST_CASE("aggregate gradient rows match per-agent finite differences for logistic locals") {
  const auto parts = synth_logistic(4, 6, 3, 8);
  const CompositeProblem p = make_problem(logistic_locals(parts), zero_regularizer());
  std::mt19937_64 rng(5);
  const AgentStates x = oracle::random_matrix(rng, 4, 3);
  GradLedger ledger;
  const AgentStates g = aggregate_gradient(p, x, ledger);
  for (Index i = 0; i < 4; ++i) {
    const auto& f = *p.locals[static_cast<std::size_t>(i)];
    const Vector fd = oracle::finite_difference_gradient([&](const Vector& u) { return f.value(u); }, x.row(i).transpose());
    CHECK(rel_err(g.row(i).transpose(), fd) < 1e-5);
  }
}

TEST_CASE("bregman distance") {
  const CompositeProblem one = make_problem({quadratic_local(Matrix::Identity(1, 1), Vector::Zero(1))}, zero_regularizer());
  CHECK(bregman_df(one, Vector{{1.0}}, AgentStates::Zero(1, 1)) == doctest::Approx(0.5));

  std::mt19937_64 rng(51);
  std::vector<LocalPtr> locals;
  for (int i = 0; i < 4; ++i) locals.push_back(quadratic_local(oracle::random_psd(rng, 3, 0.0, 2.0), oracle::random_vector(rng, 3)));
  const auto parts = synth_logistic(4, 5, 3, 1);
  const CompositeProblem quad = make_problem(locals, zero_regularizer());
  const CompositeProblem logit = make_problem(logistic_locals(parts), zero_regularizer());
  const Vector y = oracle::random_vector(rng, 3);
  CHECK(std::abs(bregman_df(quad, y, broadcast_row(y, 4))) <= 1e-14);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector v = oracle::random_vector(rng, 3);
    const AgentStates x = oracle::random_matrix(rng, 4, 3);
    CHECK(bregman_df(quad, v, x) >= -1e-10);
    CHECK(bregman_df(logit, v, x) >= -1e-10);
  }
}

TEST_CASE("make_problem derives constants and enforces mu <= L") {
  std::mt19937_64 rng(61);
  const CompositeProblem p = make_problem({quadratic_local(oracle::random_psd(rng, 3, 1.0, 4.0), Vector::Zero(3)),
                                           quadratic_local(oracle::random_psd(rng, 3, 2.0, 9.0), Vector::Zero(3))},
                                          elastic_net(0.1, 0.5));
  CHECK(p.L == doctest::Approx(9.0));
  CHECK(p.f_mu == doctest::Approx(1.0));
  CHECK(p.mu == 0.5);
  CHECK(p.d == 3);
  CHECK_THROWS_AS(make_problem({quadratic_local(Matrix::Identity(2, 2), Vector::Zero(2))}, elastic_net(0.0, 2.0)),
                  RegimeMismatch);
  CHECK_THROWS_AS(make_problem({quadratic_local(Matrix::Identity(2, 2), Vector::Zero(2)),
                                quadratic_local(Matrix::Identity(3, 3), Vector::Zero(3))},
                               zero_regularizer()),
                  DimensionMismatch);
}

TEST_CASE("shifted locals") {
  const auto base = quadratic_local(2.0 * Matrix::Identity(2, 2), Vector{{1.0, 0.0}});
  const auto down = shifted_local(base, -1.5);
  CHECK(down->smoothness() == doctest::Approx(0.5));
  CHECK(down->strong_convexity() == doctest::Approx(0.5));
  CHECK(down->gradient(Vector{{1.0, 1.0}}) == Vector{{-0.5, 0.5}});
  CHECK_THROWS(shifted_local(base, -3.0));
}

TEST_CASE("synthetic logistic data is deterministic with valid labels") {
  const auto a = synth_logistic(2, 3, 4, 1);
  const auto b = synth_logistic(2, 3, 4, 1);
  REQUIRE(a.size() == 2);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].features == b[i].features);
    CHECK(a[i].labels == b[i].labels);
    CHECK(a[i].features.rows() == 3);
    CHECK(a[i].features.cols() == 4);
  }
  const auto big = synth_logistic(5, 40, 10, 99);
  for (const auto& part : big) {
    for (Index j = 0; j < part.labels.size(); ++j) CHECK((part.labels(j) == 1.0 || part.labels(j) == -1.0));
  }
  CHECK(synth_logistic(2, 3, 4, 2)[0].features != a[0].features);
}
