#include "odapg/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

namespace odapg {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::odapg: return "odapg";
    case Variant::odapg_ext: return "odapg_ext";
    case Variant::baseline: return "baseline";
  }
  return "unknown";
}

std::optional<Variant> parse_variant(const std::string& name) {
  for (Variant v : {Variant::odapg, Variant::odapg_ext, Variant::baseline}) {
    if (to_string(v) == name) return v;
  }
  return std::nullopt;
}

namespace {

void require_finite(const SolverState& s) {
  const bool ok = s.x.allFinite() && s.y.allFinite() && s.z.allFinite() && s.s.allFinite();
  if (!ok) {
    throw NonFiniteState("non-finite agent state after iteration " + std::to_string(s.t - 1) +
                             " (check the smoothness constant and step size)",
                         s.t - 1);
  }
}

void require_shapes(const SolverState& s, const CompositeProblem& p, const GossipMatrix& w) {
  if (s.z.rows() != p.agents() || s.z.cols() != p.d || w.agents() != p.agents()) {
    throw DimensionMismatch("solver state, problem and mixing matrix disagree on shape");
  }
}

void check_extension(const CompositeProblem& p, double mu) {
  if (p.mu > 0.0) throw RegimeMismatch("extension expects a merely convex regularizer (mu = 0)");
  if (p.L < 2.0 * mu) throw RegimeMismatch("extension needs L >= 2 mu");
  if (mu > p.f_mu * (1.0 + 1e-12)) throw RegimeMismatch("local functions are not mu-strongly convex");
}

}  // namespace

SolverState initialize(const CompositeProblem& p, const Vector& x1, Variant variant, double ext_mu) {
  if (x1.size() != p.d) throw DimensionMismatch("initial point has wrong dimension");
  SolverState s;
  s.t = 1;
  s.x = broadcast_row(x1, p.agents());
  s.y = s.x;
  s.z = s.x;
  GradLedger uncharged;
  s.prev_grad = aggregate_gradient(p, s.x, uncharged);
  if (variant == Variant::odapg_ext) s.prev_grad -= ext_mu * s.x;
  s.s = s.prev_grad;
  s.z_hat = s.z;
  return s;
}

SolverState odapg_step(SolverState state, const CompositeProblem& p, const GossipMatrix& w, const Schedule& sched) {
  if (sched.regime() == Regime::extension) {
    throw RegimeMismatch("extension schedule must be run with odapg_extension_step");
  }
  require_shapes(state, p, w);
  const int t = state.t;
  const double gamma = sched.gamma(t);
  const double tau = sched.tau(t);
  const int K = sched.K();
  const auto eta = sched.eta();

  AgentStates x_next = tau * state.z + (1.0 - tau) * state.y;
  AgentStates grad = aggregate_gradient(p, x_next, state.grads);
  state.s = fast_mix(state.s + grad - state.prev_grad, w, K, state.comm, eta);
  state.z_hat = aggregate_prox(*p.reg, gamma, state.z - gamma * state.s);
  state.z = fast_mix(state.z_hat, w, K, state.comm, eta);
  state.y = fast_mix(tau * state.z + (1.0 - tau) * state.y, w, K, state.comm, eta);
  state.x = std::move(x_next);
  state.prev_grad = std::move(grad);
  state.t = t + 1;
  require_finite(state);
  return state;
}

SolverState odapg_extension_step(SolverState state, const CompositeProblem& p, const GossipMatrix& w,
                                 const Schedule& sched) {
  const double mu = sched.mu();
  check_extension(p, mu);
  require_shapes(state, p, w);
  const int t = state.t;
  const double gamma = sched.gamma(t);
  const double tau = sched.tau(t);
  const int K = sched.K();
  const auto eta = sched.eta();
  const double shrink = 1.0 + mu * gamma;

  AgentStates x_next = tau * state.z + (1.0 - tau) * state.y;
  AgentStates grad = aggregate_gradient(p, x_next, state.grads);
  grad -= mu * x_next;
  state.s = fast_mix(state.s + grad - state.prev_grad, w, K, state.comm, eta);
  state.z_hat = aggregate_prox(*p.reg, gamma / shrink, (state.z - gamma * state.s) / shrink);
  state.z = fast_mix(state.z_hat, w, K, state.comm, eta);
  state.y = fast_mix(tau * state.z + (1.0 - tau) * state.y, w, K, state.comm, eta);
  state.x = std::move(x_next);
  state.prev_grad = std::move(grad);
  state.t = t + 1;
  require_finite(state);
  return state;
}

SolverState baseline_proxgt_step(SolverState state, const CompositeProblem& p, const GossipMatrix& w, double gamma,
                                 int K, std::optional<double> eta) {
  if (!(gamma > 0.0)) throw std::invalid_argument("baseline step size must be positive");
  require_shapes(state, p, w);
  AgentStates grad = aggregate_gradient(p, state.z, state.grads);
  state.s = fast_mix(state.s + grad - state.prev_grad, w, K, state.comm, eta);
  state.z_hat = aggregate_prox(*p.reg, gamma, state.z - gamma * state.s);
  state.x = state.z;
  state.z = fast_mix(state.z_hat, w, K, state.comm, eta);
  state.y = state.z;
  state.prev_grad = std::move(grad);
  state.t += 1;
  require_finite(state);
  return state;
}

RunResult run(const CompositeProblem& p, const GossipMatrix& w, const Schedule& sched, const Vector& x1,
              std::optional<Reference> reference, Variant variant, RunOptions options) {
  if (w.agents() != p.agents()) throw DimensionMismatch("mixing matrix size differs from agent count");
  if (variant == Variant::odapg_ext) check_extension(p, sched.mu());

  RunResult result;
  result.reference = std::move(reference);
  result.state = initialize(p, x1, variant, variant == Variant::odapg_ext ? sched.mu() : 0.0);
  result.metrics.reserve(static_cast<std::size_t>(sched.T()));

  const auto start = std::chrono::steady_clock::now();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int iter = 1; iter <= sched.T(); ++iter) {
    SolverState& s = result.state;
    try {
      switch (variant) {
        case Variant::odapg:
          s = odapg_step(std::move(s), p, w, sched);
          break;
        case Variant::odapg_ext:
          s = odapg_extension_step(std::move(s), p, w, sched);
          break;
        case Variant::baseline:
          s = baseline_proxgt_step(std::move(s), p, w, sched.gamma(s.t), sched.K(), sched.eta());
          break;
      }
    } catch (NonFiniteState& e) {
      e.metrics = std::move(result.metrics);
      throw;
    }

    MetricsRecord rec;
    rec.t = iter;
    rec.consensus_x = consensus_error(s.x);
    rec.consensus_z = consensus_error(s.z);
    rec.consensus_s = consensus_error(s.s);
    rec.grads_cumulative = s.grads.count;
    rec.rounds_cumulative = s.comm.rounds;
    if (result.reference) {
      const Reference& ref = *result.reference;
      double sub = composite_value(p, mean_row(s.y)) - ref.value;
      const double floor = -10.0 * ref.tol;
      if (sub < floor) {
        sub = floor;
        ++result.clamped_rows;
      }
      rec.suboptimality = sub;
      rec.sq_dist = (s.z.rowwise() - ref.x.transpose()).squaredNorm();
    } else {
      rec.suboptimality = nan;
      rec.sq_dist = nan;
    }
    if (options.record_wall_time) {
      rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    result.metrics.push_back(rec);
  }
  return result;
}

}  // namespace odapg
