#pragma once

#include <optional>
#include <vector>

#include "odapg/consensus.hpp"
#include "odapg/errors.hpp"
#include "odapg/metrics.hpp"
#include "odapg/objective.hpp"
#include "odapg/schedule.hpp"
#include "odapg/topology.hpp"

namespace odapg {

enum class Variant { odapg, odapg_ext, baseline };

std::string to_string(Variant v);
std::optional<Variant> parse_variant(const std::string& name);

struct SolverState {
  int t = 1;
  AgentStates x, y, z, s;
  AgentStates prev_grad;  // grad f(x_t), or its shifted form for the extension
  AgentStates z_hat;      // pre-mix prox output of the last step
  GradLedger grads;
  CommLedger comm;
};

// Divergence guard. Carries the metrics recorded before the failure.
class NonFiniteState : public Error {
 public:
  NonFiniteState(const std::string& what, int t) : Error(what), t_(t) {}
  int t() const { return t_; }
  std::vector<MetricsRecord> metrics;

 private:
  int t_;
};

// z = y = x = 1 x1; s row i = grad f_i(x1), minus mu x1 for the extension.
// The initial gradients are not charged to the ledger.
SolverState initialize(const CompositeProblem& p, const Vector& x1, Variant variant = Variant::odapg,
                       double ext_mu = 0.0);

// One iteration of the accelerated decentralized proximal gradient method
// (schedule regime strongly_convex_g, general_convex_g or constant).
SolverState odapg_step(SolverState state, const CompositeProblem& p, const GossipMatrix& w, const Schedule& sched);

// Strongly convex locals with a merely convex regularizer: tracks
// grad f_i - mu I and applies prox_{gamma/(1+mu gamma) g}(. / (1 + mu gamma)).
SolverState odapg_extension_step(SolverState state, const CompositeProblem& p, const GossipMatrix& w,
                                 const Schedule& sched);

// Non-accelerated comparator: gradient tracking with tau = 1 (x = z, no y).
// Costs m gradients and 2K rounds per step.
SolverState baseline_proxgt_step(SolverState state, const CompositeProblem& p, const GossipMatrix& w, double gamma,
                                 int K, std::optional<double> eta = std::nullopt);

struct Reference {
  Vector x;
  double value = 0.0;
  double residual = 0.0;  // composite gradient-mapping norm at x
  int iterations = 0;
  double tol = 0.0;
};

// Restarted accelerated proximal gradient on (1/m) sum f_i + g until the
// gradient-mapping norm drops to tol. Throws NoConvergence after cap iterations.
Reference centralized_reference(const CompositeProblem& p, double tol, int cap,
                                std::optional<Vector> x0 = std::nullopt);

struct RunOptions {
  bool record_wall_time = false;
};

struct RunResult {
  SolverState state;
  std::vector<MetricsRecord> metrics;
  std::optional<Reference> reference;
  int clamped_rows = 0;  // suboptimality rows below -10 tol (clamped and flagged)
};

// Initializes and iterates sched.T() steps of the chosen variant, recording
// one MetricsRecord per step. The baseline reads its step size from
// sched.gamma(t) and records F(z_bar) as its suboptimality.
RunResult run(const CompositeProblem& p, const GossipMatrix& w, const Schedule& sched, const Vector& x1,
              std::optional<Reference> reference = std::nullopt, Variant variant = Variant::odapg,
              RunOptions options = {});

}  // namespace odapg
