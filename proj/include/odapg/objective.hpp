#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "odapg/types.hpp"

namespace odapg {

// A convex, L-smooth local function f_i. Implementations are immutable after
// construction and safe to evaluate concurrently.
class SmoothLocal {
 public:
  virtual ~SmoothLocal() = default;
  virtual Index dim() const = 0;
  virtual double value(const Vector& v) const = 0;
  virtual Vector gradient(const Vector& v) const = 0;
  // Global smoothness bound L.
  virtual double smoothness() const = 0;
  // Known strong-convexity modulus; 0 when none is certified.
  virtual double strong_convexity() const { return 0.0; }
};

using LocalPtr = std::shared_ptr<const SmoothLocal>;

// Convex regularizer g with a closed-form proximal map and modulus mu.
class Regularizer {
 public:
  virtual ~Regularizer() = default;
  virtual double value(const Vector& v) const = 0;
  // argmin_w gamma g(w) + 1/2 ||w - v||^2
  virtual Vector prox(double gamma, const Vector& v) const = 0;
  virtual double mu() const = 0;
};

using RegularizerPtr = std::shared_ptr<const Regularizer>;

// g(v) = sigma ||v||_1 + (mu/2) ||v||^2.
class ElasticNet final : public Regularizer {
 public:
  ElasticNet(double sigma, double mu);
  double value(const Vector& v) const override;
  Vector prox(double gamma, const Vector& v) const override;
  double mu() const override { return mu_; }
  double sigma() const { return sigma_; }

 private:
  double sigma_;
  double mu_;
};

RegularizerPtr elastic_net(double sigma, double mu);
inline RegularizerPtr zero_regularizer() { return elastic_net(0.0, 0.0); }

double soft_threshold(double u, double tau);

// (1/n) sum_j log(1 + exp(-b_j <a_j, v>)), L = lambda_max(A^T A) / (4n).
class LogisticLocal final : public SmoothLocal {
 public:
  LogisticLocal(Matrix features, Vector labels);
  Index dim() const override { return features_.cols(); }
  double value(const Vector& v) const override;
  Vector gradient(const Vector& v) const override;
  double smoothness() const override { return smoothness_; }

 private:
  Matrix features_;
  Vector labels_;
  double smoothness_;
};

// 1/2 v^T Q v - b^T v with Q symmetric PSD (throws NonPSD otherwise).
class QuadraticLocal final : public SmoothLocal {
 public:
  QuadraticLocal(Matrix q, Vector b);
  Index dim() const override { return b_.size(); }
  double value(const Vector& v) const override;
  Vector gradient(const Vector& v) const override;
  double smoothness() const override { return lambda_max_; }
  double strong_convexity() const override { return lambda_min_; }
  const Matrix& q() const { return q_; }
  const Vector& b() const { return b_; }

 private:
  Matrix q_;
  Vector b_;
  double lambda_max_;
  double lambda_min_;
};

// base(v) + (shift/2) ||v||^2. A negative shift must not exceed the base's
// strong-convexity modulus in magnitude (checked at construction).
class ShiftedLocal final : public SmoothLocal {
 public:
  ShiftedLocal(LocalPtr base, double shift);
  Index dim() const override { return base_->dim(); }
  double value(const Vector& v) const override;
  Vector gradient(const Vector& v) const override;
  double smoothness() const override;
  double strong_convexity() const override;

 private:
  LocalPtr base_;
  double shift_;
};

LocalPtr logistic_local(Matrix features, Vector labels);
LocalPtr quadratic_local(Matrix q, Vector b);
LocalPtr shifted_local(LocalPtr base, double shift);

// F(x) = (1/m) sum_i f_i(x) + g(x).
struct CompositeProblem {
  std::vector<LocalPtr> locals;
  RegularizerPtr reg;
  double L = 0.0;     // max_i L_i
  double mu = 0.0;    // reg->mu()
  double f_mu = 0.0;  // min_i strong convexity of the locals
  Index d = 0;

  Index agents() const { return static_cast<Index>(locals.size()); }
};

// Checks dimensions and 0 <= mu <= L; fills the derived constants.
CompositeProblem make_problem(std::vector<LocalPtr> locals, RegularizerPtr reg);

// (1/m) sum_i f_i(v)
double smooth_value(const CompositeProblem& p, const Vector& v);
// (1/m) sum_i grad f_i(v)
Vector smooth_gradient(const CompositeProblem& p, const Vector& v);
double composite_value(const CompositeProblem& p, const Vector& v);

// Row i = grad f_i(x row i); counter += m.
AgentStates aggregate_gradient(const CompositeProblem& p, const AgentStates& x, GradLedger& counter);
// Serial reference of aggregate_gradient, for tests and benchmarks.
AgentStates aggregate_gradient_serial(const CompositeProblem& p, const AgentStates& x,
                                      GradLedger& counter);

// Row-wise prox_{gamma g}.
AgentStates aggregate_prox(const Regularizer& reg, double gamma, const AgentStates& x);

// (1/m) sum_i [f_i(y) - f_i(x_i) - <grad f_i(x_i), y - x_i>]. Diagnostic only,
// not charged to any ledger.
double bregman_df(const CompositeProblem& p, const Vector& y, const AgentStates& x);

struct Dataset {
  Matrix features;  // n x d
  Vector labels;    // entries in {-1, +1}

  Index samples() const { return features.rows(); }
  Index dim() const { return features.cols(); }
};

struct LibsvmReadInfo {
  long remapped_zero_labels = 0;
};

// libsvm sparse text ("label idx:val ..."), 1-based indices. Labels 0 are
// remapped to -1. d_hint fixes the feature dimension (larger indices are a
// ParseError); otherwise it is the largest index seen.
Dataset read_libsvm(const std::string& path, std::optional<Index> d_hint = std::nullopt,
                    LibsvmReadInfo* info = nullptr);

enum class PartitionScheme { contiguous, round_robin };

// Splits rows across m agents as evenly as possible (first n mod m agents get
// one extra row). round_robin shuffles rows with seed before dealing.
std::vector<Dataset> partition(const Dataset& data, int m, PartitionScheme scheme,
                               std::uint64_t seed = 0);

// Features i.i.d. N(0,1)/sqrt(d); labels from a sparse ground-truth
// hyperplane with 10% flips. Deterministic in seed.
std::vector<Dataset> synth_logistic(int m, int n_per_agent, int d, std::uint64_t seed);

// One logistic local per agent dataset.
std::vector<LocalPtr> logistic_locals(const std::vector<Dataset>& parts);

}  // namespace odapg
