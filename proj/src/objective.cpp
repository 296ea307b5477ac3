#include "odapg/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "odapg/errors.hpp"
#include "odapg/kernels.hpp"

namespace odapg {

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

// 1 / (1 + exp(-z))
double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_dim(const Vector& v, Index d, const char* where) {
  if (v.size() != d) {
    throw DimensionMismatch(std::string(where) + ": expected dimension " + std::to_string(d) +
                            ", got " + std::to_string(v.size()));
  }
}

}  // namespace

double soft_threshold(double u, double tau) {
  if (u > tau) return u - tau;
  if (u < -tau) return u + tau;
  return 0.0;
}

ElasticNet::ElasticNet(double sigma, double mu) : sigma_(sigma), mu_(mu) {
  if (!(sigma >= 0.0) || !(mu >= 0.0)) throw std::invalid_argument("elastic net weights must be >= 0");
}

double ElasticNet::value(const Vector& v) const {
  return sigma_ * v.lpNorm<1>() + 0.5 * mu_ * v.squaredNorm();
}

Vector ElasticNet::prox(double gamma, const Vector& v) const {
  const double tau = gamma * sigma_;
  const double scale = 1.0 / (1.0 + gamma * mu_);
  return v.unaryExpr([&](double u) { return soft_threshold(u, tau) * scale; });
}

RegularizerPtr elastic_net(double sigma, double mu) { return std::make_shared<ElasticNet>(sigma, mu); }

LogisticLocal::LogisticLocal(Matrix features, Vector labels)
    : features_(std::move(features)), labels_(std::move(labels)) {
  if (features_.rows() < 1) throw EmptyDataset("logistic local needs at least one sample");
  if (labels_.size() != features_.rows()) throw DimensionMismatch("label count differs from sample count");
  for (Index j = 0; j < labels_.size(); ++j) {
    if (labels_(j) != 1.0 && labels_(j) != -1.0) throw std::invalid_argument("labels must be -1 or +1");
  }
  const double n = static_cast<double>(features_.rows());
  const Matrix gram = features_.transpose() * features_;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw SpectralFailure("logistic smoothness eigensolve failed");
  smoothness_ = std::max(0.0, eig.eigenvalues().maxCoeff()) / (4.0 * n);
}

double LogisticLocal::value(const Vector& v) const {
  check_dim(v, dim(), "logistic value");
  const Vector margins = labels_.cwiseProduct(features_ * v);
  double sum = 0.0;
  for (Index j = 0; j < margins.size(); ++j) sum += softplus(-margins(j));
  return sum / static_cast<double>(features_.rows());
}

Vector LogisticLocal::gradient(const Vector& v) const {
  check_dim(v, dim(), "logistic gradient");
  const Vector margins = labels_.cwiseProduct(features_ * v);
  Vector weights(margins.size());
  for (Index j = 0; j < margins.size(); ++j) weights(j) = -labels_(j) * sigmoid(-margins(j));
  return features_.transpose() * weights / static_cast<double>(features_.rows());
}

QuadraticLocal::QuadraticLocal(Matrix q, Vector b) : q_(std::move(q)), b_(std::move(b)) {
  if (q_.rows() != q_.cols() || q_.rows() != b_.size()) throw DimensionMismatch("quadratic: Q must be d x d");
  const double scale = std::max(1.0, q_.cwiseAbs().maxCoeff());
  if ((q_ - q_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw NonPSD("quadratic: Q is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(q_, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw SpectralFailure("quadratic eigensolve failed");
  const double lo = eig.eigenvalues().minCoeff();
  if (lo < -1e-10 * scale) throw NonPSD("quadratic: Q has eigenvalue " + std::to_string(lo));
  lambda_min_ = std::max(0.0, lo);
  lambda_max_ = std::max(0.0, eig.eigenvalues().maxCoeff());
}

double QuadraticLocal::value(const Vector& v) const {
  check_dim(v, dim(), "quadratic value");
  return 0.5 * v.dot(q_ * v) - b_.dot(v);
}

Vector QuadraticLocal::gradient(const Vector& v) const {
  check_dim(v, dim(), "quadratic gradient");
  return q_ * v - b_;
}

ShiftedLocal::ShiftedLocal(LocalPtr base, double shift) : base_(std::move(base)), shift_(shift) {
  if (!base_) throw std::invalid_argument("shifted local needs a base");
  if (shift_ < 0.0 && -shift_ > base_->strong_convexity() * (1.0 + 1e-12)) {
    throw std::invalid_argument("negative shift exceeds the base's strong convexity");
  }
}

double ShiftedLocal::value(const Vector& v) const { return base_->value(v) + 0.5 * shift_ * v.squaredNorm(); }

Vector ShiftedLocal::gradient(const Vector& v) const { return base_->gradient(v) + shift_ * v; }

double ShiftedLocal::smoothness() const { return base_->smoothness() + shift_; }

double ShiftedLocal::strong_convexity() const { return std::max(0.0, base_->strong_convexity() + shift_); }

LocalPtr logistic_local(Matrix features, Vector labels) {
  return std::make_shared<LogisticLocal>(std::move(features), std::move(labels));
}

LocalPtr quadratic_local(Matrix q, Vector b) { return std::make_shared<QuadraticLocal>(std::move(q), std::move(b)); }

LocalPtr shifted_local(LocalPtr base, double shift) { return std::make_shared<ShiftedLocal>(std::move(base), shift); }

CompositeProblem make_problem(std::vector<LocalPtr> locals, RegularizerPtr reg) {
  if (locals.empty()) throw std::invalid_argument("problem needs at least one local function");
  if (!reg) throw std::invalid_argument("problem needs a regularizer");
  CompositeProblem p;
  p.d = locals.front()->dim();
  p.f_mu = std::numeric_limits<double>::infinity();
  for (const auto& f : locals) {
    if (!f) throw std::invalid_argument("null local function");
    if (f->dim() != p.d) throw DimensionMismatch("local functions disagree on dimension");
    p.L = std::max(p.L, f->smoothness());
    p.f_mu = std::min(p.f_mu, f->strong_convexity());
  }
  p.mu = reg->mu();
  if (p.mu > p.L) {
    throw RegimeMismatch("regularizer modulus " + std::to_string(p.mu) + " exceeds smoothness " +
                         std::to_string(p.L));
  }
  p.locals = std::move(locals);
  p.reg = std::move(reg);
  return p;
}

double smooth_value(const CompositeProblem& p, const Vector& v) {
  double sum = 0.0;
  for (const auto& f : p.locals) sum += f->value(v);
  return sum / static_cast<double>(p.locals.size());
}

Vector smooth_gradient(const CompositeProblem& p, const Vector& v) {
  Vector sum = Vector::Zero(p.d);
  for (const auto& f : p.locals) sum += f->gradient(v);
  return sum / static_cast<double>(p.locals.size());
}

double composite_value(const CompositeProblem& p, const Vector& v) { return smooth_value(p, v) + p.reg->value(v); }

namespace {

template <class ForEachRow>
AgentStates aggregate_gradient_impl(const CompositeProblem& p, const AgentStates& x, GradLedger& counter,
                                    ForEachRow&& for_each_row) {
  if (x.rows() != p.agents() || x.cols() != p.d) {
    throw DimensionMismatch("aggregate_gradient: state is " + std::to_string(x.rows()) + "x" +
                            std::to_string(x.cols()) + ", problem is " + std::to_string(p.agents()) + "x" +
                            std::to_string(p.d));
  }
  AgentStates out(x.rows(), x.cols());
  for_each_row(x.rows(), [&](Index i) { out.row(i) = p.locals[i]->gradient(x.row(i).transpose()).transpose(); });
  counter.count += x.rows();
  return out;
}

}  // namespace

AgentStates aggregate_gradient(const CompositeProblem& p, const AgentStates& x, GradLedger& counter) {
  return aggregate_gradient_impl(p, x, counter, [](Index m, auto&& fn) { kernels::omp::for_each_row(m, fn); });
}

AgentStates aggregate_gradient_serial(const CompositeProblem& p, const AgentStates& x, GradLedger& counter) {
  return aggregate_gradient_impl(p, x, counter, [](Index m, auto&& fn) { kernels::serial::for_each_row(m, fn); });
}

AgentStates aggregate_prox(const Regularizer& reg, double gamma, const AgentStates& x) {
  if (!(gamma > 0.0)) throw std::invalid_argument("prox step must be positive");
  AgentStates out(x.rows(), x.cols());
  kernels::omp::for_each_row(x.rows(),
                             [&](Index i) { out.row(i) = reg.prox(gamma, x.row(i).transpose()).transpose(); });
  return out;
}

double bregman_df(const CompositeProblem& p, const Vector& y, const AgentStates& x) {
  if (x.rows() != p.agents() || x.cols() != p.d || y.size() != p.d) throw DimensionMismatch("bregman_df");
  double sum = 0.0;
  for (Index i = 0; i < x.rows(); ++i) {
    const Vector xi = x.row(i).transpose();
    const auto& f = *p.locals[i];
    sum += f.value(y) - f.value(xi) - f.gradient(xi).dot(y - xi);
  }
  return sum / static_cast<double>(x.rows());
}

std::vector<Dataset> synth_logistic(int m, int n_per_agent, int d, std::uint64_t seed) {
  if (m < 1 || n_per_agent < 1 || d < 1) throw std::invalid_argument("synth_logistic: sizes must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Sparse ground truth: roughly a fifth of the coordinates active.
  Vector truth = Vector::Zero(d);
  const int active = std::max(1, d / 5);
  std::vector<int> coords(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) coords[j] = j;
  std::shuffle(coords.begin(), coords.end(), rng);
  for (int j = 0; j < active; ++j) truth(coords[j]) = normal(rng);

  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<Dataset> parts(static_cast<std::size_t>(m));
  for (auto& part : parts) {
    part.features.resize(n_per_agent, d);
    part.labels.resize(n_per_agent);
    for (int j = 0; j < n_per_agent; ++j) {
      for (int k = 0; k < d; ++k) part.features(j, k) = normal(rng) * scale;
      double label = part.features.row(j).dot(truth) >= 0.0 ? 1.0 : -1.0;
      if (unit(rng) < 0.1) label = -label;
      part.labels(j) = label;
    }
  }
  return parts;
}

std::vector<LocalPtr> logistic_locals(const std::vector<Dataset>& parts) {
  std::vector<LocalPtr> locals;
  locals.reserve(parts.size());
  for (const auto& part : parts) locals.push_back(logistic_local(part.features, part.labels));
  return locals;
}

}  // namespace odapg
