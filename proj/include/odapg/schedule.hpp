#pragma once

#include <optional>
#include <string>

namespace odapg {

enum class Regime { strongly_convex_g, general_convex_g, extension, constant };

std::string to_string(Regime r);
std::optional<Regime> parse_regime(const std::string& name);

// Step-size and momentum sequences plus mixing parameters. Iterations are
// indexed from t = 1.
class Schedule {
 public:
  // gamma = 1/(20 sqrt(L mu)), tau = mu gamma. Throws RegimeMismatch if mu <= 0.
  static Schedule strongly_convex(double L, double mu, int K, int T);
  // gamma_t = (t+4)/(2 L c_f), tau_t = 2/(t+4).
  static Schedule general_convex(double L, int K, int T, double c_f = 200.0);
  // gamma = 1/(20 sqrt((L-mu) mu)), tau = mu gamma, mu being the locals'
  // strong convexity. Requires mu > 0 and L >= 2 mu.
  static Schedule extension(double L, double mu, int K, int T);
  // User-supplied constants; used for overrides and the baseline.
  static Schedule constant(double gamma, double tau, int K, int T);

  Regime regime() const { return regime_; }
  double gamma(int t) const;
  double tau(int t) const;
  int K() const { return K_; }
  int T() const { return T_; }
  // Strong-convexity modulus the schedule was built for (0 for general/constant).
  double mu() const { return mu_; }
  double c_f() const { return c_f_; }
  std::optional<double> eta() const { return eta_; }
  std::string id() const;

  Schedule& with_eta(std::optional<double> eta);
  Schedule& with_T(int T);
  Schedule& with_K(int K);

 private:
  Schedule(Regime regime, double gamma, double tau, double mu, double L, double c_f, int K, int T);

  Regime regime_;
  double gamma_;
  double tau_;
  double mu_;
  double L_;
  double c_f_;
  int K_;
  int T_;
  std::optional<double> eta_;
};

}  // namespace odapg
