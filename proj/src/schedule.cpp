#include "odapg/schedule.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "odapg/errors.hpp"

namespace odapg {

std::string to_string(Regime r) {
  switch (r) {
    case Regime::strongly_convex_g: return "strongly_convex_g";
    case Regime::general_convex_g: return "general_convex_g";
    case Regime::extension: return "extension";
    case Regime::constant: return "constant";
  }
  return "unknown";
}

std::optional<Regime> parse_regime(const std::string& name) {
  for (Regime r : {Regime::strongly_convex_g, Regime::general_convex_g, Regime::extension, Regime::constant}) {
    if (to_string(r) == name) return r;
  }
  return std::nullopt;
}

Schedule::Schedule(Regime regime, double gamma, double tau, double mu, double L, double c_f, int K, int T)
    : regime_(regime), gamma_(gamma), tau_(tau), mu_(mu), L_(L), c_f_(c_f), K_(K), T_(T) {
  if (K < 0) throw std::invalid_argument("schedule: K must be >= 0");
  if (T < 0) throw std::invalid_argument("schedule: T must be >= 0");
}

Schedule Schedule::strongly_convex(double L, double mu, int K, int T) {
  if (!(mu > 0.0)) throw RegimeMismatch("strongly_convex_g schedule needs mu > 0");
  if (!(L >= mu)) throw RegimeMismatch("strongly_convex_g schedule needs L >= mu");
  const double gamma = 1.0 / (20.0 * std::sqrt(L * mu));
  return Schedule(Regime::strongly_convex_g, gamma, mu * gamma, mu, L, 0.0, K, T);
}

Schedule Schedule::general_convex(double L, int K, int T, double c_f) {
  if (!(L > 0.0) || !(c_f > 0.0)) throw std::invalid_argument("general_convex_g schedule needs L, c_f > 0");
  return Schedule(Regime::general_convex_g, 0.0, 0.0, 0.0, L, c_f, K, T);
}

Schedule Schedule::extension(double L, double mu, int K, int T) {
  if (!(mu > 0.0)) throw RegimeMismatch("extension schedule needs mu > 0");
  if (L < 2.0 * mu) throw RegimeMismatch("extension schedule needs L >= 2 mu");
  const double gamma = 1.0 / (20.0 * std::sqrt((L - mu) * mu));
  return Schedule(Regime::extension, gamma, mu * gamma, mu, L, 0.0, K, T);
}

Schedule Schedule::constant(double gamma, double tau, int K, int T) {
  if (!(gamma > 0.0)) throw std::invalid_argument("constant schedule needs gamma > 0");
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("constant schedule needs tau in (0, 1]");
  return Schedule(Regime::constant, gamma, tau, 0.0, 0.0, 0.0, K, T);
}

double Schedule::gamma(int t) const {
  if (regime_ == Regime::general_convex_g) return (t + 4.0) / (2.0 * L_ * c_f_);
  return gamma_;
}

double Schedule::tau(int t) const {
  if (regime_ == Regime::general_convex_g) return 2.0 / (t + 4.0);
  return tau_;
}

std::string Schedule::id() const {
  std::ostringstream out;
  out.precision(17);
  switch (regime_) {
    case Regime::general_convex_g:
      out << "general_convex_g(L=" << L_ << ",c_f=" << c_f_ << ")";
      break;
    case Regime::constant:
      out << "constant(gamma=" << gamma_ << ",tau=" << tau_ << ")";
      break;
    default:
      out << to_string(regime_) << "(L=" << L_ << ",mu=" << mu_ << ")";
  }
  return out.str();
}

Schedule& Schedule::with_eta(std::optional<double> eta) {
  eta_ = eta;
  return *this;
}

Schedule& Schedule::with_T(int T) {
  if (T < 0) throw std::invalid_argument("schedule: T must be >= 0");
  T_ = T;
  return *this;
}

Schedule& Schedule::with_K(int K) {
  if (K < 0) throw std::invalid_argument("schedule: K must be >= 0");
  K_ = K;
  return *this;
}

}  // namespace odapg
