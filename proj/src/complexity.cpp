#include "gcnsamp/complexity.hpp"

#include <cmath>
#include <memory>

namespace gcnsamp {

double PowerSeries::coeff(Index i) const {
  if (i < 0) return 0.0;
  if (i < static_cast<Index>(coeffs.size())) return coeffs[i];
  return extend ? extend(i) : 0.0;
}

namespace {

double inv_factorial(Index i) { return std::exp(-std::lgamma(static_cast<double>(i) + 1.0)); }

PowerSeries from_generator(std::string name, std::function<double(Index)> gen) {
  PowerSeries s;
  s.name = std::move(name);
  for (Index i = 0; i <= kSeriesTerms; ++i) s.coeffs.push_back(gen(i));
  s.extend = std::move(gen);
  return s;
}

// tanh' = 1 - tanh^2 gives (n+1) a_{n+1} = -sum_{k} a_k a_{n-k} for n >= 1.
// Precomputed far past the 4 * I_max terms the convergence check reads, so the
// generator is immutable and safe to share across threads.
std::function<double(Index)> tanh_generator() {
  constexpr Index kTerms = 16 * kSeriesTerms;
  std::vector<double> a{0.0, 1.0};
  while (static_cast<Index>(a.size()) <= kTerms) {
    const Index n = static_cast<Index>(a.size()) - 1;
    double conv = 0.0;
    for (Index k = 0; k <= n; ++k) conv += a[k] * a[n - k];
    a.push_back(-conv / static_cast<double>(n + 1));
  }
  for (double& v : a) v = std::abs(v);
  auto table = std::make_shared<const std::vector<double>>(std::move(a));
  return [table](Index i) { return i < static_cast<Index>(table->size()) ? (*table)[i] : 0.0; };
}

template <typename Term>
double converged_sum(const PowerSeries& series, Term term) {
  auto partial = [&](Index terms) {
    double s = 0.0;
    for (Index i = 0; i <= terms; ++i) {
      const double c = series.coeff(i);
      if (c != 0.0) s += term(i, c);
    }
    return s;
  };
  if (!series.extend) {
    const double s = partial(series.max_index());
    if (!std::isfinite(s)) throw NumericalError("series not converged: " + series.name);
    return s;
  }
  const Index base = std::max<Index>(series.max_index(), 1);
  const double s1 = partial(base);
  const double s2 = partial(2 * base);
  const double s4 = partial(4 * base);
  auto moved = [](double a, double b) { return std::abs(b - a) > 1e-9 * std::abs(b); };
  if (!std::isfinite(s4) || moved(s1, s2) || moved(s2, s4))
    throw NumericalError("series not converged: " + series.name);
  return s4;
}

// x^i with 0^0 = 1, computed in the log domain to avoid overflow of the factors.
double power_times(double x, Index i, double c) {
  if (i == 0) return c;
  if (x == 0.0) return 0.0;
  return std::exp(static_cast<double>(i) * std::log(x) + std::log(c));
}

}  // namespace

PowerSeries builtin_series(const std::string& name) {
  if (name == "sin")
    return from_generator(name, [](Index i) { return i % 2 == 1 ? inv_factorial(i) : 0.0; });
  if (name == "cos")
    return from_generator(name, [](Index i) { return i % 2 == 0 ? inv_factorial(i) : 0.0; });
  if (name == "exp") return from_generator(name, [](Index i) { return inv_factorial(i); });
  if (name == "tanh") return from_generator(name, tanh_generator());
  if (name == "identity") {
    const double c[] = {0.0, 1.0};
    auto s = polynomial_series(c);
    s.name = name;
    return s;
  }
  throw ConfigError("unknown series \"" + name + "\"");
}

PowerSeries polynomial_series(std::span<const double> coeffs) {
  PowerSeries s;
  s.name = "poly";
  for (double c : coeffs) {
    if (!std::isfinite(c)) throw ConfigError("polynomial coefficients must be finite");
    s.coeffs.push_back(std::abs(c));
  }
  if (s.coeffs.empty()) s.coeffs.push_back(0.0);
  return s;
}

double c_eps(const PowerSeries& series, double R, double eps, double cstar) {
  if (!(R >= 0.0)) throw ConfigError("c_eps: R must be >= 0");
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("c_eps: eps must be in (0, 1)");
  if (!(cstar > 0.0)) throw ConfigError("c_eps: C* must be positive");
  const double x = cstar * R;
  const double log_inv = std::log(1.0 / eps);
  return converged_sum(series, [&](Index i, double c) {
    const double first = power_times(x, i, c);
    const double second = i == 0 ? c : power_times(std::sqrt(log_inv / static_cast<double>(i)) * x, i, c);
    return first + second;
  });
}

double c_s(const PowerSeries& series, double R, double cstar) {
  if (!(R >= 0.0)) throw ConfigError("c_s: R must be >= 0");
  if (!(cstar > 0.0)) throw ConfigError("c_s: C* must be positive");
  return cstar * converged_sum(series, [&](Index i, double c) {
           return std::pow(static_cast<double>(i + 1), 1.75) * power_times(R, i, c);
         });
}

ComplexityConstants derive_constants(const PowerSeries& phi, const PowerSeries& Phi, double a_inf, double p1,
                                     double p2, double K, double eps, double cstar, double log_factor) {
  for (double v : {a_inf, p1, p2, K, log_factor})
    if (!std::isfinite(v) || v < 0.0) throw ConfigError("derive_constants: inputs must be finite and >= 0");
  ComplexityConstants k;
  const double graph = std::sqrt(a_inf * a_inf + 1.0);
  k.C = c_eps(phi, a_inf, eps, cstar) * graph;
  k.C_prime = 10.0 * k.C * std::sqrt(p2);
  k.C_dprime = c_eps(Phi, k.C_prime, eps, cstar) * graph;
  k.C0 = log_factor * p1 * p1 * p2 * K * K * k.C * k.C_dprime;
  return k;
}

}  // namespace gcnsamp
