#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gcnsamp/common.hpp"

namespace gcnsamp {

/// Absolute Maclaurin coefficients |c_i| of a smooth activation.
///
/// `coeffs` holds i = 0..I_max. When `extend` is set it returns |c_i| for any
/// i, which lets the complexity sums check convergence past I_max; without it
/// the series is a polynomial and coefficients beyond I_max are zero.
struct PowerSeries {
  std::string name;
  std::vector<double> coeffs;
  std::function<double(Index)> extend;

  double coeff(Index i) const;
  Index max_index() const { return static_cast<Index>(coeffs.size()) - 1; }
};

inline constexpr Index kSeriesTerms = 64;

// "sin", "cos", "exp", "identity", "tanh"; see also polynomial_series.
PowerSeries builtin_series(const std::string& name);
PowerSeries polynomial_series(std::span<const double> coeffs);

/// sum_i ((C* R)^i + (sqrt(log(1/eps)/i) C* R)^i) |c_i|, with the i = 0 second
/// term equal to |c_0|. Evaluated at I_max, 2 I_max and 4 I_max terms; throws
/// NumericalError("series not converged") if either doubling moves the sum by
/// more than 1e-9 relative.
double c_eps(const PowerSeries& series, double R, double eps, double cstar = 1.0);

// C* sum_i (i+1)^1.75 R^i |c_i|, with the same convergence rule.
double c_s(const PowerSeries& series, double R, double cstar = 1.0);

struct ComplexityConstants {
  double C = 0.0;
  double C_prime = 0.0;
  double C_dprime = 0.0;
  double C0 = 0.0;
};

/// Width/regularizer constants of the three-layer algorithm. The polylog
/// factor hidden in C0 is `log_factor`.
ComplexityConstants derive_constants(const PowerSeries& phi, const PowerSeries& Phi, double a_inf, double p1,
                                     double p2, double K, double eps, double cstar = 1.0,
                                     double log_factor = 1.0);

}  // namespace gcnsamp
