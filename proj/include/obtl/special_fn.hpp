#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "obtl/partition.hpp"

namespace obtl {

/// Signed log-space scalar: value = sign * exp(log_abs). sign in {-1,0,+1}.
struct SignedLog {
  int sign = 0;
  double log_abs = -std::numeric_limits<double>::infinity();

  static SignedLog zero() { return {}; }
  static SignedLog one() { return {1, 0.0}; }
  static SignedLog from(double x) {
    if (x == 0.0) return zero();
    return {x > 0 ? 1 : -1, std::log(std::abs(x))};
  }

  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

  SignedLog operator*(const SignedLog& o) const {
    if (sign == 0 || o.sign == 0) return zero();
    return {sign * o.sign, log_abs + o.log_abs};
  }
  SignedLog operator/(const SignedLog& o) const {
    return {sign * o.sign, log_abs - o.log_abs};
  }
  /// Signed log-space addition (log-sum-exp with signs).
  SignedLog operator+(const SignedLog& o) const;
  SignedLog& operator+=(const SignedLog& o) { return *this = *this + o; }
};

/// log Gamma_d(alpha); requires alpha > (d-1)/2.
double log_multivariate_gamma(int d, double alpha);

/// Generalized Pochhammer symbol (a)_kappa as a signed log-space value.
/// Zeros are allowed (the result is then exactly zero).
SignedLog gen_pochhammer(double a, const Partition& kappa);

/// Zonal polynomial C_kappa evaluated on a spectrum. Returns exactly 0 when
/// kappa has more parts than there are eigenvalues.
double zonal_polynomial(const Partition& kappa, const std::vector<double>& eigenvalues);

struct HypergeomParams {
  std::vector<double> upper;  // a_1..a_p
  std::vector<double> lower;  // b_1..b_q
};

struct SeriesControl {
  int max_degree = 40;
  double rel_tol = 1e-12;
};

struct HypergeomResult {
  SignedLog log_value;
  bool truncated = false;  // max_degree hit before rel_tol was met
  int degree_used = 0;

  double value() const { return log_value.value(); }
};

/// Truncated matrix-argument hypergeometric series pFq(a; b; X), summed by
/// total partition degree with early stopping. Exact oracle for small d/K.
HypergeomResult hypergeom_series(const HypergeomParams& params,
                                 const std::vector<double>& eigenvalues,
                                 const SeriesControl& ctrl);

/// Calibrated Laplace approximation of the Gauss 2F1 of matrix argument.
/// Returns log 2F1_hat(a,b;c;X); exactly 0 at X = 0.
double gauss_2f1_laplace(double a, double b, double c,
                         const std::vector<double>& eigenvalues);

namespace detail {
/// Coefficients of C_kappa in the monomial symmetric basis, cached per
/// (weight, max_parts). Exposed for tests.
struct ZonalCoefficients {
  std::vector<Partition> partitions;                       // lex-decreasing
  std::vector<std::vector<std::pair<int, double>>> table;  // per kappa: (lambda idx, coeff)
};
const ZonalCoefficients& zonal_coefficients(int k, int max_parts);

/// Monomial symmetric polynomial m_lambda(x_1..x_d); 0 if lambda has > d parts.
double monomial_symmetric(const Partition& lambda, const std::vector<double>& x);
}  // namespace detail

}  // namespace obtl
