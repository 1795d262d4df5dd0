#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

// Shared numeric oracles for the test suite. Everything here is implemented
// independently of the library under test.
namespace test_support {

inline double simpson(const std::function<double(double)>& f, double a, double b) {
  return (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol, double whole, int depth) {
  double m = 0.5 * (a + b);
  double left = simpson(f, a, m), right = simpson(f, m, b);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, 0.5 * tol, left, depth - 1) +
         adaptive_simpson(f, m, b, 0.5 * tol, right, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10) {
  return adaptive_simpson(f, a, b, tol, simpson(f, a, b), 40);
}

inline double rising(double a, int n) {
  double p = 1.0;
  for (int i = 0; i < n; ++i) p *= a + i;
  return p;
}

/// Classical scalar Gauss series, |x| < 1.
inline double gauss_2f1_scalar(double a, double b, double c, double x) {
  double term = 1.0, sum = 1.0;
  for (int n = 0; n < 500; ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * x;
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) break;
  }
  return sum;
}

inline double kummer_1f1_scalar(double a, double b, double x) {
  double term = 1.0, sum = 1.0;
  for (int n = 0; n < 800; ++n) {
    term *= (a + n) / ((b + n) * (n + 1.0)) * x;
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) break;
  }
  return sum;
}

/// Regularized lower incomplete gamma P(s, x) (series for x < s+1, else via
/// the continued fraction for Q).
inline double gamma_p(double s, double x) {
  if (x <= 0.0) return 0.0;
  double lg = std::lgamma(s);
  if (x < s + 1.0) {
    double term = 1.0 / s, sum = term;
    for (int n = 1; n < 500; ++n) {
      term *= x / (s + n);
      sum += term;
      if (term < 1e-16 * sum) break;
    }
    return sum * std::exp(-x + s * std::log(x) - lg);
  }
  // Lentz continued fraction for Q(s, x)
  double tiny = 1e-300;
  double b = x + 1.0 - s, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  double q = std::exp(-x + s * std::log(x) - lg) * h;
  return 1.0 - q;
}

/// chi-square CDF with (possibly fractional) k degrees of freedom.
inline double chi2_cdf(double x, double k) { return gamma_p(0.5 * k, 0.5 * x); }

/// gamma(shape, scale) CDF.
inline double gamma_cdf(double x, double shape, double scale) {
  return gamma_p(shape, x / scale);
}

inline Eigen::MatrixXd random_spd(int d, std::mt19937_64& rng, double jitter = 0.5) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd A(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) A(i, j) = normal(rng);
  return A * A.transpose() + jitter * static_cast<double>(d) * Eigen::MatrixXd::Identity(d, d);
}

inline Eigen::MatrixXd random_orthogonal(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd A(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) A(i, j) = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
  Eigen::MatrixXd Q = qr.householderQ();
  Eigen::VectorXd diag = qr.matrixQR().diagonal();
  for (int j = 0; j < d; ++j)
    if (diag(j) < 0) Q.col(j) = -Q.col(j);
  return Q;
}

}  // namespace test_support
