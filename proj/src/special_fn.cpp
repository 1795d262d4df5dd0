#include "obtl/special_fn.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <unordered_map>

#include "obtl/errors.hpp"

namespace obtl {

SignedLog SignedLog::operator+(const SignedLog& o) const {
  if (sign == 0) return o;
  if (o.sign == 0) return *this;
  const SignedLog* big = this;
  const SignedLog* small = &o;
  if (small->log_abs > big->log_abs) std::swap(big, small);
  double r = std::exp(small->log_abs - big->log_abs);  // in [0,1]
  double combined = (big->sign == small->sign) ? 1.0 + r : 1.0 - r;
  if (combined <= 0.0) {
    if (combined == 0.0) return zero();
    // only possible through roundoff; treat as exact cancellation
    return zero();
  }
  return {big->sign, big->log_abs + std::log(combined)};
}

double log_multivariate_gamma(int d, double alpha) {
  if (d < 1) throw DomainError("log_multivariate_gamma: d must be >= 1");
  if (!(alpha > 0.5 * (d - 1)))
    throw DomainError("log_multivariate_gamma: alpha must exceed (d-1)/2");
  double s = 0.25 * d * (d - 1) * std::log(M_PI);
  for (int i = 1; i <= d; ++i) s += std::lgamma(alpha - 0.5 * (i - 1));
  return s;
}

SignedLog gen_pochhammer(double a, const Partition& kappa) {
  SignedLog r = SignedLog::one();
  const auto& parts = kappa.parts();
  for (std::size_t i = 0; i < parts.size(); ++i) {
    double base = a - 0.5 * static_cast<double>(i);
    for (int j = 0; j < parts[i]; ++j) {
      double f = base + j;
      if (f == 0.0) return SignedLog::zero();
      r = r * SignedLog::from(f);
    }
  }
  return r;
}

namespace detail {

namespace {

// rho_kappa = sum_i k_i (k_i - i), 1-based i; enters the recurrence denominator.
long long rho(const Partition& p) {
  long long s = 0;
  const auto& parts = p.parts();
  for (std::size_t i = 0; i < parts.size(); ++i)
    s += static_cast<long long>(parts[i]) * (parts[i] - static_cast<long long>(i) - 1);
  return s;
}

// Leading coefficient of C_kappa on m_kappa: 2^k k! / prod of upper hooks,
// upper hook at box (i,j) being 2(arm+1) + leg for the Jack parameter 2.
double leading_coefficient(const Partition& kappa) {
  const auto& parts = kappa.parts();
  int k = kappa.weight();
  double log_num = k * std::log(2.0) + std::lgamma(k + 1.0);
  double log_den = 0.0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    for (int j = 1; j <= parts[i]; ++j) {
      int arm = parts[i] - j;
      int leg = 0;
      for (std::size_t r = i + 1; r < parts.size(); ++r)
        if (parts[r] >= j) ++leg;
      log_den += std::log(2.0 * (arm + 1) + leg);
    }
  }
  return std::exp(log_num - log_den);
}

ZonalCoefficients build_zonal_coefficients(int k, int max_parts) {
  ZonalCoefficients zc;
  zc.partitions = enumerate_partitions(k, max_parts);
  const int n = static_cast<int>(zc.partitions.size());
  std::unordered_map<Partition, int, PartitionHash> index;
  for (int i = 0; i < n; ++i) index.emplace(zc.partitions[i], i);

  std::vector<long long> rhos(n);
  for (int i = 0; i < n; ++i) rhos[i] = rho(zc.partitions[i]);

  // Move lists are independent of kappa; build them once per layer. A move
  // lambda -> mu shifts t boxes from part j up to part i, which always climbs
  // in dominance, so contributions below only flow inside kappa's dominance
  // ideal and the c[mu] != 0 test subsumes the dominance filter.
  std::vector<std::vector<std::pair<int, double>>> moves(n);
  for (int li = 0; li < n; ++li) {
    const auto& lp = zc.partitions[li].parts();
    for (std::size_t i = 0; i + 1 < lp.size(); ++i) {
      for (std::size_t j = i + 1; j < lp.size(); ++j) {
        for (int t = 1; t <= lp[j]; ++t) {
          std::vector<int> m(lp);
          m[i] += t;
          m[j] -= t;
          std::sort(m.begin(), m.end(), std::greater<int>());
          while (!m.empty() && m.back() == 0) m.pop_back();
          if (static_cast<int>(m.size()) > max_parts) continue;
          auto it = index.find(Partition(m));
          if (it == index.end()) continue;
          moves[li].emplace_back(it->second, static_cast<double>(lp[i] + t - (lp[j] - t)));
        }
      }
    }
  }

  zc.table.resize(n);
  std::vector<double> c(n);
  for (int ki = 0; ki < n; ++ki) {
    // Partitions are lex-decreasing and dominance implies lex order, so a
    // simple forward sweep from kappa visits each lambda after everything
    // above it.
    std::fill(c.begin(), c.end(), 0.0);
    c[ki] = leading_coefficient(zc.partitions[ki]);
    for (int li = ki + 1; li < n; ++li) {
      double acc = 0.0;
      for (const auto& [mi, w] : moves[li])
        if (c[mi] != 0.0) acc += w * c[mi];
      if (acc != 0.0) c[li] = acc / static_cast<double>(rhos[ki] - rhos[li]);
    }
    for (int li = ki; li < n; ++li)
      if (c[li] != 0.0) zc.table[ki].emplace_back(li, c[li]);
  }
  return zc;
}

std::mutex g_zonal_mutex;
std::map<std::pair<int, int>, ZonalCoefficients> g_zonal_cache;

}  // namespace

const ZonalCoefficients& zonal_coefficients(int k, int max_parts) {
  std::lock_guard<std::mutex> lock(g_zonal_mutex);
  auto key = std::make_pair(k, max_parts);
  auto it = g_zonal_cache.find(key);
  if (it == g_zonal_cache.end())
    it = g_zonal_cache.emplace(key, build_zonal_coefficients(k, max_parts)).first;
  return it->second;
}

double monomial_symmetric(const Partition& lambda, const std::vector<double>& x) {
  const int d = static_cast<int>(x.size());
  if (lambda.num_parts() > d) return 0.0;
  std::vector<int> expo(d, 0);
  for (int i = 0; i < lambda.num_parts(); ++i) expo[i] = lambda.parts()[i];
  std::sort(expo.begin(), expo.end());
  double sum = 0.0;
  do {
    double term = 1.0;
    for (int i = 0; i < d; ++i)
      if (expo[i] != 0) term *= std::pow(x[i], expo[i]);
    sum += term;
  } while (std::next_permutation(expo.begin(), expo.end()));
  return sum;
}

}  // namespace detail

double zonal_polynomial(const Partition& kappa, const std::vector<double>& eigenvalues) {
  const int d = static_cast<int>(eigenvalues.size());
  if (kappa.num_parts() > d) return 0.0;
  if (d < kappa.num_parts()) return 0.0;
  if (kappa.weight() == 0) return 1.0;
  const auto& zc = detail::zonal_coefficients(kappa.weight(), d);
  auto it = std::find(zc.partitions.begin(), zc.partitions.end(), kappa);
  if (it == zc.partitions.end()) return 0.0;
  int ki = static_cast<int>(it - zc.partitions.begin());
  double v = 0.0;
  for (const auto& [li, coef] : zc.table[ki])
    v += coef * detail::monomial_symmetric(zc.partitions[li], eigenvalues);
  return v;
}

HypergeomResult hypergeom_series(const HypergeomParams& params,
                                 const std::vector<double>& eigenvalues,
                                 const SeriesControl& ctrl) {
  if (ctrl.max_degree < 0 || !(ctrl.rel_tol > 0.0))
    throw DomainError("hypergeom_series: invalid series control");
  const int d = static_cast<int>(eigenvalues.size());
  if (d < 1) throw DomainError("hypergeom_series: empty spectrum");
  if (params.upper.size() > params.lower.size()) {
    double rad = 0.0;
    for (double x : eigenvalues) rad = std::max(rad, std::abs(x));
    if (!(rad < 1.0))
      throw ConvergenceError("hypergeom_series: spectral radius must be < 1 for p > q");
  }

  HypergeomResult res;
  res.log_value = SignedLog::zero();
  const double log_tol = std::log(ctrl.rel_tol);
  for (int k = 0; k <= ctrl.max_degree; ++k) {
    const auto& zc = detail::zonal_coefficients(k, std::min(k == 0 ? 1 : k, d));
    // m_lambda values shared by every kappa in this degree layer
    std::vector<double> mvals(zc.partitions.size());
    for (std::size_t i = 0; i < zc.partitions.size(); ++i)
      mvals[i] = detail::monomial_symmetric(zc.partitions[i], eigenvalues);

    SignedLog layer = SignedLog::zero();
    const double log_kfact = std::lgamma(k + 1.0);
    for (std::size_t ki = 0; ki < zc.partitions.size(); ++ki) {
      double czonal = 0.0;
      for (const auto& [li, coef] : zc.table[ki]) czonal += coef * mvals[li];
      if (czonal == 0.0) continue;
      const Partition& kappa = zc.partitions[ki];
      SignedLog term = SignedLog::from(czonal);
      term.log_abs -= log_kfact;
      for (double a : params.upper) term = term * gen_pochhammer(a, kappa);
      for (double b : params.lower) {
        SignedLog pb = gen_pochhammer(b, kappa);
        if (pb.sign == 0)
          throw DomainError("hypergeom_series: lower parameter zeroes a Pochhammer term");
        term = term / pb;
      }
      layer += term;
    }
    res.log_value += layer;
    res.degree_used = k;
    if (k >= 1) {
      if (layer.sign == 0 ||
          (res.log_value.sign != 0 && layer.log_abs - res.log_value.log_abs < log_tol))
        return res;
    }
  }
  res.truncated = true;
  return res;
}

double gauss_2f1_laplace(double a, double b, double c,
                         const std::vector<double>& eigenvalues) {
  const int d = static_cast<int>(eigenvalues.size());
  if (d < 1) throw DomainError("gauss_2f1_laplace: empty spectrum");
  if (!(c > 0.5 * (d - 1)))
    throw DomainError("gauss_2f1_laplace: c must exceed (d-1)/2");
  bool all_zero = true;
  for (double x : eigenvalues) {
    if (!(x < 1.0)) throw DomainError("gauss_2f1_laplace: eigenvalues must be < 1");
    if (x != 0.0) all_zero = false;
  }
  if (all_zero) return 0.0;  // calibration point
  if (c == a) {
    // 2F1(a,b;a;X) = |I - X|^{-b}
    double s = 0.0;
    for (double x : eigenvalues) s -= b * std::log1p(-x);
    return s;
  }

  std::vector<double> yhat(d);
  double per_eig = 0.0;
  for (int i = 0; i < d; ++i) {
    const double x = eigenvalues[i];
    if (x == 0.0) {
      yhat[i] = a / c;  // analytic limit of the saddle
    } else {
      const double tau = x * (b - a) - c;
      const double disc = tau * tau - 4.0 * a * x * (c - b);
      if (disc < 0.0) throw SaddleError("gauss_2f1_laplace: negative saddle discriminant");
      const double den = std::sqrt(disc) - tau;
      if (den == 0.0) throw SaddleError("gauss_2f1_laplace: degenerate saddle");
      yhat[i] = 2.0 * a / den;
    }
    const double r1 = yhat[i] / a;
    const double r2 = (1.0 - yhat[i]) / (c - a);
    const double r3 = 1.0 - x * yhat[i];
    if (!(r1 > 0.0) || !(r2 > 0.0) || !(r3 > 0.0))
      throw SaddleError("gauss_2f1_laplace: saddle outside admissible region");
    per_eig += a * std::log(r1) + (c - a) * std::log(r2) - b * std::log(r3);
  }

  double log_r21 = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      const double xi = eigenvalues[i], xj = eigenvalues[j];
      const double yi = yhat[i], yj = yhat[j];
      const double r = yi * yj / a + (1.0 - yi) * (1.0 - yj) / (c - a) -
                       b * xi * xj * yi * yj * (1.0 - yi) * (1.0 - yj) /
                           ((1.0 - xi * yi) * (1.0 - xj * yj) * a * (c - a));
      if (!(r > 0.0)) throw CurvatureError("gauss_2f1_laplace: R_{2,1} factor <= 0");
      log_r21 += std::log(r);
    }
  }

  return (c * d - 0.25 * d * (d + 1)) * std::log(c) - 0.5 * log_r21 + per_eig;
}

}  // namespace obtl
