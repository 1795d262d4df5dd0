#include <doctest.h>

#include <cmath>
#include <random>

#include "obtl/errors.hpp"
#include "obtl/model.hpp"
#include "obtl/spd_matrix.hpp"
#include "obtl/special_fn.hpp"
#include "test_support.hpp"

using namespace obtl;
namespace ts = test_support;

TEST_CASE("signed log arithmetic") {
  SignedLog a = SignedLog::from(3.0), b = SignedLog::from(-2.0);
  CHECK((a * b).value() == doctest::Approx(-6.0));
  CHECK((a / b).value() == doctest::Approx(-1.5));
  CHECK((a + b).value() == doctest::Approx(1.0));
  CHECK((b + a).value() == doctest::Approx(1.0));
  CHECK((a + SignedLog::from(-3.0)).sign == 0);
  CHECK(SignedLog::zero().value() == 0.0);
  CHECK(SignedLog::one().value() == 1.0);
}

TEST_CASE("multivariate gamma reduces to scalar gamma at d=1") {
  CHECK(log_multivariate_gamma(1, 3.0) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("multivariate gamma matches the defining product at d=2") {
  double expected = 0.5 * std::log(M_PI) + std::lgamma(2.5) + std::lgamma(2.0);
  CHECK(log_multivariate_gamma(2, 2.5) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("multivariate gamma domain boundary") {
  CHECK_THROWS_AS(log_multivariate_gamma(3, 1.0), DomainError);
  CHECK_NOTHROW(log_multivariate_gamma(3, 1.0 + 1e-9));
}

TEST_CASE("generalized Pochhammer basics") {
  CHECK(gen_pochhammer(2.0, Partition(std::vector<int>{})).value() == doctest::Approx(1.0));
  CHECK(gen_pochhammer(2.0, Partition({2})).value() == doctest::Approx(6.0));
  CHECK(gen_pochhammer(1.5, Partition({2, 1})).value() == doctest::Approx(3.75));
  CHECK(gen_pochhammer(0.0, Partition({1})).sign == 0);
}

TEST_CASE("generalized Pochhammer vs rising-factorial oracle") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.3, 4.0);
  for (int rep = 0; rep < 30; ++rep) {
    double a = unif(rng);
    for (const Partition& kappa : enumerate_partitions(4, 3)) {
      double expected = 1.0;
      for (int i = 0; i < kappa.num_parts(); ++i)
        expected *= ts::rising(a - 0.5 * i, kappa.parts()[i]);
      CHECK(gen_pochhammer(a, kappa).value() ==
            doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("zonal degree-1 is the trace") {
  std::vector<double> x{0.4, -0.2, 1.1};
  CHECK(zonal_polynomial(Partition({1}), x) == doctest::Approx(1.3).epsilon(1e-14));
}

TEST_CASE("zonal at d=1 is the power") {
  for (int k = 1; k <= 6; ++k)
    CHECK(zonal_polynomial(Partition({k}), {0.7}) ==
          doctest::Approx(std::pow(0.7, k)).epsilon(1e-13));
}

TEST_CASE("zonal weight-2 hand values") {
  // C_(2) = m_2 + (2/3) m_11, C_(11) = (4/3) m_11
  std::vector<double> x{0.3, 0.5};
  double m2 = 0.09 + 0.25, m11 = 0.15;
  CHECK(zonal_polynomial(Partition({2}), x) ==
        doctest::Approx(m2 + 2.0 / 3.0 * m11).epsilon(1e-13));
  CHECK(zonal_polynomial(Partition({1, 1}), x) ==
        doctest::Approx(4.0 / 3.0 * m11).epsilon(1e-13));
  CHECK(zonal_polynomial(Partition({2}), x) + zonal_polynomial(Partition({1, 1}), x) ==
        doctest::Approx(0.64).epsilon(1e-13));
}

TEST_CASE("zonal weight-3 hand values") {
  // C_(3) = m_3 + (3/5) m_21 + (2/5) m_111, C_(21) = (12/5) m_21 + (18/5) m_111,
  // C_(111) = 2 m_111
  std::vector<double> x{0.2, 0.4, 0.7};
  auto m = [&](std::vector<int> parts) {
    return detail::monomial_symmetric(Partition(std::move(parts)), x);
  };
  CHECK(zonal_polynomial(Partition({3}), x) ==
        doctest::Approx(m({3}) + 0.6 * m({2, 1}) + 0.4 * m({1, 1, 1})).epsilon(1e-13));
  CHECK(zonal_polynomial(Partition({2, 1}), x) ==
        doctest::Approx(2.4 * m({2, 1}) + 3.6 * m({1, 1, 1})).epsilon(1e-13));
  CHECK(zonal_polynomial(Partition({1, 1, 1}), x) ==
        doctest::Approx(2.0 * m({1, 1, 1})).epsilon(1e-13));
}

TEST_CASE("zonal with more parts than eigenvalues is zero") {
  CHECK(zonal_polynomial(Partition({1, 1, 1}), {0.5, 0.2}) == 0.0);
}

TEST_CASE("zonal sum identity up to weight 6") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int d = 1; d <= 4; ++d) {
    for (int rep = 0; rep < 5; ++rep) {
      std::vector<double> x(d);
      for (double& v : x) v = unif(rng);
      double tr = 0.0;
      for (double v : x) tr += v;
      for (int k = 1; k <= 6; ++k) {
        double sum = 0.0;
        for (const Partition& kappa : enumerate_partitions(k, d))
          sum += zonal_polynomial(kappa, x);
        CHECK(sum == doctest::Approx(std::pow(tr, k)).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("zonal orthogonal invariance via congruent spectra") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 5; ++rep) {
    int d = 3;
    Eigen::MatrixXd X = ts::random_spd(d, rng);
    Eigen::MatrixXd H = ts::random_orthogonal(d, rng);
    std::vector<double> ex = symmetric_eigenvalues(X);
    std::vector<double> eh = symmetric_eigenvalues(H * X * H.transpose());
    for (const Partition& kappa : enumerate_partitions(3, d))
      CHECK(zonal_polynomial(kappa, ex) ==
            doctest::Approx(zonal_polynomial(kappa, eh)).epsilon(1e-10));
  }
}

TEST_CASE("0F0 is etr") {
  HypergeomResult r = hypergeom_series({{}, {}}, {0.2, 0.1}, SeriesControl{});
  CHECK(r.value() == doctest::Approx(std::exp(0.3)).epsilon(1e-12));
  CHECK_FALSE(r.truncated);
}

TEST_CASE("1F0 is the determinant power") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unif(-0.5, 0.5);
  std::uniform_real_distribution<double> au(0.5, 4.0);
  for (int rep = 0; rep < 50; ++rep) {
    int d = 1 + static_cast<int>(rng() % 4);
    std::vector<double> x(d);
    double logdet = 0.0;
    for (double& v : x) {
      v = unif(rng);
      logdet += std::log1p(-v);
    }
    double a = au(rng);
    HypergeomResult r = hypergeom_series({{a}, {}}, x, SeriesControl{60, 1e-14});
    CHECK(r.log_value.log_abs == doctest::Approx(-a * logdet).epsilon(1e-8));
  }
}

TEST_CASE("1F1 at d=1 matches the scalar Kummer series") {
  for (double x : {-1.5, -0.3, 0.4, 2.0}) {
    HypergeomResult r = hypergeom_series({{1.3}, {2.7}}, {x}, SeriesControl{60, 1e-14});
    CHECK(r.value() == doctest::Approx(ts::kummer_1f1_scalar(1.3, 2.7, x)).epsilon(1e-10));
  }
}

TEST_CASE("2F1 at d=1 matches the scalar Gauss series") {
  for (double x : {-0.6, -0.2, 0.1, 0.45, 0.8}) {
    HypergeomResult r = hypergeom_series({{1.5, 2.5}, {3.0}}, {x}, SeriesControl{200, 1e-15});
    CHECK(r.value() == doctest::Approx(ts::gauss_2f1_scalar(1.5, 2.5, 3.0, x)).epsilon(1e-10));
  }
}

TEST_CASE("series convergence and truncation diagnostics") {
  CHECK_THROWS_AS(hypergeom_series({{2.0}, {}}, {1.0}, SeriesControl{}), ConvergenceError);
  CHECK_THROWS_AS(hypergeom_series({{2.0}, {}}, {-1.2}, SeriesControl{}), ConvergenceError);
  HypergeomResult r = hypergeom_series({{3.0}, {}}, {0.5, 0.4}, SeriesControl{3, 1e-12});
  CHECK(r.truncated);
  CHECK(r.degree_used == 3);
}

TEST_CASE("lower parameter on the Pochhammer lattice is rejected") {
  // b = 0.5 gives (b)_kappa = 0 for kappa = (1,1)
  CHECK_THROWS_AS(hypergeom_series({{1.0}, {0.5}}, {0.3, 0.2}, SeriesControl{}), DomainError);
}

TEST_CASE("Kummer-type Wishart expectation identity") {
  // E[1F1(a; b; R^{1/2} X R^{1/2})] over R ~ W_d((2Z)^{-1}, 2*alpha)
  // equals 2F1(a, alpha; b; X Z^{-1}).
  const int d = 2;
  const double a = 1.2, b = 2.6, alpha = 1.5, z = 2.0;
  std::vector<double> xeig{0.35, 0.15};
  Eigen::MatrixXd X = Eigen::Vector2d(xeig[0], xeig[1]).asDiagonal();
  SpdMatrix scale(Eigen::MatrixXd::Identity(d, d) / (2.0 * z));

  Rng rng(99);
  const int n = 4000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    SpdMatrix R = sample_wishart(scale, 2.0 * alpha, rng);
    Eigen::MatrixXd Rh = R.sqrt();
    std::vector<double> eig = symmetric_eigenvalues(Rh * X * Rh);
    double v = hypergeom_series({{a}, {b}}, eig, SeriesControl{60, 1e-12}).value();
    sum += v;
    sumsq += v * v;
  }
  double mean = sum / n;
  double se = std::sqrt((sumsq / n - mean * mean) / n);
  std::vector<double> arg{xeig[0] / z, xeig[1] / z};
  double expected = hypergeom_series({{a, alpha}, {b}}, arg, SeriesControl{60, 1e-13}).value();
  CHECK(std::abs(mean - expected) < 3.0 * se + 1e-9);
}

TEST_CASE("Laplace 2F1 is exactly calibrated at zero") {
  CHECK(gauss_2f1_laplace(3.0, 4.0, 6.0, {0.0, 0.0, 0.0}) == 0.0);
}

TEST_CASE("Laplace 2F1 domain checks") {
  CHECK_THROWS_AS(gauss_2f1_laplace(3.0, 4.0, 1.5, {0.1, 0.1, 0.1, 0.1, 0.1}), DomainError);
  CHECK_THROWS_AS(gauss_2f1_laplace(3.0, 4.0, 6.0, {1.0}), DomainError);
}

TEST_CASE("Laplace 2F1 handles zero eigenvalue components smoothly") {
  // x -> 0 in one component should approach the same value as x = 0 exactly
  double at_zero = gauss_2f1_laplace(3.0, 4.0, 6.0, {0.2, 0.0});
  double near_zero = gauss_2f1_laplace(3.0, 4.0, 6.0, {0.2, 1e-12});
  CHECK(at_zero == doctest::Approx(near_zero).epsilon(1e-8));
}

TEST_CASE("Laplace 2F1 tracks the series on the reference grid") {
  // d=5, a=3, b=4, c=6; moderate tau values where the series is cheap
  for (double tau : {0.05, 0.15, 0.25}) {
    std::vector<double> eig(5, tau);
    double lap = gauss_2f1_laplace(3.0, 4.0, 6.0, eig);
    double ser = hypergeom_series({{3.0, 4.0}, {6.0}}, eig, SeriesControl{60, 1e-12})
                     .log_value.log_abs;
    CHECK(std::abs(lap - ser) < 5e-3);
  }
}

TEST_CASE("Laplace 2F1 in the negative c-a regime stays finite") {
  // c - a < 0 as in the transfer-learning usage; value must be finite and
  // close to the series for a small problem
  std::vector<double> eig{0.3, 0.1};
  double lap = gauss_2f1_laplace(4.0, 2.5, 3.0, eig);
  double ser = hypergeom_series({{4.0, 2.5}, {3.0}}, eig, SeriesControl{80, 1e-13})
                   .log_value.log_abs;
  CHECK(std::isfinite(lap));
  CHECK(std::abs(lap - ser) < 0.05);
}

TEST_CASE("Laplace c == a reduction is the closed form") {
  std::vector<double> eig{0.4, 0.2};
  double expected = -3.0 * (std::log1p(-0.4) + std::log1p(-0.2));
  CHECK(gauss_2f1_laplace(2.0, 3.0, 2.0, eig) == doctest::Approx(expected).epsilon(1e-14));
}
