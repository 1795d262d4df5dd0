#include <doctest.h>

#include <random>

#include "obtl/errors.hpp"
#include "obtl/spd_matrix.hpp"
#include "test_support.hpp"

using namespace obtl;
namespace ts = test_support;

TEST_CASE("construction symmetrizes and checks positive definiteness") {
  Eigen::MatrixXd m(2, 2);
  m << 2.0, 0.5, 0.3, 1.0;  // slightly asymmetric input
  SpdMatrix s(m);
  CHECK(s.matrix()(0, 1) == doctest::Approx(0.4));
  CHECK(s.matrix()(1, 0) == doctest::Approx(0.4));

  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(SpdMatrix{bad}, FactorizationError);
}

TEST_CASE("log_det, inverse and sqrt agree with dense computations") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    int d = 2 + static_cast<int>(rng() % 4);
    Eigen::MatrixXd m = ts::random_spd(d, rng);
    SpdMatrix s(m);
    CHECK(s.log_det() ==
          doctest::Approx(std::log(s.matrix().determinant())).epsilon(1e-9));
    Eigen::MatrixXd prod = s.matrix() * s.inverse();
    CHECK((prod - Eigen::MatrixXd::Identity(d, d)).norm() < 1e-9);
    Eigen::MatrixXd root = s.sqrt();
    CHECK((root * root - s.matrix()).norm() < 1e-9);
  }
}

TEST_CASE("solve and quad_form") {
  Eigen::MatrixXd m(2, 2);
  m << 4.0, 1.0, 1.0, 3.0;
  SpdMatrix s(m);
  Eigen::VectorXd b(2);
  b << 1.0, 2.0;
  CHECK((s.matrix() * s.solve(b) - b).norm() < 1e-12);
  CHECK(s.quad_form(b) == doctest::Approx(4.0 + 2.0 * 2.0 + 3.0 * 4.0));
}

TEST_CASE("eigenvalues are ascending and match the spectrum") {
  Eigen::MatrixXd m(2, 2);
  m << 2.0, 0.0, 0.0, 5.0;
  std::vector<double> e = SpdMatrix(m).eigenvalues();
  REQUIRE(e.size() == 2);
  CHECK(e[0] == doctest::Approx(2.0));
  CHECK(e[1] == doctest::Approx(5.0));
}
