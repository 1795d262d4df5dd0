#include "obtl/spd_matrix.hpp"

#include <cmath>

#include "obtl/errors.hpp"

namespace obtl {

SpdMatrix::SpdMatrix(Eigen::MatrixXd m) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw FactorizationError("SpdMatrix: input must be square and non-empty");
  mat_ = 0.5 * (m + m.transpose());
  llt_.compute(mat_);
  if (llt_.info() != Eigen::Success)
    throw FactorizationError("SpdMatrix: matrix is not positive definite");
  log_det_ = 0.0;
  const auto& L = llt_.matrixLLT();
  for (int i = 0; i < mat_.rows(); ++i) {
    double lii = L(i, i);
    if (!(lii > 0.0) || !std::isfinite(lii))
      throw FactorizationError("SpdMatrix: non-finite or non-positive pivot");
    log_det_ += 2.0 * std::log(lii);
  }
  if (!std::isfinite(log_det_))
    throw FactorizationError("SpdMatrix: log-determinant is not finite");
}

SpdMatrix SpdMatrix::identity(int d) {
  return SpdMatrix(Eigen::MatrixXd::Identity(d, d));
}

Eigen::MatrixXd SpdMatrix::inverse() const {
  return llt_.solve(Eigen::MatrixXd::Identity(dim(), dim()));
}

SpdMatrix SpdMatrix::inverse_spd() const { return SpdMatrix(inverse()); }

Eigen::MatrixXd SpdMatrix::sqrt() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mat_);
  if (es.info() != Eigen::Success)
    throw FactorizationError("SpdMatrix: eigendecomposition failed");
  Eigen::VectorXd roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose();
}

Eigen::VectorXd SpdMatrix::solve(const Eigen::VectorXd& b) const { return llt_.solve(b); }
Eigen::MatrixXd SpdMatrix::solve(const Eigen::MatrixXd& b) const { return llt_.solve(b); }

double SpdMatrix::quad_form(const Eigen::VectorXd& x) const {
  return x.dot(mat_ * x);
}

std::vector<double> SpdMatrix::eigenvalues() const { return symmetric_eigenvalues(mat_); }

std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd s = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw FactorizationError("symmetric_eigenvalues: eigendecomposition failed");
  std::vector<double> out(es.eigenvalues().data(),
                          es.eigenvalues().data() + es.eigenvalues().size());
  return out;
}

}  // namespace obtl
