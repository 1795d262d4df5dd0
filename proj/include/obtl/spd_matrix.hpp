#pragma once

#include <Eigen/Dense>
#include <vector>

namespace obtl {

/// Symmetric positive-definite matrix with a cached Cholesky factorization.
/// Construction symmetrizes the input and fails if the factorization does.
class SpdMatrix {
 public:
  /// Empty (0 x 0) placeholder; every accessor assumes a real matrix was set.
  SpdMatrix() = default;
  explicit SpdMatrix(Eigen::MatrixXd m);
  static SpdMatrix identity(int d);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Eigen::MatrixXd& matrix() const { return mat_; }
  const Eigen::LLT<Eigen::MatrixXd>& llt() const { return llt_; }

  double log_det() const { return log_det_; }
  Eigen::MatrixXd inverse() const;
  SpdMatrix inverse_spd() const;

  /// Symmetric square root (eigendecomposition based).
  Eigen::MatrixXd sqrt() const;

  /// Solve A x = b via the cached factorization.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const;

  /// x' A x
  double quad_form(const Eigen::VectorXd& x) const;

  /// Eigenvalues of the symmetric matrix, ascending.
  std::vector<double> eigenvalues() const;

 private:
  Eigen::MatrixXd mat_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double log_det_ = 0.0;
};

/// Eigenvalues (ascending) of a general symmetric matrix given as dense storage;
/// the input is symmetrized first.
std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& m);

}  // namespace obtl
