#include "obtl/model.hpp"

#include <cmath>

#include "obtl/errors.hpp"

namespace obtl {

void ScalarPriorSpec::validate() const {
  if (d < 1) throw DomainError("ScalarPriorSpec: d must be >= 1");
  if (!(k_t > 0.0) || !(k_s > 0.0))
    throw DomainError("ScalarPriorSpec: k_t and k_s must be positive");
  if (!(std::abs(alpha) < 1.0)) throw DomainError("ScalarPriorSpec: |alpha| must be < 1");
  if (!(kappa_t > 0.0) || !(kappa_s > 0.0))
    throw DomainError("ScalarPriorSpec: kappa_t and kappa_s must be positive");
  if (!(nu >= 2.0 * d)) throw DomainError("ScalarPriorSpec: nu must be >= 2d");
  if (m_t.size() != d || m_s.size() != d)
    throw DomainError("ScalarPriorSpec: prior means must have length d");
}

std::pair<SpdMatrix, Eigen::MatrixXd> derive_coupling(const SpdMatrix& M_t,
                                                      const SpdMatrix& M_s,
                                                      const Eigen::MatrixXd& M_ts) {
  const int d = M_t.dim();
  if (M_s.dim() != d || M_ts.rows() != d || M_ts.cols() != d)
    throw FactorizationError("derive_coupling: block dimensions disagree");
  Eigen::MatrixXd Mtinv_Mts = M_t.solve(M_ts);
  SpdMatrix C(M_s.matrix() - M_ts.transpose() * Mtinv_Mts);
  Eigen::MatrixXd F = C.solve(Eigen::MatrixXd(Mtinv_Mts.transpose()));
  return {std::move(C), std::move(F)};
}

ClassHyperparameters make_class_hyperparameters(double nu, double kappa_t, double kappa_s,
                                                Eigen::VectorXd m_t, Eigen::VectorXd m_s,
                                                SpdMatrix M_t, SpdMatrix M_s,
                                                Eigen::MatrixXd M_ts) {
  const int d = M_t.dim();
  if (!(nu >= 2.0 * d)) throw DomainError("hyperparameters: nu must be >= 2d");
  if (!(kappa_t > 0.0) || !(kappa_s > 0.0))
    throw DomainError("hyperparameters: kappa_t and kappa_s must be positive");
  if (m_t.size() != d || m_s.size() != d)
    throw DomainError("hyperparameters: prior means must have length d");

  Eigen::MatrixXd block(2 * d, 2 * d);
  block.topLeftCorner(d, d) = M_t.matrix();
  block.topRightCorner(d, d) = M_ts;
  block.bottomLeftCorner(d, d) = M_ts.transpose();
  block.bottomRightCorner(d, d) = M_s.matrix();
  SpdMatrix full(block);  // PD check of the assembled scale matrix

  auto [C, F] = derive_coupling(M_t, M_s, M_ts);
  return ClassHyperparameters{d,
                              nu,
                              kappa_t,
                              kappa_s,
                              std::move(m_t),
                              std::move(m_s),
                              std::move(M_t),
                              std::move(M_s),
                              std::move(M_ts),
                              std::move(C),
                              std::move(F),
                              full.log_det()};
}

ClassHyperparameters build_hyperparameters(const ScalarPriorSpec& spec) {
  spec.validate();
  const int d = spec.d;
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
  return make_class_hyperparameters(
      spec.nu, spec.kappa_t, spec.kappa_s, spec.m_t, spec.m_s,
      SpdMatrix(spec.k_t * I), SpdMatrix(spec.k_s * I),
      spec.alpha * std::sqrt(spec.k_t * spec.k_s) * I);
}

double wishart_log_density(const SpdMatrix& L, const SpdMatrix& M, double nu) {
  const int d = L.dim();
  if (!(nu >= d)) throw DomainError("wishart_log_density: nu must be >= d");
  double log_norm = 0.5 * nu * d * std::log(2.0) + log_multivariate_gamma(d, 0.5 * nu) +
                    0.5 * nu * M.log_det();
  double tr = (M.solve(L.matrix())).trace();
  return -log_norm + 0.5 * (nu - d - 1) * L.log_det() - 0.5 * tr;
}

double joint_prior_log_density(const SpdMatrix& L_t, const SpdMatrix& L_s,
                               const ClassHyperparameters& hp, const SeriesControl& ctrl) {
  const int d = hp.d;
  double log_K = -(d * hp.nu * std::log(2.0) + 2.0 * log_multivariate_gamma(d, 0.5 * hp.nu) +
                   0.5 * hp.nu * hp.log_det_block);
  Eigen::MatrixXd A = hp.M_t.inverse() + hp.F.transpose() * hp.C.matrix() * hp.F;
  double tr_t = (A * L_t.matrix()).trace();
  double tr_s = hp.C.solve(L_s.matrix()).trace();
  double det_pow = 0.5 * (hp.nu - d - 1) * (L_t.log_det() + L_s.log_det());

  Eigen::MatrixXd Ls_half = L_s.sqrt();
  Eigen::MatrixXd G = Ls_half * hp.F * L_t.matrix() * hp.F.transpose() * Ls_half;
  std::vector<double> eigs = symmetric_eigenvalues(0.25 * G);
  HypergeomResult f01 = hypergeom_series({{}, {0.5 * hp.nu}}, eigs, ctrl);

  return log_K - 0.5 * tr_t - 0.5 * tr_s + det_pow + f01.log_value.log_abs;
}

SpdMatrix sample_wishart(const SpdMatrix& M, double nu, Rng& rng) {
  const int d = M.dim();
  if (!(nu >= d)) throw DomainError("sample_wishart: nu must be >= d");
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < d; ++i) {
    std::gamma_distribution<double> gamma(0.5 * (nu - i), 2.0);
    A(i, i) = std::sqrt(gamma(rng));
    for (int j = 0; j < i; ++j) A(i, j) = normal(rng);
  }
  Eigen::MatrixXd Lm = M.llt().matrixL();
  Eigen::MatrixXd LA = Lm * A;
  return SpdMatrix(LA * LA.transpose());
}

std::pair<SpdMatrix, SpdMatrix> sample_joint_precisions(const ClassHyperparameters& hp,
                                                        Rng& rng) {
  const int d = hp.d;
  Eigen::MatrixXd block(2 * d, 2 * d);
  block.topLeftCorner(d, d) = hp.M_t.matrix();
  block.topRightCorner(d, d) = hp.M_ts;
  block.bottomLeftCorner(d, d) = hp.M_ts.transpose();
  block.bottomRightCorner(d, d) = hp.M_s.matrix();
  SpdMatrix joint = sample_wishart(SpdMatrix(block), hp.nu, rng);
  SpdMatrix L_t(joint.matrix().topLeftCorner(d, d));
  SpdMatrix L_s(joint.matrix().bottomRightCorner(d, d));
  return {std::move(L_t), std::move(L_s)};
}

Eigen::MatrixXd sample_class_data(const Eigen::VectorXd& mu, const SpdMatrix& L, int n,
                                  Rng& rng) {
  if (n < 0) throw DomainError("sample_class_data: n must be >= 0");
  const int d = L.dim();
  Eigen::MatrixXd out(n, d);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) z(j) = normal(rng);
    // precision L = R R'  =>  covariance L^{-1} = R^{-T} R^{-1}
    Eigen::VectorXd x = L.llt().matrixU().solve(z);
    out.row(i) = (mu + x).transpose();
  }
  return out;
}

Eigen::VectorXd sample_mean_given_precision(const Eigen::VectorXd& m, double kappa,
                                            const SpdMatrix& L, Rng& rng) {
  if (!(kappa > 0.0)) throw DomainError("sample_mean_given_precision: kappa must be > 0");
  const int d = L.dim();
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(d);
  for (int j = 0; j < d; ++j) z(j) = normal(rng);
  Eigen::VectorXd x = L.llt().matrixU().solve(z);
  return m + x / std::sqrt(kappa);
}

}  // namespace obtl
