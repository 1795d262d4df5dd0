#pragma once

#include <Eigen/Dense>
#include <random>
#include <utility>

#include "obtl/spd_matrix.hpp"
#include "obtl/special_fn.hpp"

namespace obtl {

using Rng = std::mt19937_64;

/// Scalar parameterization of the joint prior: M_t = k_t I, M_s = k_s I,
/// M_ts = alpha sqrt(k_t k_s) I.
struct ScalarPriorSpec {
  int d = 0;
  double nu = 0.0;
  double kappa_t = 0.0;
  double kappa_s = 0.0;
  Eigen::VectorXd m_t;
  Eigen::VectorXd m_s;
  double k_t = 1.0;
  double k_s = 1.0;
  double alpha = 0.0;

  void validate() const;
};

/// Per-class prior block for the joint Gaussian-Wishart model. C and F are
/// derived from the scale blocks at construction time.
struct ClassHyperparameters {
  int d = 0;
  double nu = 0.0;
  double kappa_t = 0.0;
  double kappa_s = 0.0;
  Eigen::VectorXd m_t;
  Eigen::VectorXd m_s;
  SpdMatrix M_t;
  SpdMatrix M_s;
  Eigen::MatrixXd M_ts;
  SpdMatrix C;        // Schur complement M_s - M_ts' M_t^{-1} M_ts
  Eigen::MatrixXd F;  // C^{-1} M_ts' M_t^{-1}

  /// log-determinant of the assembled 2d x 2d scale matrix.
  double log_det_block = 0.0;
};

/// Schur complement C and coupling matrix F of the partitioned scale matrix.
std::pair<SpdMatrix, Eigen::MatrixXd> derive_coupling(const SpdMatrix& M_t,
                                                      const SpdMatrix& M_s,
                                                      const Eigen::MatrixXd& M_ts);

/// Assembles and validates a full per-class hyperparameter block.
ClassHyperparameters make_class_hyperparameters(double nu, double kappa_t, double kappa_s,
                                                Eigen::VectorXd m_t, Eigen::VectorXd m_s,
                                                SpdMatrix M_t, SpdMatrix M_s,
                                                Eigen::MatrixXd M_ts);

ClassHyperparameters build_hyperparameters(const ScalarPriorSpec& spec);

/// log W_d(M, nu) density at L.
double wishart_log_density(const SpdMatrix& L, const SpdMatrix& M, double nu);

/// log of the joint prior density of the two precision blocks, including the
/// normalizer and the 0F1 factor. Diagnostic path for small d.
double joint_prior_log_density(const SpdMatrix& L_t, const SpdMatrix& L_s,
                               const ClassHyperparameters& hp, const SeriesControl& ctrl);

/// Bartlett-decomposition Wishart sampler; non-integer nu allowed.
SpdMatrix sample_wishart(const SpdMatrix& M, double nu, Rng& rng);

/// Joint draw (Lambda_t, Lambda_s): diagonal blocks of a 2d x 2d Wishart draw.
std::pair<SpdMatrix, SpdMatrix> sample_joint_precisions(const ClassHyperparameters& hp,
                                                        Rng& rng);

/// n i.i.d. draws from N(mu, L^{-1}); rows are samples.
Eigen::MatrixXd sample_class_data(const Eigen::VectorXd& mu, const SpdMatrix& L, int n,
                                  Rng& rng);

/// One draw from N(m, (kappa L)^{-1}).
Eigen::VectorXd sample_mean_given_precision(const Eigen::VectorXd& m, double kappa,
                                            const SpdMatrix& L, Rng& rng);

}  // namespace obtl
