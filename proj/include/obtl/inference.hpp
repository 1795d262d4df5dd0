#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "obtl/model.hpp"
#include "obtl/spd_matrix.hpp"
#include "obtl/special_fn.hpp"

namespace obtl {

struct SufficientStats {
  int n = 0;
  Eigen::VectorXd mean;     // undefined (empty) when n = 0
  Eigen::MatrixXd scatter;  // unnormalized, sum of outer products around the mean
};

/// rows of data are samples
SufficientStats sufficient_statistics(const Eigen::MatrixXd& data);

/// Per-class posterior summary feeding the effective density.
struct PosteriorState {
  int d = 0;
  double nu = 0.0;
  int n_t = 0;
  int n_s = 0;
  double kappa_tn = 0.0;
  Eigen::VectorXd m_tn;
  SpdMatrix T_t;
  SpdMatrix T_s;
  Eigen::MatrixXd F;

  // cached pieces of the effective-density evaluation
  Eigen::MatrixXd Ts_half;  // T_s^{1/2}
  bool coupled = false;     // F != 0
};

enum class EvalMode { kExactSeries, kLaplace };

struct ClassPriorConfig {
  std::vector<double> xi;  // Dirichlet concentrations, one per class

  void validate() const;
};

PosteriorState posterior_update(const ClassHyperparameters& hp,
                                const SufficientStats& stats_t,
                                const SufficientStats& stats_s);

/// log posterior density of (mu_t, Lambda_t), normalizer included.
/// Diagnostic path: uses series 1F1 / 2F1, so small d only.
double posterior_log_density(const Eigen::VectorXd& mu_t, const SpdMatrix& L_t,
                             const PosteriorState& state, const SeriesControl& ctrl);

struct PredictiveUpdate {
  double kappa_x = 0.0;
  SpdMatrix T_x;
};

PredictiveUpdate predictive_update(const PosteriorState& state, const Eigen::VectorXd& x);

/// log of the OBTL effective class-conditional density at x.
double log_effective_density_obtl(const PosteriorState& state, const Eigen::VectorXd& x,
                                  EvalMode mode, const SeriesControl& ctrl);

/// Target-only Gaussian-Wishart posterior (no coupling).
struct ObcState {
  int d = 0;
  double nu = 0.0;
  int n_t = 0;
  double kappa_tn = 0.0;
  double nu_tn = 0.0;
  Eigen::VectorXd m_tn;
  SpdMatrix M_tn;
};

ObcState obc_posterior_update(const ClassHyperparameters& hp, const SufficientStats& stats_t);

double log_effective_density_obc(const ObcState& state, const Eigen::VectorXd& x);

/// Posterior mean of the Dirichlet class probabilities.
std::vector<double> class_prior_posterior_mean(const ClassPriorConfig& cfg,
                                               const std::vector<int>& counts);

struct TrainedOBTL {
  std::vector<PosteriorState> states;  // one per class, label l = index + 1
  ClassPriorConfig prior;
  std::vector<int> counts_t;
  std::vector<double> log_class_prior;  // log posterior-mean class probabilities
  EvalMode mode = EvalMode::kLaplace;
  int exact_dim_cap = 3;  // Laplace-failure fallback allowed up to this dimension
  SeriesControl ctrl;
};

struct TrainedOBC {
  std::vector<ObcState> states;
  ClassPriorConfig prior;
  std::vector<int> counts_t;
  std::vector<double> log_class_prior;
};

struct Classification {
  int label = 0;  // 1-based
  std::vector<double> log_scores;
  bool used_exact_fallback = false;
};

TrainedOBTL train_obtl(const std::vector<ClassHyperparameters>& hp,
                       const std::vector<Eigen::MatrixXd>& data_t,
                       const std::vector<Eigen::MatrixXd>& data_s,
                       ClassPriorConfig prior, EvalMode mode,
                       SeriesControl ctrl = SeriesControl{});

TrainedOBC train_obc(const std::vector<ClassHyperparameters>& hp,
                     const std::vector<Eigen::MatrixXd>& data_t, ClassPriorConfig prior);

Classification classify_obtl(const TrainedOBTL& model, const Eigen::VectorXd& x);
Classification classify_obc(const TrainedOBC& model, const Eigen::VectorXd& x);

}  // namespace obtl
