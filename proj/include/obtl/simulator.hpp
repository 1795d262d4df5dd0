#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "obtl/inference.hpp"
#include "obtl/model.hpp"

namespace obtl {

/// Scalar hyperparameters of the joint prior, without the per-class means.
struct PriorSettings {
  double nu = 25.0;
  double kappa_t = 100.0;
  double kappa_s = 100.0;
  double k_t = 1.0;
  double k_s = 1.0;
  double alpha = 0.9;
};

/// Synthetic-experiment configuration. The generative settings produce the
/// true distributions; the classifier settings are what the classifiers are
/// told (they may differ, for sensitivity sweeps).
struct ExperimentConfig {
  int d = 10;
  int L = 2;
  PriorSettings generative;
  PriorSettings classifier;
  std::vector<Eigen::VectorXd> m_t;  // per-class target prior means
  std::vector<Eigen::VectorXd> m_s;  // per-class source prior means
  int n_t = 10;
  int n_s = 200;
  int n_test = 200;
  int reps_outer = 100;
  int reps_inner = 20;
  std::uint64_t seed = 0;
  EvalMode mode = EvalMode::kLaplace;
  SeriesControl ctrl;
  int exact_dim_cap = 3;
  int threads = 0;  // 0 = hardware concurrency

  std::string sweep_name;  // empty = single run at the base config
  std::vector<double> sweep_values;

  /// Fills m_t / m_s with the standard two-domain defaults if empty:
  /// m_t^1 = 0, m_t^l = 0.05 (l-1) 1, m_s^l = m_t^l + 1.
  void fill_default_means();
  void validate() const;
};

/// Recognized sweep names: n_t, n_s, alpha, alpha_true, nu, kappa_t.
ExperimentConfig apply_sweep(const ExperimentConfig& base, double value);

struct ErrorSummary {
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

struct ErrorCurve {
  std::vector<double> sweep_values;
  std::vector<ErrorSummary> obtl;
  std::vector<ErrorSummary> obc;
  std::vector<ErrorSummary> bayes;
  std::vector<int> reps;  // per grid point: reps_outer * reps_inner
};

ErrorCurve run_experiment(const ExperimentConfig& cfg);

/// Error of the plug-in optimal rule using the true class-conditional
/// Gaussians and equal class priors.
double bayes_error_reference(const std::vector<Eigen::VectorXd>& mu,
                             const std::vector<SpdMatrix>& precision,
                             const std::vector<Eigen::MatrixXd>& test_per_class);

/// Columns: sweep_value, obtl_mean, obtl_std, obc_mean, obc_std, bayes_mean, reps.
void write_error_curve_csv(const ErrorCurve& curve, const std::string& path);

/// JSON run manifest: full config, seed, version string, box-plot quantiles.
void write_manifest(const ExperimentConfig& cfg, const ErrorCurve& curve,
                    const std::string& path);

}  // namespace obtl
