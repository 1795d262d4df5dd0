#include "obtl/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "obtl/errors.hpp"

namespace obtl {

namespace {

constexpr double kEigClampWindow = 1e-12;

bool is_zero_matrix(const Eigen::MatrixXd& m) {
  return m.size() == 0 || m.lpNorm<Eigen::Infinity>() == 0.0;
}

/// Eigenvalues of T_s^{1/2} F T F' T_s^{1/2}, floored at 0 and clamped just
/// below 1 when within the roundoff window. Values beyond the window violate
/// the posterior convergence guarantee (T_t^{-1} - F'CF > 0 and T_s <= C by
/// construction) and indicate corrupt inputs.
std::vector<double> coupling_eigenvalues(const PosteriorState& state,
                                         const Eigen::MatrixXd& T) {
  Eigen::MatrixXd inner = state.Ts_half * state.F * T * state.F.transpose() * state.Ts_half;
  std::vector<double> eigs = symmetric_eigenvalues(inner);
  for (double& e : eigs) {
    if (e < 0.0) e = 0.0;
    if (e >= 1.0 - kEigClampWindow) {
      if (e < 1.0 + kEigClampWindow)
        e = 1.0 - kEigClampWindow;
      else
        throw NumericError("coupling eigenvalue >= 1: 2F1 argument diverges");
    }
  }
  return eigs;
}

double log_2f1(double a, double b, double c, const std::vector<double>& eigs,
               EvalMode mode, const SeriesControl& ctrl) {
  if (mode == EvalMode::kLaplace) return gauss_2f1_laplace(a, b, c, eigs);
  HypergeomResult r = hypergeom_series({{a, b}, {c}}, eigs, ctrl);
  if (r.log_value.sign <= 0)
    throw NumericError("series 2F1 evaluated to a non-positive value");
  return r.log_value.log_abs;
}

}  // namespace

SufficientStats sufficient_statistics(const Eigen::MatrixXd& data) {
  SufficientStats s;
  s.n = static_cast<int>(data.rows());
  const int d = static_cast<int>(data.cols());
  if (s.n == 0) {
    s.scatter = Eigen::MatrixXd::Zero(d, d);
    return s;
  }
  s.mean = data.colwise().mean();
  Eigen::MatrixXd centered = data.rowwise() - s.mean.transpose();
  s.scatter = centered.transpose() * centered;
  return s;
}

void ClassPriorConfig::validate() const {
  if (xi.empty()) throw DomainError("ClassPriorConfig: xi must be non-empty");
  for (double v : xi)
    if (!(v > 0.0)) throw DomainError("ClassPriorConfig: concentrations must be positive");
}

PosteriorState posterior_update(const ClassHyperparameters& hp,
                                const SufficientStats& stats_t,
                                const SufficientStats& stats_s) {
  const int d = hp.d;
  PosteriorState st;
  st.d = d;
  st.nu = hp.nu;
  st.n_t = stats_t.n;
  st.n_s = stats_s.n;
  st.kappa_tn = hp.kappa_t + stats_t.n;

  Eigen::MatrixXd Tt_inv =
      hp.M_t.inverse() + hp.F.transpose() * hp.C.matrix() * hp.F;
  if (stats_t.n > 0) {
    st.m_tn = (hp.kappa_t * hp.m_t + stats_t.n * stats_t.mean) / st.kappa_tn;
    Eigen::VectorXd diff = hp.m_t - stats_t.mean;
    Tt_inv += stats_t.scatter +
              (hp.kappa_t * stats_t.n / st.kappa_tn) * diff * diff.transpose();
  } else {
    st.m_tn = hp.m_t;
  }

  Eigen::MatrixXd Ts_inv = hp.C.inverse();
  if (stats_s.n > 0) {
    Eigen::VectorXd diff = hp.m_s - stats_s.mean;
    Ts_inv += stats_s.scatter +
              (hp.kappa_s * stats_s.n / (hp.kappa_s + stats_s.n)) * diff * diff.transpose();
  }

  st.T_t = SpdMatrix(Tt_inv).inverse_spd();
  st.T_s = SpdMatrix(Ts_inv).inverse_spd();
  st.F = hp.F;
  st.coupled = !is_zero_matrix(st.F);
  st.Ts_half = st.coupled ? st.T_s.sqrt() : Eigen::MatrixXd::Zero(d, d);
  return st;
}

double posterior_log_density(const Eigen::VectorXd& mu_t, const SpdMatrix& L_t,
                             const PosteriorState& state, const SeriesControl& ctrl) {
  const int d = state.d;
  const double a = 0.5 * (state.nu + state.n_s);
  const double c = 0.5 * state.nu;
  const double nt_pow = 0.5 * (state.nu + state.n_t);

  // normalizer A^l
  double log_denominator = 0.5 * d * (std::log(2.0 * M_PI) - std::log(state.kappa_tn)) +
                           d * nt_pow * std::log(2.0) +
                           log_multivariate_gamma(d, nt_pow) + nt_pow * state.T_t.log_det();
  if (state.coupled) {
    std::vector<double> eigs = coupling_eigenvalues(state, state.T_t.matrix());
    log_denominator += log_2f1(a, nt_pow, c, eigs, EvalMode::kExactSeries, ctrl);
  }

  Eigen::VectorXd diff = mu_t - state.m_tn;
  double log_kernel = 0.5 * L_t.log_det() -
                      0.5 * state.kappa_tn * diff.dot(L_t.matrix() * diff) +
                      0.5 * (state.nu + state.n_t - d - 1) * L_t.log_det() -
                      0.5 * state.T_t.solve(L_t.matrix()).trace();
  if (state.coupled) {
    Eigen::MatrixXd inner =
        0.5 * state.Ts_half * state.F * L_t.matrix() * state.F.transpose() * state.Ts_half;
    HypergeomResult f11 = hypergeom_series({{a}, {c}}, symmetric_eigenvalues(inner), ctrl);
    if (f11.log_value.sign <= 0)
      throw NumericError("posterior 1F1 evaluated to a non-positive value");
    log_kernel += f11.log_value.log_abs;
  }
  return log_kernel - log_denominator;
}

PredictiveUpdate predictive_update(const PosteriorState& state, const Eigen::VectorXd& x) {
  const double w = state.kappa_tn / (state.kappa_tn + 1.0);
  Eigen::VectorXd v = state.m_tn - x;
  // rank-1 downdate of T_t (Sherman-Morrison on the inverse update)
  Eigen::VectorXd Tv = state.T_t.matrix() * v;
  double denom = 1.0 + w * v.dot(Tv);
  Eigen::MatrixXd Tx = state.T_t.matrix() - (w / denom) * Tv * Tv.transpose();
  return {state.kappa_tn + 1.0, SpdMatrix(std::move(Tx))};
}

double log_effective_density_obtl(const PosteriorState& state, const Eigen::VectorXd& x,
                                  EvalMode mode, const SeriesControl& ctrl) {
  const int d = state.d;
  const double kappa_x = state.kappa_tn + 1.0;
  const double w = state.kappa_tn / kappa_x;
  Eigen::VectorXd v = state.m_tn - x;
  Eigen::VectorXd Tv = state.T_t.matrix() * v;
  const double denom = 1.0 + w * v.dot(Tv);
  const double log_det_Tx = state.T_t.log_det() - std::log(denom);

  const double half_nt = 0.5 * (state.nu + state.n_t);
  const double half_nt1 = half_nt + 0.5;
  double log_o = -0.5 * d * std::log(M_PI) +
                 0.5 * d * (std::log(state.kappa_tn) - std::log(kappa_x)) +
                 log_multivariate_gamma(d, half_nt1) - log_multivariate_gamma(d, half_nt) +
                 half_nt1 * log_det_Tx - half_nt * state.T_t.log_det();

  if (state.coupled) {
    Eigen::MatrixXd Tx =
        state.T_t.matrix() - (w / denom) * Tv * Tv.transpose();
    const double a = 0.5 * (state.nu + state.n_s);
    const double c = 0.5 * state.nu;
    std::vector<double> eig_x = coupling_eigenvalues(state, Tx);
    std::vector<double> eig_t = coupling_eigenvalues(state, state.T_t.matrix());
    log_o += log_2f1(a, half_nt1, c, eig_x, mode, ctrl) -
             log_2f1(a, half_nt, c, eig_t, mode, ctrl);
  }
  return log_o;
}

ObcState obc_posterior_update(const ClassHyperparameters& hp, const SufficientStats& stats_t) {
  ObcState st;
  st.d = hp.d;
  st.nu = hp.nu;
  st.n_t = stats_t.n;
  st.kappa_tn = hp.kappa_t + stats_t.n;
  st.nu_tn = hp.nu + stats_t.n;
  Eigen::MatrixXd M_inv = hp.M_t.inverse();
  if (stats_t.n > 0) {
    st.m_tn = (hp.kappa_t * hp.m_t + stats_t.n * stats_t.mean) / st.kappa_tn;
    Eigen::VectorXd diff = hp.m_t - stats_t.mean;
    M_inv += stats_t.scatter +
             (hp.kappa_t * stats_t.n / st.kappa_tn) * diff * diff.transpose();
  } else {
    st.m_tn = hp.m_t;
  }
  st.M_tn = SpdMatrix(M_inv).inverse_spd();
  return st;
}

double log_effective_density_obc(const ObcState& state, const Eigen::VectorXd& x) {
  const int d = state.d;
  const double kappa_x = state.kappa_tn + 1.0;
  const double w = state.kappa_tn / kappa_x;
  Eigen::VectorXd v = state.m_tn - x;
  Eigen::VectorXd Mv = state.M_tn.matrix() * v;
  const double denom = 1.0 + w * v.dot(Mv);
  const double log_det_Mx = state.M_tn.log_det() - std::log(denom);

  const double half_nt = 0.5 * (state.nu + state.n_t);
  const double half_nt1 = half_nt + 0.5;
  return -0.5 * d * std::log(M_PI) +
         0.5 * d * (std::log(state.kappa_tn) - std::log(kappa_x)) +
         log_multivariate_gamma(d, half_nt1) - log_multivariate_gamma(d, half_nt) +
         half_nt1 * log_det_Mx - half_nt * state.M_tn.log_det();
}

std::vector<double> class_prior_posterior_mean(const ClassPriorConfig& cfg,
                                               const std::vector<int>& counts) {
  cfg.validate();
  if (counts.size() != cfg.xi.size())
    throw DomainError("class_prior_posterior_mean: counts/xi size mismatch");
  double xi0 = std::accumulate(cfg.xi.begin(), cfg.xi.end(), 0.0);
  double n_total = std::accumulate(counts.begin(), counts.end(), 0.0);
  std::vector<double> out(cfg.xi.size());
  for (std::size_t l = 0; l < out.size(); ++l)
    out[l] = (cfg.xi[l] + counts[l]) / (n_total + xi0);
  return out;
}

namespace {

std::vector<double> log_priors(const ClassPriorConfig& prior, const std::vector<int>& counts) {
  std::vector<double> p = class_prior_posterior_mean(prior, counts);
  std::vector<double> lp(p.size());
  std::transform(p.begin(), p.end(), lp.begin(), [](double v) { return std::log(v); });
  return lp;
}

int argmax_lowest_tie(const std::vector<double>& scores) {
  int best = 0;
  for (std::size_t l = 1; l < scores.size(); ++l)
    if (scores[l] > scores[best]) best = static_cast<int>(l);
  return best;
}

}  // namespace

TrainedOBTL train_obtl(const std::vector<ClassHyperparameters>& hp,
                       const std::vector<Eigen::MatrixXd>& data_t,
                       const std::vector<Eigen::MatrixXd>& data_s,
                       ClassPriorConfig prior, EvalMode mode, SeriesControl ctrl) {
  const std::size_t L = hp.size();
  if (L < 2) throw DomainError("train_obtl: at least two classes required");
  if (data_t.size() != L || data_s.size() != L || prior.xi.size() != L)
    throw DomainError("train_obtl: per-class inputs disagree on class count");
  TrainedOBTL model;
  model.prior = std::move(prior);
  model.mode = mode;
  model.ctrl = ctrl;
  for (std::size_t l = 0; l < L; ++l) {
    SufficientStats st_t = sufficient_statistics(data_t[l]);
    SufficientStats st_s = sufficient_statistics(data_s[l]);
    model.states.push_back(posterior_update(hp[l], st_t, st_s));
    model.counts_t.push_back(st_t.n);
  }
  model.log_class_prior = log_priors(model.prior, model.counts_t);
  return model;
}

TrainedOBC train_obc(const std::vector<ClassHyperparameters>& hp,
                     const std::vector<Eigen::MatrixXd>& data_t, ClassPriorConfig prior) {
  const std::size_t L = hp.size();
  if (L < 2) throw DomainError("train_obc: at least two classes required");
  if (data_t.size() != L || prior.xi.size() != L)
    throw DomainError("train_obc: per-class inputs disagree on class count");
  TrainedOBC model;
  model.prior = std::move(prior);
  for (std::size_t l = 0; l < L; ++l) {
    SufficientStats st_t = sufficient_statistics(data_t[l]);
    model.states.push_back(obc_posterior_update(hp[l], st_t));
    model.counts_t.push_back(st_t.n);
  }
  model.log_class_prior = log_priors(model.prior, model.counts_t);
  return model;
}

Classification classify_obtl(const TrainedOBTL& model, const Eigen::VectorXd& x) {
  auto score_all = [&](EvalMode mode) {
    std::vector<double> scores(model.states.size());
    for (std::size_t l = 0; l < model.states.size(); ++l)
      scores[l] = model.log_class_prior[l] +
                  log_effective_density_obtl(model.states[l], x, mode, model.ctrl);
    return scores;
  };

  Classification out;
  try {
    out.log_scores = score_all(model.mode);
  } catch (const NumericError&) {
    // per-decision fallback keeps the class scores comparable
    if (model.mode == EvalMode::kLaplace && model.states.front().d <= model.exact_dim_cap) {
      out.log_scores = score_all(EvalMode::kExactSeries);
      out.used_exact_fallback = true;
    } else {
      throw;
    }
  }
  out.label = argmax_lowest_tie(out.log_scores) + 1;
  return out;
}

Classification classify_obc(const TrainedOBC& model, const Eigen::VectorXd& x) {
  Classification out;
  out.log_scores.resize(model.states.size());
  for (std::size_t l = 0; l < model.states.size(); ++l)
    out.log_scores[l] =
        model.log_class_prior[l] + log_effective_density_obc(model.states[l], x);
  out.label = argmax_lowest_tie(out.log_scores) + 1;
  return out;
}

}  // namespace obtl
