#include "obtl/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "obtl/errors.hpp"

namespace obtl {

namespace {

constexpr const char* kVersion = "obtl 0.1.0";

Rng make_stream(std::uint64_t seed, int rep, int stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(rep), static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

std::vector<ClassHyperparameters> per_class_hyperparameters(const ExperimentConfig& cfg,
                                                            const PriorSettings& s) {
  std::vector<ClassHyperparameters> out;
  for (int l = 0; l < cfg.L; ++l) {
    ScalarPriorSpec spec;
    spec.d = cfg.d;
    spec.nu = s.nu;
    spec.kappa_t = s.kappa_t;
    spec.kappa_s = s.kappa_s;
    spec.m_t = cfg.m_t[l];
    spec.m_s = cfg.m_s[l];
    spec.k_t = s.k_t;
    spec.k_s = s.k_s;
    spec.alpha = s.alpha;
    out.push_back(build_hyperparameters(spec));
  }
  return out;
}

struct RepErrors {
  std::vector<double> obtl, obc, bayes;  // one entry per inner rep
};

RepErrors run_outer_rep(const ExperimentConfig& cfg,
                        const std::vector<ClassHyperparameters>& hp_true,
                        const std::vector<ClassHyperparameters>& hp_clf, int rep) {
  Rng rng_param = make_stream(cfg.seed, rep, 0);
  Rng rng_target = make_stream(cfg.seed, rep, 1);
  Rng rng_source = make_stream(cfg.seed, rep, 2);
  Rng rng_test = make_stream(cfg.seed, rep, 3);

  std::vector<SpdMatrix> L_t, L_s;
  std::vector<Eigen::VectorXd> mu_t, mu_s;
  for (int l = 0; l < cfg.L; ++l) {
    auto [lt, ls] = sample_joint_precisions(hp_true[l], rng_param);
    mu_t.push_back(sample_mean_given_precision(cfg.m_t[l], hp_true[l].kappa_t, lt, rng_param));
    mu_s.push_back(sample_mean_given_precision(cfg.m_s[l], hp_true[l].kappa_s, ls, rng_param));
    L_t.push_back(std::move(lt));
    L_s.push_back(std::move(ls));
  }

  ClassPriorConfig prior{std::vector<double>(cfg.L, 1.0)};

  RepErrors err;
  for (int j = 0; j < cfg.reps_inner; ++j) {
    std::vector<Eigen::MatrixXd> data_t, data_s, test;
    for (int l = 0; l < cfg.L; ++l)
      data_t.push_back(sample_class_data(mu_t[l], L_t[l], cfg.n_t, rng_target));
    for (int l = 0; l < cfg.L; ++l)
      data_s.push_back(sample_class_data(mu_s[l], L_s[l], cfg.n_s, rng_source));
    for (int l = 0; l < cfg.L; ++l)
      test.push_back(sample_class_data(mu_t[l], L_t[l], cfg.n_test, rng_test));

    TrainedOBTL obtl;
    try {
      obtl = train_obtl(hp_clf, data_t, data_s, prior, cfg.mode, cfg.ctrl);
    } catch (const NumericError&) {
      if (cfg.mode != EvalMode::kLaplace || cfg.d > cfg.exact_dim_cap) throw;
      obtl = train_obtl(hp_clf, data_t, data_s, prior, EvalMode::kExactSeries, cfg.ctrl);
    }
    obtl.exact_dim_cap = cfg.exact_dim_cap;
    TrainedOBC obc = train_obc(hp_clf, data_t, prior);

    int wrong_obtl = 0, wrong_obc = 0;
    int total = 0;
    for (int l = 0; l < cfg.L; ++l) {
      for (int i = 0; i < cfg.n_test; ++i) {
        Eigen::VectorXd x = test[l].row(i).transpose();
        if (classify_obtl(obtl, x).label != l + 1) ++wrong_obtl;
        if (classify_obc(obc, x).label != l + 1) ++wrong_obc;
        ++total;
      }
    }
    err.obtl.push_back(static_cast<double>(wrong_obtl) / total);
    err.obc.push_back(static_cast<double>(wrong_obc) / total);
    err.bayes.push_back(bayes_error_reference(mu_t, L_t, test));
  }
  return err;
}

ErrorSummary summarize(std::vector<double> v) {
  ErrorSummary s;
  const std::size_t n = v.size();
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / n;
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.stddev = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
  std::sort(v.begin(), v.end());
  auto quantile = [&](double q) {
    double pos = q * (n - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    double frac = pos - lo;
    return lo + 1 < n ? v[lo] * (1 - frac) + v[lo + 1] * frac : v[lo];
  };
  s.min = v.front();
  s.q1 = quantile(0.25);
  s.median = quantile(0.5);
  s.q3 = quantile(0.75);
  s.max = v.back();
  return s;
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void ExperimentConfig::fill_default_means() {
  if (!m_t.empty()) return;
  for (int l = 0; l < L; ++l) {
    Eigen::VectorXd mt = Eigen::VectorXd::Constant(d, 0.05 * l);
    m_s.push_back(mt.array() + 1.0);
    m_t.push_back(std::move(mt));
  }
}

void ExperimentConfig::validate() const {
  if (d < 1 || L < 2) throw ConfigError("experiment: d >= 1 and L >= 2 required");
  if (n_t < 0 || n_s < 0 || n_test < 1)
    throw ConfigError("experiment: counts must be non-negative, n_test >= 1");
  if (reps_outer < 1 || reps_inner < 1) throw ConfigError("experiment: reps must be >= 1");
  if (m_t.size() != static_cast<std::size_t>(L) || m_s.size() != static_cast<std::size_t>(L))
    throw ConfigError("experiment: one m_t and m_s vector per class required");
  for (const PriorSettings* s : {&generative, &classifier}) {
    if (!(std::abs(s->alpha) < 1.0)) throw ConfigError("experiment: |alpha| < 1 required");
    if (!(s->nu >= 2.0 * d)) throw ConfigError("experiment: nu >= 2d required");
    if (!(s->kappa_t > 0.0 && s->kappa_s > 0.0 && s->k_t > 0.0 && s->k_s > 0.0))
      throw ConfigError("experiment: scale hyperparameters must be positive");
  }
  if (!sweep_name.empty() && sweep_values.empty())
    throw ConfigError("experiment: sweep named but no grid values given");
  for (double v : sweep_values) {
    ExperimentConfig c = apply_sweep(*this, v);
    c.sweep_name.clear();
    c.sweep_values.clear();
    c.validate();
  }
}

ExperimentConfig apply_sweep(const ExperimentConfig& base, double value) {
  ExperimentConfig cfg = base;
  const std::string& name = base.sweep_name;
  auto as_count = [&](const char* what) {
    int n = static_cast<int>(value);
    if (value != n || n < 0)
      throw ConfigError(std::string("sweep ") + what + ": values must be non-negative integers");
    return n;
  };
  if (name == "n_t")
    cfg.n_t = as_count("n_t");
  else if (name == "n_s")
    cfg.n_s = as_count("n_s");
  else if (name == "alpha")
    cfg.classifier.alpha = value;
  else if (name == "alpha_true")
    cfg.generative.alpha = value;
  else if (name == "nu")
    cfg.classifier.nu = value;
  else if (name == "kappa_t")
    cfg.classifier.kappa_t = value;
  else
    throw ConfigError("unknown sweep parameter '" + name + "'");
  return cfg;
}

double bayes_error_reference(const std::vector<Eigen::VectorXd>& mu,
                             const std::vector<SpdMatrix>& precision,
                             const std::vector<Eigen::MatrixXd>& test_per_class) {
  const int L = static_cast<int>(mu.size());
  std::vector<double> half_log_det(L);
  for (int l = 0; l < L; ++l) half_log_det[l] = 0.5 * precision[l].log_det();
  int wrong = 0, total = 0;
  for (int truth = 0; truth < L; ++truth) {
    for (int i = 0; i < test_per_class[truth].rows(); ++i) {
      Eigen::VectorXd x = test_per_class[truth].row(i).transpose();
      int best = 0;
      double best_score = -std::numeric_limits<double>::infinity();
      for (int l = 0; l < L; ++l) {
        Eigen::VectorXd diff = x - mu[l];
        double score = half_log_det[l] - 0.5 * precision[l].quad_form(diff);
        if (score > best_score) {
          best_score = score;
          best = l;
        }
      }
      if (best != truth) ++wrong;
      ++total;
    }
  }
  return static_cast<double>(wrong) / total;
}

ErrorCurve run_experiment(const ExperimentConfig& cfg_in) {
  ExperimentConfig base = cfg_in;
  base.fill_default_means();
  base.validate();

  std::vector<double> grid =
      base.sweep_name.empty() ? std::vector<double>{0.0} : base.sweep_values;

  ErrorCurve curve;
  for (double v : grid) {
    ExperimentConfig cfg = base.sweep_name.empty() ? base : apply_sweep(base, v);
    std::vector<ClassHyperparameters> hp_true = per_class_hyperparameters(cfg, cfg.generative);
    std::vector<ClassHyperparameters> hp_clf = per_class_hyperparameters(cfg, cfg.classifier);

    std::vector<RepErrors> reps(cfg.reps_outer);
    std::vector<std::exception_ptr> failures(cfg.reps_outer);
    int n_threads = cfg.threads > 0
                        ? cfg.threads
                        : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<int>(n_threads, cfg.reps_outer);

    std::atomic<int> next{0};
    auto worker = [&]() {
      for (int r = next.fetch_add(1); r < cfg.reps_outer; r = next.fetch_add(1)) {
        try {
          reps[r] = run_outer_rep(cfg, hp_true, hp_clf, r);
        } catch (...) {
          failures[r] = std::current_exception();
        }
      }
    };
    if (n_threads <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    for (int r = 0; r < cfg.reps_outer; ++r)
      if (failures[r]) std::rethrow_exception(failures[r]);

    std::vector<double> obtl, obc, bayes;
    for (const RepErrors& re : reps) {
      obtl.insert(obtl.end(), re.obtl.begin(), re.obtl.end());
      obc.insert(obc.end(), re.obc.begin(), re.obc.end());
      bayes.insert(bayes.end(), re.bayes.begin(), re.bayes.end());
    }
    curve.sweep_values.push_back(base.sweep_name.empty() ? 0.0 : v);
    curve.obtl.push_back(summarize(std::move(obtl)));
    curve.obc.push_back(summarize(std::move(obc)));
    curve.bayes.push_back(summarize(std::move(bayes)));
    curve.reps.push_back(cfg.reps_outer * cfg.reps_inner);
  }
  return curve;
}

void write_error_curve_csv(const ErrorCurve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << "sweep_value,obtl_mean,obtl_std,obc_mean,obc_std,bayes_mean,reps\n";
  for (std::size_t i = 0; i < curve.sweep_values.size(); ++i) {
    out << format_value(curve.sweep_values[i]) << ',' << format_value(curve.obtl[i].mean)
        << ',' << format_value(curve.obtl[i].stddev) << ',' << format_value(curve.obc[i].mean)
        << ',' << format_value(curve.obc[i].stddev) << ',' << format_value(curve.bayes[i].mean)
        << ',' << curve.reps[i] << '\n';
  }
}

namespace {

nlohmann::json settings_json(const PriorSettings& s) {
  return {{"nu", s.nu},      {"kappa_t", s.kappa_t}, {"kappa_s", s.kappa_s},
          {"k_t", s.k_t},    {"k_s", s.k_s},         {"alpha", s.alpha}};
}

nlohmann::json summary_json(const ErrorSummary& s) {
  return {{"mean", s.mean}, {"std", s.stddev}, {"min", s.min},
          {"q1", s.q1},     {"median", s.median}, {"q3", s.q3}, {"max", s.max}};
}

}  // namespace

void write_manifest(const ExperimentConfig& cfg, const ErrorCurve& curve,
                    const std::string& path) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["seed"] = cfg.seed;
  j["config"] = {{"d", cfg.d},
                 {"L", cfg.L},
                 {"generative", settings_json(cfg.generative)},
                 {"classifier", settings_json(cfg.classifier)},
                 {"n_t", cfg.n_t},
                 {"n_s", cfg.n_s},
                 {"n_test", cfg.n_test},
                 {"reps_outer", cfg.reps_outer},
                 {"reps_inner", cfg.reps_inner},
                 {"mode", cfg.mode == EvalMode::kLaplace ? "laplace" : "exact"},
                 {"sweep", cfg.sweep_name},
                 {"sweep_values", cfg.sweep_values},
                 {"threads", cfg.threads}};
  nlohmann::json pts = nlohmann::json::array();
  for (std::size_t i = 0; i < curve.sweep_values.size(); ++i) {
    pts.push_back({{"sweep_value", curve.sweep_values[i]},
                   {"obtl", summary_json(curve.obtl[i])},
                   {"obc", summary_json(curve.obc[i])},
                   {"bayes", summary_json(curve.bayes[i])},
                   {"reps", curve.reps[i]}});
  }
  j["results"] = pts;
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace obtl
