#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "obtl/dataset.hpp"
#include "obtl/errors.hpp"
#include "obtl/inference.hpp"
#include "obtl/model.hpp"
#include "obtl/model_io.hpp"
#include "obtl/simulator.hpp"
#include "obtl/special_fn.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

using nlohmann::json;

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw obtl::ConfigError("cannot open config '" + path + "'");
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw obtl::ConfigError("config parse error in '" + path + "': " + e.what());
  }
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw obtl::ConfigError("cannot parse number '" + tok + "'");
    }
  }
  return out;
}

obtl::EvalMode parse_mode(const std::string& mode) {
  if (mode == "exact") return obtl::EvalMode::kExactSeries;
  if (mode == "laplace") return obtl::EvalMode::kLaplace;
  throw obtl::ConfigError("mode must be 'exact' or 'laplace', got '" + mode + "'");
}

void write_output(const json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw obtl::DataError("cannot write '" + out_path + "'");
  out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------- hypergeom

struct HypergeomArgs {
  std::string kind = "2f1";
  std::string upper, lower, eig;
  std::string mode = "exact";
  int max_degree = 40;
  double rel_tol = 1e-12;
  std::string out;
};

int run_hypergeom(const HypergeomArgs& args) {
  obtl::HypergeomParams params{parse_list(args.upper), parse_list(args.lower)};
  std::vector<double> eig = parse_list(args.eig);
  if (eig.empty()) throw obtl::ConfigError("--eig requires at least one eigenvalue");

  static const std::map<std::string, std::pair<std::size_t, std::size_t>> kinds = {
      {"0f0", {0, 0}}, {"0f1", {0, 1}}, {"1f0", {1, 0}}, {"1f1", {1, 1}}, {"2f1", {2, 1}}};
  auto it = kinds.find(args.kind);
  if (it == kinds.end())
    throw obtl::ConfigError("unknown kind '" + args.kind + "' (0f0|0f1|1f0|1f1|2f1)");
  if (params.upper.size() != it->second.first || params.lower.size() != it->second.second)
    throw obtl::ConfigError(args.kind + " needs " + std::to_string(it->second.first) +
                            " upper and " + std::to_string(it->second.second) +
                            " lower parameters");

  json j;
  j["kind"] = args.kind;
  j["eigenvalues"] = eig;
  if (args.mode == "laplace") {
    if (args.kind != "2f1") throw obtl::ConfigError("laplace mode applies to 2f1 only");
    double lv = obtl::gauss_2f1_laplace(params.upper[0], params.upper[1], params.lower[0], eig);
    j["mode"] = "laplace";
    j["log_value"] = lv;
    j["value"] = std::exp(lv);
  } else if (args.mode == "exact") {
    obtl::SeriesControl ctrl{args.max_degree, args.rel_tol};
    obtl::HypergeomResult r = obtl::hypergeom_series(params, eig, ctrl);
    j["mode"] = "exact";
    j["log_value"] = r.log_value.sign == 0
                         ? -std::numeric_limits<double>::infinity()
                         : r.log_value.log_abs;
    j["sign"] = r.log_value.sign;
    j["value"] = r.value();
    j["truncated"] = r.truncated;
    j["degree_used"] = r.degree_used;
  } else {
    throw obtl::ConfigError("mode must be 'exact' or 'laplace'");
  }
  write_output(j, args.out);
  return 0;
}

// --------------------------------------------------------------------- prep

int run_prep(const std::string& config_path, std::string out_prefix) {
  json cfg = load_config(config_path);
  std::string label_col = cfg.value("label_column", "label");
  obtl::LabeledDataset train_s = obtl::ingest_csv(cfg.at("train_s"), label_col);
  obtl::LabeledDataset train_t = obtl::ingest_csv(cfg.at("train_t"), label_col);
  obtl::LabeledDataset test_t = obtl::ingest_csv(cfg.at("test_t"), label_col);
  int d_out = cfg.at("d_out");
  std::string pooling = cfg.value("pooling", "pooled");
  if (pooling != "pooled" && pooling != "target-only")
    throw obtl::ConfigError("pooling must be 'pooled' or 'target-only'");
  if (out_prefix.empty()) out_prefix = cfg.value("out_prefix", "prep");

  obtl::PreprocessedData pd = obtl::preprocess(
      train_s, train_t, test_t, d_out,
      pooling == "pooled" ? obtl::PcaPooling::kPooled : obtl::PcaPooling::kTargetOnly);
  obtl::write_csv(pd.train_s, out_prefix + "_train_s.csv", label_col);
  obtl::write_csv(pd.train_t, out_prefix + "_train_t.csv", label_col);
  obtl::write_csv(pd.test_t, out_prefix + "_test_t.csv", label_col);

  json manifest;
  manifest["d_out"] = d_out;
  manifest["pooling"] = pooling;
  manifest["outputs"] = {out_prefix + "_train_s.csv", out_prefix + "_train_t.csv",
                         out_prefix + "_test_t.csv"};
  if (cfg.value("emit_prior_means", false)) {
    // pooled sample means over all classes, computed in the projected space
    Eigen::VectorXd mt = pd.train_t.X.colwise().mean();
    Eigen::VectorXd ms = pd.train_s.X.colwise().mean();
    manifest["prior_means"] = {
        {"m_t", std::vector<double>(mt.data(), mt.data() + d_out)},
        {"m_s", std::vector<double>(ms.data(), ms.data() + d_out)},
        {"means_computed", "after_pca"}};
  }
  write_output(manifest, out_prefix + "_manifest.json");
  return 0;
}

// --------------------------------------------------------------- train-eval

Eigen::VectorXd json_vector(const json& j) {
  std::vector<double> v = j.get<std::vector<double>>();
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<int>(v.size()));
}

int run_train_eval(const std::string& config_path, const std::string& mode_flag,
                   const std::string& out_path) {
  json cfg = load_config(config_path);
  std::string label_col = cfg.value("label_column", "label");
  obtl::LabeledDataset train_t = obtl::ingest_csv(cfg.at("train_t"), label_col);
  obtl::LabeledDataset train_s = obtl::ingest_csv(cfg.at("train_s"), label_col);
  obtl::LabeledDataset test = obtl::ingest_csv(cfg.at("test"), label_col);

  std::vector<double> xi = cfg.at("xi").get<std::vector<double>>();
  const int L = static_cast<int>(xi.size());
  const int d = train_t.dim();
  if (train_s.dim() != d || test.dim() != d)
    throw obtl::DataError("train/test files disagree on feature dimension");

  std::vector<Eigen::MatrixXd> by_class_t = obtl::split_by_class(train_t, L);
  std::vector<Eigen::MatrixXd> by_class_s = obtl::split_by_class(train_s, L);
  obtl::validate_labels(test, L);

  obtl::ScalarPriorSpec base;
  base.d = d;
  base.nu = cfg.at("nu");
  base.kappa_t = cfg.at("kappa_t");
  base.kappa_s = cfg.at("kappa_s");
  base.k_t = cfg.value("k_t", 1.0);
  base.k_s = cfg.value("k_s", 1.0);
  base.alpha = cfg.at("alpha");

  std::vector<obtl::ClassHyperparameters> hp;
  for (int l = 0; l < L; ++l) {
    obtl::ScalarPriorSpec spec = base;
    if (cfg.contains("m_t")) {
      spec.m_t = json_vector(cfg.at("m_t").at(l));
      spec.m_s = json_vector(cfg.at("m_s").at(l));
    } else {
      // default prior means: per-class training sample means
      if (by_class_t[l].rows() == 0 || by_class_s[l].rows() == 0)
        throw obtl::DataError("class " + std::to_string(l + 1) +
                              " has no training data to set prior means from; "
                              "supply m_t/m_s in the config");
      spec.m_t = by_class_t[l].colwise().mean();
      spec.m_s = by_class_s[l].colwise().mean();
    }
    hp.push_back(obtl::build_hyperparameters(spec));
  }

  std::string mode_str = !mode_flag.empty() ? mode_flag
                         : cfg.contains("mode") ? cfg.at("mode").get<std::string>()
                                                : (d > 3 ? "laplace" : "exact");
  obtl::EvalMode mode = parse_mode(mode_str);
  obtl::SeriesControl ctrl;
  if (cfg.contains("series")) {
    ctrl.max_degree = cfg.at("series").value("max_degree", ctrl.max_degree);
    ctrl.rel_tol = cfg.at("series").value("rel_tol", ctrl.rel_tol);
  }

  for (int l = 0; l < L; ++l)
    if (by_class_s[l].rows() == 0)
      std::cerr << "note: class " << l + 1
                << " has no source samples; source terms reduce to the prior\n";

  obtl::TrainedOBTL model =
      obtl::train_obtl(hp, by_class_t, by_class_s, obtl::ClassPriorConfig{xi}, mode, ctrl);
  obtl::TrainedOBC obc = obtl::train_obc(hp, by_class_t, obtl::ClassPriorConfig{xi});

  json samples = json::array();
  std::vector<std::vector<int>> conf(L, std::vector<int>(L, 0));
  std::vector<std::vector<int>> conf_obc(L, std::vector<int>(L, 0));
  int correct = 0, correct_obc = 0;
  for (int i = 0; i < test.n(); ++i) {
    Eigen::VectorXd x = test.X.row(i).transpose();
    obtl::Classification c = obtl::classify_obtl(model, x);
    obtl::Classification cb = obtl::classify_obc(obc, x);
    int truth = test.labels[i];
    conf[truth - 1][c.label - 1]++;
    conf_obc[truth - 1][cb.label - 1]++;
    if (c.label == truth) ++correct;
    if (cb.label == truth) ++correct_obc;
    samples.push_back({{"label", truth},
                       {"obtl_label", c.label},
                       {"obc_label", cb.label},
                       {"obtl_log_scores", c.log_scores},
                       {"obc_log_scores", cb.log_scores}});
  }

  json report;
  report["n_test"] = test.n();
  report["mode"] = mode_str;
  report["accuracy_obtl"] = static_cast<double>(correct) / test.n();
  report["accuracy_obc"] = static_cast<double>(correct_obc) / test.n();
  report["confusion_obtl"] = conf;
  report["confusion_obc"] = conf_obc;
  report["samples"] = samples;
  if (cfg.contains("model_out")) obtl::save_trained_obtl(model, cfg.at("model_out"));
  write_output(report, out_path);
  return 0;
}

// ----------------------------------------------------------------- simulate

int run_simulate(const std::string& config_path, const std::string& mode_flag,
                 std::uint64_t seed_flag, bool seed_given, const std::string& out_path) {
  json j = load_config(config_path);
  obtl::ExperimentConfig cfg;
  cfg.d = j.value("d", cfg.d);
  cfg.L = j.value("L", cfg.L);
  auto read_settings = [&](const char* key, obtl::PriorSettings& s) {
    if (!j.contains(key)) return;
    const json& g = j.at(key);
    s.nu = g.value("nu", s.nu);
    s.kappa_t = g.value("kappa_t", s.kappa_t);
    s.kappa_s = g.value("kappa_s", s.kappa_s);
    s.k_t = g.value("k_t", s.k_t);
    s.k_s = g.value("k_s", s.k_s);
    s.alpha = g.value("alpha", s.alpha);
  };
  read_settings("generative", cfg.generative);
  cfg.classifier = cfg.generative;
  read_settings("classifier", cfg.classifier);
  cfg.n_t = j.value("n_t", cfg.n_t);
  cfg.n_s = j.value("n_s", cfg.n_s);
  cfg.n_test = j.value("n_test", cfg.n_test);
  cfg.reps_outer = j.value("reps_outer", cfg.reps_outer);
  cfg.reps_inner = j.value("reps_inner", cfg.reps_inner);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.threads = j.value("threads", cfg.threads);
  cfg.exact_dim_cap = j.value("exact_dim_cap", cfg.exact_dim_cap);
  if (j.contains("series")) {
    cfg.ctrl.max_degree = j.at("series").value("max_degree", cfg.ctrl.max_degree);
    cfg.ctrl.rel_tol = j.at("series").value("rel_tol", cfg.ctrl.rel_tol);
  }
  if (j.contains("m_t")) {
    for (const json& v : j.at("m_t")) cfg.m_t.push_back(json_vector(v));
    for (const json& v : j.at("m_s")) cfg.m_s.push_back(json_vector(v));
  }
  if (j.contains("sweep")) {
    cfg.sweep_name = j.at("sweep").at("name");
    cfg.sweep_values = j.at("sweep").at("values").get<std::vector<double>>();
  }
  if (!mode_flag.empty())
    cfg.mode = parse_mode(mode_flag);
  else if (j.contains("mode"))
    cfg.mode = parse_mode(j.at("mode"));
  if (seed_given) cfg.seed = seed_flag;

  obtl::ErrorCurve curve = obtl::run_experiment(cfg);
  std::string csv_path = out_path.empty() ? "curve.csv" : out_path;
  cfg.fill_default_means();
  obtl::write_error_curve_csv(curve, csv_path);
  obtl::write_manifest(cfg, curve, csv_path + ".manifest.json");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal Bayesian transfer-learning classifier tools"};
  app.require_subcommand(1);

  std::string config_path, mode_flag, out_path;
  std::uint64_t seed_flag = 0;
  bool seed_given = false;

  HypergeomArgs hg;
  CLI::App* hyper = app.add_subcommand("hypergeom", "Evaluate a matrix-argument pFq");
  hyper->add_option("--kind", hg.kind, "0f0|0f1|1f0|1f1|2f1");
  hyper->add_option("--upper", hg.upper, "comma-separated upper parameters");
  hyper->add_option("--lower", hg.lower, "comma-separated lower parameters");
  hyper->add_option("--eig", hg.eig, "comma-separated eigenvalues")->required();
  hyper->add_option("--mode", hg.mode, "exact|laplace");
  hyper->add_option("--max-degree", hg.max_degree, "series truncation degree");
  hyper->add_option("--rel-tol", hg.rel_tol, "series early-stop tolerance");
  hyper->add_option("--out", hg.out, "output path (default stdout)");

  CLI::App* prep = app.add_subcommand("prep", "Standardize and PCA-project CSV datasets");
  prep->add_option("--config", config_path, "config json")->required();
  prep->add_option("--out", out_path, "output prefix");

  CLI::App* train = app.add_subcommand("train-eval", "Train on CSVs and evaluate");
  train->add_option("--config", config_path, "config json")->required();
  train->add_option("--mode", mode_flag, "exact|laplace");
  train->add_option("--out", out_path, "metrics json path (default stdout)");

  CLI::App* sim = app.add_subcommand("simulate", "Run the synthetic-experiment sweep");
  sim->add_option("--config", config_path, "config json")->required();
  sim->add_option("--mode", mode_flag, "exact|laplace");
  sim->add_option("--seed", seed_flag, "override config seed")
      ->each([&](const std::string&) { seed_given = true; });
  sim->add_option("--out", out_path, "CSV output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (hyper->parsed()) return run_hypergeom(hg);
    if (prep->parsed()) return run_prep(config_path, out_path);
    if (train->parsed()) return run_train_eval(config_path, mode_flag, out_path);
    if (sim->parsed()) return run_simulate(config_path, mode_flag, seed_flag, seed_given, out_path);
  } catch (const obtl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const obtl::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const obtl::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
