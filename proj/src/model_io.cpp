#include "obtl/model_io.hpp"

#include <fstream>

#include "obtl/errors.hpp"

namespace obtl {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  std::vector<double> data;
  data.reserve(m.size());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  int rows = j.at("rows"), cols = j.at("cols");
  std::vector<double> data = j.at("data");
  if (static_cast<int>(data.size()) != rows * cols)
    throw DataError("matrix json: data length does not match rows*cols");
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int c = 0; c < cols; ++c) m(i, c) = data[i * cols + c];
  return m;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  std::vector<double> data = j.get<std::vector<double>>();
  return Eigen::Map<Eigen::VectorXd>(data.data(), static_cast<int>(data.size()));
}

namespace {

nlohmann::json state_to_json(const PosteriorState& s) {
  return {{"d", s.d},
          {"nu", s.nu},
          {"n_t", s.n_t},
          {"n_s", s.n_s},
          {"kappa_tn", s.kappa_tn},
          {"m_tn", vector_to_json(s.m_tn)},
          {"T_t", matrix_to_json(s.T_t.matrix())},
          {"T_s", matrix_to_json(s.T_s.matrix())},
          {"F", matrix_to_json(s.F)}};
}

PosteriorState state_from_json(const nlohmann::json& j) {
  PosteriorState s;
  s.d = j.at("d");
  s.nu = j.at("nu");
  s.n_t = j.at("n_t");
  s.n_s = j.at("n_s");
  s.kappa_tn = j.at("kappa_tn");
  s.m_tn = vector_from_json(j.at("m_tn"));
  s.T_t = SpdMatrix(matrix_from_json(j.at("T_t")));
  s.T_s = SpdMatrix(matrix_from_json(j.at("T_s")));
  s.F = matrix_from_json(j.at("F"));
  s.coupled = s.F.size() > 0 && s.F.lpNorm<Eigen::Infinity>() > 0.0;
  s.Ts_half = s.coupled ? s.T_s.sqrt() : Eigen::MatrixXd::Zero(s.d, s.d);
  return s;
}

nlohmann::json obc_state_to_json(const ObcState& s) {
  return {{"d", s.d},          {"nu", s.nu},
          {"n_t", s.n_t},      {"kappa_tn", s.kappa_tn},
          {"nu_tn", s.nu_tn},  {"m_tn", vector_to_json(s.m_tn)},
          {"M_tn", matrix_to_json(s.M_tn.matrix())}};
}

ObcState obc_state_from_json(const nlohmann::json& j) {
  ObcState s;
  s.d = j.at("d");
  s.nu = j.at("nu");
  s.n_t = j.at("n_t");
  s.kappa_tn = j.at("kappa_tn");
  s.nu_tn = j.at("nu_tn");
  s.m_tn = vector_from_json(j.at("m_tn"));
  s.M_tn = SpdMatrix(matrix_from_json(j.at("M_tn")));
  return s;
}

}  // namespace

nlohmann::json trained_obtl_to_json(const TrainedOBTL& model) {
  nlohmann::json states = nlohmann::json::array();
  for (const PosteriorState& s : model.states) states.push_back(state_to_json(s));
  return {{"kind", "obtl"},
          {"states", states},
          {"xi", model.prior.xi},
          {"counts_t", model.counts_t},
          {"mode", model.mode == EvalMode::kLaplace ? "laplace" : "exact"},
          {"exact_dim_cap", model.exact_dim_cap},
          {"series", {{"max_degree", model.ctrl.max_degree}, {"rel_tol", model.ctrl.rel_tol}}}};
}

TrainedOBTL trained_obtl_from_json(const nlohmann::json& j) {
  if (j.value("kind", "") != "obtl") throw DataError("model json: kind must be 'obtl'");
  TrainedOBTL m;
  for (const nlohmann::json& s : j.at("states")) m.states.push_back(state_from_json(s));
  m.prior.xi = j.at("xi").get<std::vector<double>>();
  m.counts_t = j.at("counts_t").get<std::vector<int>>();
  m.mode = j.at("mode") == "laplace" ? EvalMode::kLaplace : EvalMode::kExactSeries;
  m.exact_dim_cap = j.value("exact_dim_cap", 3);
  m.ctrl.max_degree = j.at("series").at("max_degree");
  m.ctrl.rel_tol = j.at("series").at("rel_tol");
  std::vector<double> p = class_prior_posterior_mean(m.prior, m.counts_t);
  for (double v : p) m.log_class_prior.push_back(std::log(v));
  return m;
}

nlohmann::json trained_obc_to_json(const TrainedOBC& model) {
  nlohmann::json states = nlohmann::json::array();
  for (const ObcState& s : model.states) states.push_back(obc_state_to_json(s));
  return {{"kind", "obc"},
          {"states", states},
          {"xi", model.prior.xi},
          {"counts_t", model.counts_t}};
}

TrainedOBC trained_obc_from_json(const nlohmann::json& j) {
  if (j.value("kind", "") != "obc") throw DataError("model json: kind must be 'obc'");
  TrainedOBC m;
  for (const nlohmann::json& s : j.at("states")) m.states.push_back(obc_state_from_json(s));
  m.prior.xi = j.at("xi").get<std::vector<double>>();
  m.counts_t = j.at("counts_t").get<std::vector<int>>();
  std::vector<double> p = class_prior_posterior_mean(m.prior, m.counts_t);
  for (double v : p) m.log_class_prior.push_back(std::log(v));
  return m;
}

void save_trained_obtl(const TrainedOBTL& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << trained_obtl_to_json(model).dump(2) << '\n';
}

TrainedOBTL load_trained_obtl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model json parse error: ") + e.what());
  }
  return trained_obtl_from_json(j);
}

}  // namespace obtl
