#include <doctest.h>

#include <cstdio>
#include <random>

#include "obtl/errors.hpp"
#include "obtl/model_io.hpp"
#include "test_support.hpp"

using namespace obtl;
namespace ts = test_support;

TEST_CASE("matrix json round trip is row major with explicit dims") {
  Eigen::MatrixXd m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  nlohmann::json j = matrix_to_json(m);
  CHECK(j["rows"] == 2);
  CHECK(j["cols"] == 3);
  CHECK(j["data"] == nlohmann::json({1.0, 2.0, 3.0, 4.0, 5.0, 6.0}));
  CHECK((matrix_from_json(j) - m).norm() == 0.0);
  j["data"] = {1.0, 2.0};
  CHECK_THROWS_AS(matrix_from_json(j), DataError);
}

TEST_CASE("trained model survives a save/load cycle") {
  ScalarPriorSpec s1;
  s1.d = 2;
  s1.nu = 7.0;
  s1.kappa_t = 4.0;
  s1.kappa_s = 5.0;
  s1.m_t = Eigen::VectorXd::Zero(2);
  s1.m_s = Eigen::VectorXd::Ones(2);
  s1.alpha = 0.6;
  ScalarPriorSpec s2 = s1;
  s2.m_t = Eigen::VectorXd::Constant(2, 1.5);
  std::vector<ClassHyperparameters> hp{build_hyperparameters(s1), build_hyperparameters(s2)};

  Rng rng(5);
  std::vector<Eigen::MatrixXd> data_t{sample_class_data(s1.m_t, hp[0].M_t, 5, rng),
                                      sample_class_data(s2.m_t, hp[1].M_t, 6, rng)};
  std::vector<Eigen::MatrixXd> data_s{sample_class_data(s1.m_s, hp[0].M_s, 7, rng),
                                      sample_class_data(s2.m_s, hp[1].M_s, 8, rng)};
  TrainedOBTL model = train_obtl(hp, data_t, data_s, ClassPriorConfig{{1.0, 2.0}},
                                 EvalMode::kLaplace, SeriesControl{50, 1e-11});

  const char* path = "obtl_test_model.json";
  save_trained_obtl(model, path);
  TrainedOBTL back = load_trained_obtl(path);
  std::remove(path);

  REQUIRE(back.states.size() == 2);
  CHECK(back.mode == EvalMode::kLaplace);
  CHECK(back.ctrl.max_degree == 50);
  CHECK(back.counts_t == model.counts_t);
  for (int rep = 0; rep < 10; ++rep) {
    Eigen::VectorXd x = Eigen::VectorXd::Random(2) * 3.0;
    Classification a = classify_obtl(model, x);
    Classification b = classify_obtl(back, x);
    CHECK(a.label == b.label);
    CHECK(a.log_scores[0] == doctest::Approx(b.log_scores[0]).epsilon(1e-12));
    CHECK(a.log_scores[1] == doctest::Approx(b.log_scores[1]).epsilon(1e-12));
  }
}

TEST_CASE("obc model json round trip") {
  ScalarPriorSpec s;
  s.d = 1;
  s.nu = 4.0;
  s.kappa_t = 2.0;
  s.kappa_s = 2.0;
  s.m_t = Eigen::VectorXd::Zero(1);
  s.m_s = Eigen::VectorXd::Zero(1);
  s.alpha = 0.0;
  ScalarPriorSpec s2 = s;
  s2.m_t = Eigen::VectorXd::Ones(1);
  std::vector<ClassHyperparameters> hp{build_hyperparameters(s), build_hyperparameters(s2)};
  Rng rng(2);
  std::vector<Eigen::MatrixXd> data{sample_class_data(s.m_t, hp[0].M_t, 4, rng),
                                    sample_class_data(s2.m_t, hp[1].M_t, 4, rng)};
  TrainedOBC model = train_obc(hp, data, ClassPriorConfig{{1.0, 1.0}});
  TrainedOBC back = trained_obc_from_json(trained_obc_to_json(model));
  Eigen::VectorXd x(1);
  x << 0.4;
  CHECK(classify_obc(model, x).log_scores[0] ==
        doctest::Approx(classify_obc(back, x).log_scores[0]).epsilon(1e-13));
}

TEST_CASE("malformed model json is rejected") {
  CHECK_THROWS_AS(trained_obtl_from_json(nlohmann::json{{"kind", "other"}}), DataError);
  CHECK_THROWS_AS(load_trained_obtl("no_such_model.json"), DataError);
}
