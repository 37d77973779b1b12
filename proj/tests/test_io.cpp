#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "ggm/io.hpp"
#include "ggm/sampler.hpp"
#include "ggm/serialize.hpp"

using namespace ggm;

TEST(MatrixCsv, SquareRoundTripIsExact) {
  const auto m = synthesize_model(generate_er(9, 3.0, 1), 0.7, RandomSigns{2});
  std::stringstream buffer;
  write_matrix_csv(buffer, m.J());
  std::string header;
  std::getline(std::istringstream(buffer.str()) >> std::ws, header);
  EXPECT_EQ(header, "9");
  const Matrix back = read_matrix_csv(buffer);
  EXPECT_TRUE((back.array() == m.J().array()).all());
}

TEST(MatrixCsv, RectangularSamples) {
  const auto s = sample(Matrix::Identity(3, 3), 5, 4);
  std::stringstream buffer;
  write_matrix_csv(buffer, s.data);
  EXPECT_EQ(buffer.str().substr(0, 4), "5,3\n");
  EXPECT_TRUE((read_matrix_csv(buffer).array() == s.data.array()).all());
}

TEST(MatrixCsv, RejectsMalformed) {
  std::istringstream short_rows("2\n1,2\n");
  EXPECT_THROW(read_matrix_csv(short_rows), Error);
  std::istringstream wide("2\n1,2,3\n4,5\n");
  EXPECT_THROW(read_matrix_csv(wide), Error);
  std::istringstream junk("1\n1.5x\n");
  EXPECT_THROW(read_matrix_csv(junk), Error);
  EXPECT_THROW(read_matrix_csv_file("/nonexistent/matrix.csv"), Error);
}

TEST(MatrixCsv, FileRoundTrip) {
  const auto path = (std::filesystem::temp_directory_path() / "ggm_matrix_roundtrip.csv").string();
  const Matrix m = Matrix::Random(4, 4);
  write_matrix_csv_file(path, m);
  EXPECT_TRUE((read_matrix_csv_file(path).array() == m.array()).all());
  std::remove(path.c_str());
}

TEST(Json, TrialConfigRoundTrip) {
  const Json input = Json::parse(R"({
    "ensemble": {"kind": "erdos_renyi", "p": 40, "c": 2.5},
    "model": {"target_alpha": 0.4, "sign": "random", "sign_seed": 9},
    "estimator": {"eta": 2, "threshold": {"kappa": 1.5}, "statistic": "mi"},
    "n": 500, "trials": 7, "seed": 11, "distortion": 3
  })");
  const TrialConfig cfg = trial_config_from_json(input);
  EXPECT_EQ(cfg.ensemble.p, 40u);
  EXPECT_EQ(std::get<ErdosRenyi>(cfg.ensemble.kind).c, 2.5);
  EXPECT_EQ(std::get<RandomSigns>(cfg.model.sign).seed, 9u);
  EXPECT_EQ(cfg.estimator.statistic, Statistic::mutual_information);
  EXPECT_EQ(std::get<KappaThreshold>(cfg.estimator.threshold).kappa, 1.5);
  EXPECT_EQ(cfg.distortion, std::optional<std::size_t>(3));
  const TrialConfig again = trial_config_from_json(trial_config_json(cfg));
  EXPECT_EQ(trial_config_json(again), trial_config_json(cfg));
}

TEST(Json, RejectsUnknownNames) {
  EXPECT_THROW(ensemble_from_json(Json::parse(R"({"kind": "lattice", "p": 4})")), Error);
  EXPECT_THROW(statistic_from_string("pearson"), Error);
  EXPECT_THROW(threshold_from_json("median"), Error);
}

TEST(Json, EstimationResultShape) {
  const auto m = synthesize_model(path_graph(4), 0.5, Attractive{});
  EstimatorConfig cfg;
  cfg.eta = 1;
  cfg.xi = 0.01;
  const Json j = estimation_json(cmit(CovarianceInput::exact(m.sigma()), cfg));
  EXPECT_EQ(j["edges"].size(), 3u);
  EXPECT_EQ(j["pairs"].size(), 6u);
  EXPECT_EQ(j["pairs"][1]["status"], "ok");
  EXPECT_EQ(j["pairs"][1]["argmin"], Json::array({1}));
  EXPECT_EQ(j["config"]["eta"], 1);
}

TEST(Json, NonFiniteBecomesNull) {
  EXPECT_TRUE(real_json(INFINITY).is_null());
  EXPECT_EQ(real_json(2.5), 2.5);
}
