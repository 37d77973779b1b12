#include <gtest/gtest.h>

#include <cmath>

#include "ggm/estimator.hpp"
#include "ggm/sampler.hpp"
#include "oracles.hpp"

using namespace ggm;

namespace {

EstimatorConfig config(std::size_t eta, double xi, Statistic statistic = Statistic::covariance) {
  EstimatorConfig cfg;
  cfg.eta = eta;
  cfg.xi = xi;
  cfg.statistic = statistic;
  cfg.threads = 2;
  return cfg;
}

}  // namespace

TEST(ConditionalStatistics, EmptySetIsMarginal) {
  const auto m = oracle::random_model(complete_graph(5), 0.5, 1);
  EXPECT_EQ(conditional_covariance(m.sigma(), 1, 3, NodeSet{}), m.sigma()(1, 3));
}

TEST(ConditionalStatistics, MarkovZero) {
  const auto m = synthesize_model(path_graph(3), 0.5, Attractive{});
  EXPECT_LE(std::abs(conditional_covariance(m.sigma(), 0, 2, NodeSet{1})), 1e-12);
}

TEST(ConditionalStatistics, AgreesWithPrecisionOracleForAllSizes) {
  const auto m = oracle::random_model(complete_graph(8), 0.6, 77);
  std::vector<Node> pool{2, 3, 4, 5, 6, 7};
  oracle::subsets_up_to(pool, 5, [&](const NodeSet& S) {
    EXPECT_NEAR(conditional_covariance(m.sigma(), 0, 1, S), oracle::conditional_covariance_via_precision(m.J(), 0, 1, S),
                1e-10);
    const double vi = oracle::conditional_variance_via_precision(m.J(), 0, S);
    const double vj = oracle::conditional_variance_via_precision(m.J(), 1, S);
    EXPECT_NEAR(conditional_correlation(m.sigma(), 0, 1, S),
                oracle::conditional_covariance_via_precision(m.J(), 0, 1, S) / std::sqrt(vi * vj), 1e-10);
  });
}

TEST(ConditionalStatistics, CorrelationOfTwoNodeModel) {
  const double r = 0.35;
  const auto m = synthesize_model(Graph(2, {{0, 1}}), r, Attractive{});
  const double rho = -m.J()(0, 1);
  EXPECT_NEAR(conditional_correlation(m.sigma(), 0, 1, NodeSet{}), rho, 1e-12);
  EXPECT_EQ(conditional_correlation(Matrix::Identity(3, 3), 0, 2, NodeSet{}), 0.0);
}

TEST(ConditionalStatistics, MutualInformation) {
  EXPECT_EQ(mutual_information_from_correlation(0.0), 0.0);
  EXPECT_NEAR(mutual_information_from_correlation(0.6), 0.22314355131420976, 1e-15);
  EXPECT_NEAR(mutual_information_from_correlation(-0.6), 0.22314355131420976, 1e-15);
  try {
    mutual_information_from_correlation(1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::numeric_failure);
  }
}

TEST(ConditionalStatistics, SingularConditioningSet) {
  Matrix sigma = Matrix::Identity(4, 4);
  sigma(2, 3) = sigma(3, 2) = 1.0;  // x2 and x3 identical
  try {
    conditional_covariance(sigma, 0, 1, NodeSet{2, 3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::conditioning_failure);
  }
  Matrix big = Matrix::Identity(5, 5);
  big.block(2, 2, 3, 3).setOnes();
  EXPECT_THROW(conditional_covariance(big, 0, 1, NodeSet{2, 3, 4}), Error);
}

TEST(ConditionalStatistics, RejectsOverlappingSets) {
  EXPECT_THROW(conditional_covariance(Matrix::Identity(3, 3), 0, 1, NodeSet{1}), Error);
}

TEST(MinStatistic, ChainSeparator) {
  const auto m = synthesize_model(path_graph(3), 0.5, Attractive{});
  const auto stat = min_conditional_statistic(CovarianceInput::exact(m.sigma()), 0, 2, config(1, 0.0));
  EXPECT_EQ(stat.status, PairStatus::ok);
  EXPECT_EQ(stat.value, 0.0);
  EXPECT_EQ(stat.argmin, NodeSet{1});
}

TEST(MinStatistic, EtaZeroIsMarginal) {
  const auto m = oracle::random_model(complete_graph(5), 0.5, 3);
  const auto stat = min_conditional_statistic(CovarianceInput::exact(m.sigma()), 0, 4, config(0, 0.0));
  EXPECT_EQ(stat.value, std::abs(m.sigma()(0, 4)));
  EXPECT_TRUE(stat.argmin.empty());
}

TEST(MinStatistic, MatchesBruteForceMinimum) {
  const auto m = oracle::random_model(oracle::random_graph(7, 0.5, 4), 0.6, 4);
  const auto input = CovarianceInput::exact(m.sigma());
  for (Node i = 0; i < 7; ++i)
    for (Node j = i + 1; j < 7; ++j) {
      std::vector<Node> pool;
      for (Node v = 0; v < 7; ++v)
        if (v != i && v != j) pool.push_back(v);
      double best = INFINITY;
      oracle::subsets_up_to(pool, 2, [&](const NodeSet& S) {
        best = std::min(best, std::abs(oracle::conditional_covariance_via_precision(m.J(), i, j, S)));
      });
      EXPECT_NEAR(min_conditional_statistic(input, i, j, config(2, 0.0)).value, best, 1e-10);
    }
}

TEST(MinStatistic, EtaTooLarge) {
  try {
    min_conditional_statistic(CovarianceInput::exact(Matrix::Identity(4, 4)), 0, 1, config(3, 0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_parameter);
  }
}

TEST(MinStatistic, SampleModeSkipsLargeSets) {
  const auto m = synthesize_model(path_graph(4), 0.5, Attractive{});
  const auto samples = sample(m, 1, 5);
  const auto stat = min_conditional_statistic(CovarianceInput::from_samples(samples), 0, 3, config(1, 0.0));
  EXPECT_EQ(stat.status, PairStatus::ok);
  EXPECT_TRUE(stat.argmin.empty());
  EXPECT_EQ(stat.skipped, 2u);
}

TEST(MinStatistic, AllSubsetsSkippedFails) {
  Matrix sigma = Matrix::Identity(4, 4);
  sigma(2, 3) = sigma(3, 2) = 1.0;
  auto cfg = config(2, 0.0);
  const auto stat = min_conditional_statistic(CovarianceInput{sigma, std::size_t{2}}, 2, 3, cfg);
  EXPECT_EQ(stat.status, PairStatus::ok);  // the empty set is always usable when n > 0
  CovarianceInput degenerate{Matrix::Zero(4, 4), std::size_t{1}};
  cfg.statistic = Statistic::mutual_information;
  const auto failed = min_conditional_statistic(degenerate, 0, 1, cfg);
  EXPECT_EQ(failed.status, PairStatus::failed);
  EXPECT_TRUE(std::isinf(failed.value));
}

TEST(Cmit, ExactChainWithOracleThreshold) {
  const auto m = synthesize_model(path_graph(50), 0.5, Attractive{});
  const auto gap = oracle_gap(m, 1, 50);
  EXPECT_TRUE(gap.separable);
  EXPECT_EQ(gap.c_max, 0.0);
  const auto midpoint = cmit(CovarianceInput::exact(m.sigma()), config(1, oracle_threshold(gap)));
  EXPECT_EQ(edit_distance(midpoint.graph_hat, m.graph()), 0u);
  // The geometric mean collapses to zero here; exact zeros still fail the strict test.
  const auto geometric = cmit(CovarianceInput::exact(m.sigma()), config(1, std::sqrt(gap.c_min * gap.c_max)));
  EXPECT_EQ(edit_distance(geometric.graph_hat, m.graph()), 0u);
}

TEST(Cmit, ThresholdExtremes) {
  const auto m = synthesize_model(generate_er(12, 3.0, 5), 0.5, RandomSigns{1});
  const auto input = CovarianceInput::exact(m.sigma());
  const double top = m.sigma().cwiseAbs().maxCoeff();
  EXPECT_EQ(cmit(input, config(1, top)).graph_hat.edge_count(), 0u);
  const Matrix blocks = exact_covariance(synthesize_model(Graph(4, {{0, 1}, {2, 3}}), 0.4, Attractive{}).J());
  const auto zero = cmit(CovarianceInput::exact(blocks), config(0, 0.0));
  EXPECT_EQ(zero.graph_hat, Graph(4, {{0, 1}, {2, 3}}));
}

TEST(Cmit, MutualInformationMatchesCovarianceInExactMode) {
  const auto m = synthesize_model(path_graph(20), 0.5, Attractive{});
  const auto input = CovarianceInput::exact(m.sigma());
  const auto gap = oracle_gap(m, 1, 20);
  const auto cov = cmit(input, config(1, oracle_threshold(gap)));
  const auto mi = cmit_mi(input, config(1, 0.05));
  EXPECT_EQ(cov.graph_hat, m.graph());
  EXPECT_EQ(mi.graph_hat, m.graph());
  EXPECT_DOUBLE_EQ(mi.threshold, 0.05 * 0.05);
}

TEST(Cmit, ThreadCountDoesNotChangeResult) {
  const auto m = synthesize_model(generate_er(25, 2.0, 8), 0.5, RandomSigns{3});
  const auto input = CovarianceInput::from_samples(sample(m, 400, 9));
  auto one = config(2, 0.1);
  one.threads = 1;
  auto four = config(2, 0.1);
  four.threads = 4;
  const auto a = cmit(input, one);
  const auto b = cmit(input, four);
  EXPECT_EQ(a.graph_hat, b.graph_hat);
  for (std::size_t k = 0; k < a.pairs.size(); ++k) {
    EXPECT_EQ(a.pairs[k].stat.value, b.pairs[k].stat.value);
    EXPECT_EQ(a.pairs[k].stat.argmin, b.pairs[k].stat.argmin);
  }
}

TEST(Cmit, EarlyExitKeepsTheGraph) {
  const auto m = synthesize_model(cycle_graph(12), 0.5, Attractive{});
  const auto input = CovarianceInput::exact(m.sigma());
  auto cfg = config(2, 0.05);
  const auto full = cmit(input, cfg);
  cfg.early_exit = true;
  EXPECT_EQ(cmit(input, cfg).graph_hat, full.graph_hat);
}

TEST(DefaultThreshold, Values) {
  EXPECT_NEAR(default_threshold(100.0, std::exp(4.0), 1.5), 0.2 * 1.5, 1e-15);
  EXPECT_NEAR(default_threshold(4000.0, 50.0), 0.062546166992295747, 1e-15);
  EXPECT_THROW(default_threshold(0.0, 10.0), Error);
}

TEST(OracleGap, CycleNeedsTwoNodeSeparators) {
  const auto m = synthesize_model(cycle_graph(8), 0.5, Attractive{});
  const auto narrow = oracle_gap(m, 1, 8);
  EXPECT_FALSE(narrow.separators_fit);
  const auto wide = oracle_gap(m, 2, 8);
  EXPECT_TRUE(wide.separators_fit);
  EXPECT_TRUE(wide.separable);
}
