// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are pinned
// here; the process exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "ggm/ggm.hpp"
#include "oracles.hpp"

using namespace ggm;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

std::string fmt(const char* format, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof(buffer), format, args...);
  return buffer;
}

std::vector<Node> all_but(std::size_t p, std::initializer_list<Node> excluded) {
  std::vector<Node> pool;
  for (Node v = 0; v < p; ++v)
    if (std::find(excluded.begin(), excluded.end(), v) == excluded.end()) pool.push_back(v);
  return pool;
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// 1. Conditional covariance against the delete-and-invert precision oracle.
Outcome schur_oracle() {
  constexpr double kTol = 1e-10;
  const auto start = Clock::now();
  double worst = 0.0;
  std::size_t checks = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const Graph g = oracle::random_graph(8, 0.2 + 0.6 * static_cast<double>(s % 5) / 4.0, 500 + s);
    const auto m = oracle::random_model(g, 0.6, 900 + s);
    for (Node i = 0; i < 8; ++i)
      for (Node j = i + 1; j < 8; ++j)
        oracle::subsets_up_to(all_but(8, {i, j}), 4, [&](const NodeSet& S) {
          const double got = conditional_covariance(m.sigma(), i, j, S);
          worst = std::max(worst, std::abs(got - oracle::conditional_covariance_via_precision(m.J(), i, j, S)));
          ++checks;
        });
  }
  const double elapsed = seconds_since(start);
  return {worst <= kTol && elapsed < 60.0,
          fmt("%zu triples, max |diff| %.3g (tol %.0e), %.1f s (limit 60 s)", checks, worst, kTol, elapsed)};
}

// 2. Separated pairs on trees have zero conditional covariance.
Outcome markov_zeros() {
  constexpr double kTol = 1e-12;
  double worst = 0.0;
  std::size_t checks = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const std::size_t p = 4 + s % 7;  // 4..10: every separating subset
    const Graph tree = random_tree(p, 40 + s);
    const auto m = oracle::random_model(tree, 0.9, 70 + s);
    for (Node i = 0; i < p; ++i)
      for (Node j = i + 1; j < p; ++j)
        oracle::subsets_up_to(all_but(p, {i, j}), p - 2, [&](const NodeSet& S) {
          if (!separates(tree, i, j, S)) return;
          worst = std::max(worst, std::abs(conditional_covariance(m.sigma(), i, j, S)));
          ++checks;
        });
  }
  for (std::uint64_t s = 0; s < 10; ++s) {
    const std::size_t p = 20 + 3 * s;  // up to 47: separators taken from the unique path
    const Graph tree = random_tree(p, 140 + s);
    const auto m = oracle::random_model(tree, 0.9, 170 + s);
    for (Node i = 0; i < p; ++i) {
      // Parent pointers from i give the path to every j.
      std::vector<Node> parent(p, p);
      std::vector<Node> order{i};
      parent[i] = i;
      for (std::size_t k = 0; k < order.size(); ++k)
        for (Node w : tree.neighbors(order[k]))
          if (parent[w] == p) {
            parent[w] = order[k];
            order.push_back(w);
          }
      for (Node j = i + 1; j < p; ++j) {
        NodeSet interior;
        for (Node v = parent[j]; v != i; v = parent[v]) interior.push_back(v);
        if (interior.empty()) continue;
        std::sort(interior.begin(), interior.end());
        for (Node cut : interior) {
          worst = std::max(worst, std::abs(conditional_covariance(m.sigma(), i, j, NodeSet{cut})));
          ++checks;
        }
        if (interior.size() <= 12) {
          worst = std::max(worst, std::abs(conditional_covariance(m.sigma(), i, j, interior)));
          ++checks;
        }
      }
    }
  }
  return {worst <= kTol, fmt("%zu separated (i,j,S), max |Sigma(i,j|S)| %.3g (tol %.0e)", checks, worst, kTol)};
}

// 3. Truncated walk-sum error against alpha^{K+1} / (1 - alpha).
Outcome walksum_truncation() {
  constexpr double kRounding = 1e-13;  // absolute allowance for floating-point error in Sigma - Sigma_K
  std::size_t violations = 0;
  double tightest = INFINITY;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const std::size_t p = 5 + s % 20;
    const Graph g = oracle::random_graph(p, 0.3, 300 + s);
    if (g.edge_count() == 0) continue;
    const auto m = oracle::random_model(g, 0.95, 400 + s);
    const Vector root = m.J().diagonal().cwiseSqrt();
    const Matrix normalized = root.asDiagonal() * m.sigma() * root.asDiagonal();
    const Matrix R = partial_correlation_matrix(m.J()).R;
    const double alpha = m.alpha();
    Matrix partial = Matrix::Identity(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    Matrix power = partial;
    for (int K = 1; K <= 30; ++K) {
      power = power * R;
      partial += power;
      const double error = (normalized - partial).cwiseAbs().maxCoeff();
      const double bound = std::pow(alpha, K + 1) / (1.0 - alpha);
      if (error > bound + kRounding) ++violations;
      tightest = std::min(tightest, bound - error);
    }
    // The library's truncation must agree with the explicit partial sum.
    if ((truncated_walksum_covariance(R, 30) - partial).cwiseAbs().maxCoeff() > 1e-12) ++violations;
  }
  return {violations == 0, fmt("%zu violations over 50 models x K=1..30, min slack %.3g", violations, tightest)};
}

// 4. Conditional variances never exceed 1 / (1 - alpha) on unit-diagonal models.
Outcome conditional_variance_cap() {
  constexpr double kTol = 1e-9;
  double worst_excess = -INFINITY;
  std::size_t checks = 0;
  for (std::uint64_t s = 0; s < 60; ++s) {
    const std::size_t p = 3 + s % 6;  // 3..8
    const Graph g = oracle::random_graph(p, 0.5, 600 + s);
    const auto m = oracle::random_model(g, 0.95, 700 + s, false);
    const double cap = 1.0 / (1.0 - m.alpha());
    for (Node i = 0; i < p; ++i)
      oracle::subsets_up_to(all_but(p, {i}), p - 1, [&](const NodeSet& S) {
        worst_excess = std::max(worst_excess, conditional_covariance(m.sigma(), i, i, S, 1e300) - cap);
        ++checks;
      });
  }
  return {worst_excess <= kTol, fmt("%zu (i,S), max Sigma(i,i|S) - 1/(1-alpha) = %.3g (tol %.0e)", checks, worst_excess, kTol)};
}

// Largest gamma whose separation profile stays within eta_max, searched downward from the diameter.
std::size_t widest_gamma(const Graph& g, std::size_t eta_max) {
  for (std::size_t gamma = g.p(); gamma > 0; --gamma)
    if (separation_profile(g, gamma).eta <= eta_max) return gamma;
  return 0;
}

// 5. Exact-mode recovery with the oracle threshold.
Outcome exact_recovery() {
  const auto start = Clock::now();
  std::vector<std::pair<std::string, Graph>> graphs{{"chain30", path_graph(30)}};
  for (std::size_t g = 6; g <= 20; ++g) graphs.emplace_back("C" + std::to_string(g), cycle_graph(g));
  graphs.emplace_back("torus5x5", torus_graph(5, 2));
  const std::vector<SignPattern> patterns{Attractive{}, Alternating{}, RandomSigns{1}, RandomSigns{2}, RandomSigns{3}};
  std::size_t cases = 0, good = 0;
  std::string failures;
  for (const auto& [name, g] : graphs) {
    const std::size_t gamma = widest_gamma(g, 2);
    const std::size_t eta = separation_profile(g, gamma).eta;
    for (const auto& pattern : patterns) {
      ++cases;
      const auto m = synthesize_model(g, 0.5, pattern);
      const auto gap = oracle_gap(m, eta, gamma);
      EstimatorConfig cfg;
      cfg.eta = eta;
      cfg.xi = oracle_threshold(gap);
      const auto result = cmit(CovarianceInput::exact(m.sigma()), cfg);
      if (gap.separable && gap.separators_fit && edit_distance(result.graph_hat, g) == 0) {
        ++good;
      } else {
        failures += " " + name + fmt("(gamma=%zu,Cmin=%.3g,Cmax=%.3g)", gamma, gap.c_min, gap.c_max);
      }
    }
  }
  const double elapsed = seconds_since(start);
  return {good == cases && elapsed < 120.0,
          fmt("%zu/%zu cases separable and recovered, %.1f s (limit 120 s)", good, cases, elapsed) + failures};
}

TrialConfig chain_trials(std::size_t n, Statistic statistic, std::uint64_t seed, std::size_t trials) {
  TrialConfig cfg;
  cfg.ensemble = {Chain{}, 20, 0};
  cfg.model.target_alpha = 0.5;
  cfg.estimator.eta = 1;
  cfg.estimator.threshold = KappaThreshold{2.0};
  cfg.estimator.statistic = statistic;
  cfg.n = n;
  cfg.trials = trials;
  cfg.seed = seed;
  return cfg;
}

// 6. Error rate falls with n.
Outcome sample_consistency() {
  const auto start = Clock::now();
  const std::vector<std::size_t> ns{250, 1000, 4000, 16000};
  std::vector<TrialConfig> grid;
  for (std::size_t n : ns) grid.push_back(chain_trials(n, Statistic::covariance, 0xC0FFEE, 50));
  const auto result = sweep(grid, false);
  const double band = 2.0 / std::sqrt(50.0);
  bool decreasing = true;
  std::string rates;
  for (std::size_t k = 0; k < result.rows.size(); ++k) {
    rates += fmt(" n=%zu:%.2f", result.rows[k].n, result.rows[k].pe_hat);
    if (k > 0 && !(result.rows[k].pe_hat - result.rows[k - 1].pe_hat < band)) decreasing = false;
  }
  const bool small_at_end = result.rows.back().pe_hat <= 0.05;
  const double elapsed = seconds_since(start);
  return {decreasing && small_at_end && elapsed < 600.0,
          fmt("Pe_hat%s (band %.3f, need <= 0.05 at 16000), %.1f s", rates.c_str(), band, elapsed)};
}

// 7. The information test needs at least as many samples as the covariance test.
Outcome mi_versus_covariance() {
  const std::vector<std::size_t> ns{125, 250, 500, 1000, 2000, 4000, 8000, 16000};
  std::size_t wins = 0;
  std::string detail;
  for (std::uint64_t rep = 0; rep < 3; ++rep) {
    std::optional<std::size_t> best[2];
    for (int which = 0; which < 2; ++which) {
      const Statistic statistic = which == 0 ? Statistic::covariance : Statistic::mutual_information;
      std::vector<TrialConfig> grid;
      for (std::size_t n : ns) grid.push_back(chain_trials(n, statistic, 1000 * (rep + 1), 50));
      best[which] = smallest_n_meeting(sweep(grid, false), 0.2);
    }
    const std::size_t cov = best[0].value_or(SIZE_MAX);
    const std::size_t mi = best[1].value_or(SIZE_MAX);
    if (mi >= cov) ++wins;
    detail += fmt(" rep%llu: cov=%zu mi=%zu;", static_cast<unsigned long long>(rep), best[0].value_or(0), best[1].value_or(0));
  }
  return {wins >= 2, fmt("%zu/3 repetitions with n_MI >= n_cov (need 2);", wins) + detail};
}

// 8. Belief propagation exactness and loop error decay.
Outcome lbp_checks() {
  constexpr double kTol = 1e-8;
  constexpr double kSlack = 10.0;
  double tree_var = 0.0, loopy_mean = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto tree = oracle::random_model(random_tree(10 + s, 20 + s), 0.9, 30 + s);
    tree_var = std::max(tree_var, lbp_variance_error(tree, lbp_run(tree)).max);

    const auto loopy = oracle::random_model(generate_er(20, 4.0, 50 + s), 0.9, 60 + s);
    Rng rng(80 + s);
    Vector h(20);
    for (Eigen::Index k = 0; k < 20; ++k) h(k) = rng.normal();
    const auto r = lbp_run(loopy, h);
    loopy_mean = std::max(loopy_mean, r.converged ? (r.means - loopy.sigma() * h).cwiseAbs().maxCoeff() : INFINITY);
  }
  // Cycles at alpha = 0.5 have edge weight rho = 0.25; correlations along a
  // chain decay like lambda^d with lambda = (1 - sqrt(1 - 4 rho^2)) / (2 rho),
  // so adding four nodes to the loop should scale the error by about lambda^4.
  const double rho = 0.25;
  const double lambda = (1.0 - std::sqrt(1.0 - 4.0 * rho * rho)) / (2.0 * rho);
  const double predicted = std::pow(lambda, 4);
  std::vector<double> errors;
  for (std::size_t g : {6u, 10u, 14u}) {
    const auto m = synthesize_model(cycle_graph(g), 0.5, Attractive{});
    errors.push_back(lbp_variance_error(m, lbp_run(m)).max);
  }
  bool decay = true;
  for (std::size_t k = 1; k < errors.size(); ++k) {
    const double ratio = errors[k] / errors[k - 1];
    if (!(errors[k] < errors[k - 1]) || ratio > predicted * kSlack || ratio < predicted / kSlack) decay = false;
  }
  return {tree_var <= kTol && loopy_mean <= kTol && decay,
          fmt("tree var err %.2g, loopy mean err %.2g (tol %.0e); cycle var err %.3g %.3g %.3g, ratios %.3g %.3g vs "
              "predicted %.3g (slack x%.0f)",
              tree_var, loopy_mean, kTol, errors[0], errors[1], errors[2], errors[1] / errors[0], errors[2] / errors[1],
              predicted, kSlack)};
}

// 9. Bounds calculator.
Outcome bounds_checks() {
  // c log2 p / log2(2 pi e (1/(1-alpha) + 1)) at p=1024, c=3, alpha=0.5, evaluated at 40 digits.
  constexpr double kReference = 5.282477238247022793;
  constexpr double kTol = 1e-3;
  const auto fano = fano_lower_bound(1024, 3, 0.5);
  const bool simplified_ok = std::abs(fano.simplified - kReference) <= kTol;
  double distortion_gap = 0.0;
  for (double p : {10.0, 100.0, 1024.0})
    for (double c : {1.0, 2.0, 3.0})
      for (double alpha : {0.1, 0.5, 0.9})
        distortion_gap = std::max(distortion_gap, std::abs(fano_lower_bound_distortion(p, c, alpha, 0.0).value -
                                                           fano_lower_bound(p, c, alpha).exact));
  // Every graph on four nodes at c = 1, eps = 0.2: the typical ones must satisfy
  // both ends of the per-graph probability sandwich.
  const double c = 1.0, eps = 0.2;
  const auto bounds = typical_set_bounds(4, c, eps);
  std::size_t members = 0, violations = 0;
  for (std::uint32_t mask = 0; mask < 64; ++mask) {
    std::vector<Edge> edges;
    std::size_t bit = 0;
    for (Node a = 0; a < 4; ++a)
      for (Node b = a + 1; b < 4; ++b, ++bit)
        if (mask >> bit & 1u) edges.emplace_back(a, b);
    const Graph g(4, edges);
    if (!is_typical(g, c, eps)) continue;
    ++members;
    const double lp = er_log2_probability(4, c, g.edge_count());
    if (lp < bounds.log2_prob_lower - 1e-12 || lp > bounds.log2_prob_upper + 1e-12) ++violations;
  }
  return {simplified_ok && distortion_gap <= 1e-12 && members > 0 && violations == 0,
          fmt("simplified %.6f vs reference %.6f (tol %.0e); max |D=0 - exact| %.2g (tol 1e-12); "
              "p=4 c=1 eps=0.2: %zu/64 typical, %zu sandwich violations",
              fano.simplified, kReference, kTol, distortion_gap, members, violations)};
}

// 10. Local separators against exhaustive search.
Outcome separator_checks() {
  std::size_t checks = 0, mismatches = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const std::size_t p = 4 + s % 9;  // 4..12
    const Graph g = oracle::random_graph(p, 0.15 + 0.35 * static_cast<double>(s % 4) / 3.0, 2000 + s);
    for (std::size_t gamma = 0; gamma <= 6; ++gamma)
      for (Node i = 0; i < p; ++i)
        for (Node j = 0; j < p; ++j) {
          if (i == j || g.has_edge(i, j)) continue;
          ++checks;
          if (local_separator(g, i, j, gamma) != oracle::exhaustive_separator(g, i, j, gamma)) ++mismatches;
        }
  }
  return {mismatches == 0, fmt("%zu (graph, gamma, i, j) cases, %zu mismatches", checks, mismatches)};
}

// 11. Sample covariance deviation scales like n^{-1/2}.
Outcome concentration() {
  const auto m = synthesize_model(path_graph(20), 0.5, Attractive{});
  auto median_deviation = [&](std::size_t n, std::uint64_t base) {
    std::vector<double> dev;
    for (std::uint64_t t = 0; t < 50; ++t)
      dev.push_back((empirical_covariance(sample(m, n, base + t)) - m.sigma()).cwiseAbs().maxCoeff());
    return median(dev);
  };
  const double small = median_deviation(1000, 10000);
  const double large = median_deviation(4000, 20000);
  const double ratio = small / large;
  return {ratio >= 1.6 && ratio <= 2.5, fmt("median max deviation %.4g (n=1000) / %.4g (n=4000) = %.3f, need [1.6, 2.5]",
                                            small, large, ratio)};
}

// 12. Full scan cost at p=100, eta=2.
Outcome performance() {
  const auto m = synthesize_model(generate_er(100, 3.0, 12), 0.5, RandomSigns{12});
  const auto samples = sample(m, 5000, 13);
  EstimatorConfig cfg;
  cfg.eta = 2;
  cfg.xi = default_threshold(5000, 100);
  const auto start = Clock::now();
  const auto result = cmit(CovarianceInput::from_samples(samples), cfg);
  const double elapsed = seconds_since(start);
  return {elapsed < 60.0, fmt("p=100 eta=2 n=5000 on %u threads: %.2f s (limit 60 s), edit distance %zu", default_threads(),
                              elapsed, edit_distance(result.graph_hat, m.graph()))};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"schur-complement oracle equivalence", schur_oracle},
      {"markov zeros on trees", markov_zeros},
      {"walk-sum truncation bound", walksum_truncation},
      {"conditional-variance cap", conditional_variance_cap},
      {"exact-mode structural recovery", exact_recovery},
      {"sample-mode consistency trend", sample_consistency},
      {"mutual information vs covariance", mi_versus_covariance},
      {"belief propagation", lbp_checks},
      {"bounds calculator", bounds_checks},
      {"separator correctness", separator_checks},
      {"concentration scaling", concentration},
      {"performance", performance},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome outcome;
    try {
      outcome = criteria[k].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failed;
    std::printf("[%s] %2zu %s: %s\n", outcome.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
