#pragma once

// Structure learning by conditional-covariance thresholding and its
// conditional-mutual-information variant. For every node pair the learner
// minimizes the absolute conditional statistic over all conditioning sets
// of size at most eta and keeps the pair as an edge iff that minimum is
// strictly above the threshold.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ggm/error.hpp"
#include "ggm/graph.hpp"
#include "ggm/model.hpp"
#include "ggm/parallel.hpp"
#include "ggm/sampler.hpp"

namespace ggm {

enum class Statistic { covariance, mutual_information };

inline std::string_view to_string(Statistic s) {
  return s == Statistic::covariance ? "covariance" : "mutual_information";
}

struct EstimatorConfig {
  std::size_t eta = 1;
  double xi = 0.0;  // covariance units; the MI test thresholds at xi^2
  Statistic statistic = Statistic::covariance;
  bool early_exit = false;     // stop a pair's scan once the statistic drops below xi * 1e-3
  double max_condition = 1e12;  // larger condition numbers of Sigma(S,S) skip the subset
  double zero_tolerance = 1e-12;  // exact mode: |stat| below this (relative) counts as exactly zero
  unsigned threads = 0;           // 0: hardware concurrency
};

/// Either exact population covariances or an empirical covariance from n
/// samples. Sample mode additionally requires n > |S| for every subset.
struct CovarianceInput {
  Matrix sigma;
  std::optional<std::size_t> n;

  static CovarianceInput exact(Matrix sigma) { return {std::move(sigma), std::nullopt}; }
  static CovarianceInput from_samples(const SampleSet& s) { return {empirical_covariance(s), s.n()}; }

  bool exact_mode() const noexcept { return !n.has_value(); }
  std::size_t p() const noexcept { return static_cast<std::size_t>(sigma.rows()); }
};

// ---------------------------------------------------------------------------
// Conditional statistics

namespace detail {

/// 2 x 2 conditional covariance block of (i, j) given S, or nullopt when
/// Sigma(S,S) is singular or worse conditioned than `max_condition`.
struct ConditionalBlock {
  double ii = 0.0;
  double ij = 0.0;
  double jj = 0.0;
};

inline std::optional<ConditionalBlock> conditional_block(const Matrix& sigma, Node i, Node j,
                                                         std::span<const Node> S, double max_condition,
                                                         bool need_variances) {
  const auto I = static_cast<Eigen::Index>(i);
  const auto Jx = static_cast<Eigen::Index>(j);
  ConditionalBlock out{sigma(I, I), sigma(I, Jx), sigma(Jx, Jx)};
  switch (S.size()) {
    case 0:
      return out;
    case 1: {
      const auto s = static_cast<Eigen::Index>(S[0]);
      const double d = sigma(s, s);
      if (!(d > 0.0)) return std::nullopt;
      const double xi = sigma(I, s), xj = sigma(Jx, s);
      out.ij -= xi * xj / d;
      if (need_variances) {
        out.ii -= xi * xi / d;
        out.jj -= xj * xj / d;
      }
      return out;
    }
    case 2: {
      const auto s = static_cast<Eigen::Index>(S[0]);
      const auto t = static_cast<Eigen::Index>(S[1]);
      const double a = sigma(s, s), b = sigma(s, t), c = sigma(t, t);
      const double half_trace = 0.5 * (a + c);
      const double radius = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
      const double hi = half_trace + radius;
      const double lo = (a * c - b * b) / hi;  // avoids cancellation in half_trace - radius
      if (!(lo > 0.0) || hi / lo > max_condition) return std::nullopt;
      const double det = a * c - b * b;
      const double is = sigma(I, s), it = sigma(I, t), js = sigma(Jx, s), jt = sigma(Jx, t);
      // x^T adj(Sigma(S,S)) y / det
      auto quad = [&](double x0, double x1, double y0, double y1) {
        return (x0 * (c * y0 - b * y1) + x1 * (a * y1 - b * y0)) / det;
      };
      out.ij -= quad(is, it, js, jt);
      if (need_variances) {
        out.ii -= quad(is, it, is, it);
        out.jj -= quad(js, jt, js, jt);
      }
      return out;
    }
    default: {
      const Matrix block = submatrix(sigma, S, S);
      Eigen::SelfAdjointEigenSolver<Matrix> eig(block);
      if (eig.info() != Eigen::Success) return std::nullopt;
      const double lo = eig.eigenvalues().minCoeff();
      const double hi = eig.eigenvalues().maxCoeff();
      if (!(lo > 0.0) || hi / lo > max_condition) return std::nullopt;
      Vector x(static_cast<Eigen::Index>(S.size()));
      Vector y(static_cast<Eigen::Index>(S.size()));
      for (std::size_t k = 0; k < S.size(); ++k) {
        x(static_cast<Eigen::Index>(k)) = sigma(I, static_cast<Eigen::Index>(S[k]));
        y(static_cast<Eigen::Index>(k)) = sigma(Jx, static_cast<Eigen::Index>(S[k]));
      }
      const Eigen::LDLT<Matrix> ldlt(block);
      const Vector solved_y = ldlt.solve(y);
      out.ij -= x.dot(solved_y);
      if (need_variances) {
        out.ii -= x.dot(ldlt.solve(x));
        out.jj -= y.dot(solved_y);
      }
      return out;
    }
  }
}

inline void check_pair(const Matrix& sigma, Node i, Node j, std::span<const Node> S) {
  const auto p = static_cast<Node>(sigma.rows());
  if (i >= p || j >= p) throw Error(ErrorKind::invalid_argument, "node out of range");
  for (Node s : S) {
    if (s >= p) throw Error(ErrorKind::invalid_argument, "conditioning node out of range");
    if (s == i || s == j) throw Error(ErrorKind::invalid_argument, "conditioning set must exclude i and j");
  }
}

}  // namespace detail

/// Signed Sigma(i,j | S) by Schur complement. Throws conditioning-failure
/// when Sigma(S,S) is singular or its condition number exceeds max_condition.
inline double conditional_covariance(const Matrix& sigma, Node i, Node j, std::span<const Node> S,
                                     double max_condition = 1e12) {
  detail::check_pair(sigma, i, j, S);
  const auto block = detail::conditional_block(sigma, i, j, S, max_condition, false);
  if (!block) throw Error(ErrorKind::conditioning_failure, "Sigma(S,S) is singular or ill-conditioned");
  return block->ij;
}

/// rho(i,j | S) = Sigma(i,j|S) / sqrt(Sigma(i,i|S) Sigma(j,j|S)).
inline double conditional_correlation(const Matrix& sigma, Node i, Node j, std::span<const Node> S,
                                      double max_condition = 1e12) {
  detail::check_pair(sigma, i, j, S);
  const auto block = detail::conditional_block(sigma, i, j, S, max_condition, true);
  if (!block) throw Error(ErrorKind::conditioning_failure, "Sigma(S,S) is singular or ill-conditioned");
  if (!(block->ii > 0.0 && block->jj > 0.0))
    throw Error(ErrorKind::numeric_failure, "nonpositive conditional variance");
  return block->ij / std::sqrt(block->ii * block->jj);
}

/// I(X_i; X_j | X_S) = -1/2 log(1 - rho^2) in nats.
inline double mutual_information_from_correlation(double rho) {
  if (!(std::abs(rho) < 1.0)) throw Error(ErrorKind::numeric_failure, "|rho| >= 1 has unbounded information");
  return -0.5 * std::log1p(-rho * rho);
}

inline double conditional_mutual_information(const Matrix& sigma, Node i, Node j, std::span<const Node> S,
                                             double max_condition = 1e12) {
  return mutual_information_from_correlation(conditional_correlation(sigma, i, j, S, max_condition));
}

// ---------------------------------------------------------------------------
// Per-pair minimization

enum class PairStatus { ok, failed };

struct PairStatistic {
  double value = std::numeric_limits<double>::infinity();
  NodeSet argmin;
  PairStatus status = PairStatus::failed;
  std::size_t skipped = 0;  // subsets rejected by the conditioning check
};

namespace detail {

/// Visits every k-subset of `pool` in lexicographic order.
template <class Visit>
bool for_each_subset(std::span<const Node> pool, std::size_t k, std::vector<Node>& subset, Visit&& visit) {
  const std::size_t m = pool.size();
  if (k > m) return true;
  std::vector<std::size_t> index(k);
  for (std::size_t t = 0; t < k; ++t) index[t] = t;
  subset.resize(k);
  for (;;) {
    for (std::size_t t = 0; t < k; ++t) subset[t] = pool[index[t]];
    if (!visit(std::span<const Node>(subset))) return false;
    std::size_t t = k;
    while (t > 0 && index[t - 1] == m - k + t - 1) --t;
    if (t == 0) return true;
    ++index[t - 1];
    for (std::size_t u = t; u < k; ++u) index[u] = index[u - 1] + 1;
  }
}

/// Statistic for one subset, or nullopt when the subset is skipped.
inline std::optional<double> pair_statistic(const CovarianceInput& input, Node i, Node j, std::span<const Node> S,
                                            const EstimatorConfig& cfg) {
  if (input.n && S.size() >= *input.n) return std::nullopt;
  const bool mi = cfg.statistic == Statistic::mutual_information;
  const auto block = conditional_block(input.sigma, i, j, S, cfg.max_condition, mi);
  if (!block) return std::nullopt;
  if (!mi) {
    double value = std::abs(block->ij);
    if (input.exact_mode()) {
      const auto I = static_cast<Eigen::Index>(i), Jx = static_cast<Eigen::Index>(j);
      if (value <= cfg.zero_tolerance * std::sqrt(input.sigma(I, I) * input.sigma(Jx, Jx))) value = 0.0;
    }
    return value;
  }
  if (!(block->ii > 0.0 && block->jj > 0.0)) return std::nullopt;
  double rho = block->ij / std::sqrt(block->ii * block->jj);
  if (input.exact_mode() && std::abs(rho) <= cfg.zero_tolerance) rho = 0.0;
  if (!(std::abs(rho) < 1.0)) return std::nullopt;
  return -0.5 * std::log1p(-rho * rho);
}

inline double statistic_threshold(const EstimatorConfig& cfg) {
  return cfg.statistic == Statistic::mutual_information ? cfg.xi * cfg.xi : cfg.xi;
}

}  // namespace detail

/// Exhaustive minimum of the configured statistic over all S subset of
/// V \ {i,j} with |S| <= eta. Ties go to the lexicographically smallest S.
inline PairStatistic min_conditional_statistic(const CovarianceInput& input, Node i, Node j,
                                               const EstimatorConfig& cfg) {
  const std::size_t p = input.p();
  if (i >= p || j >= p || i == j) throw Error(ErrorKind::invalid_argument, "need two distinct nodes");
  if (p >= 2 && cfg.eta > p - 2) throw Error(ErrorKind::invalid_parameter, "eta exceeds p - 2");
  std::vector<Node> pool;
  pool.reserve(p);
  for (Node v = 0; v < p; ++v)
    if (v != i && v != j) pool.push_back(v);

  PairStatistic best;
  const double early = cfg.early_exit ? detail::statistic_threshold(cfg) * 1e-3 : -1.0;
  std::vector<Node> subset;
  for (std::size_t k = 0; k <= cfg.eta; ++k) {
    const bool finished = !detail::for_each_subset(pool, k, subset, [&](std::span<const Node> S) {
      const auto value = detail::pair_statistic(input, i, j, S, cfg);
      if (!value) {
        ++best.skipped;
        return true;
      }
      const bool better = best.status == PairStatus::failed || *value < best.value ||
                          (*value == best.value && std::lexicographical_compare(S.begin(), S.end(), best.argmin.begin(),
                                                                                best.argmin.end()));
      if (better) {
        best.value = *value;
        best.argmin.assign(S.begin(), S.end());
        best.status = PairStatus::ok;
      }
      return !(best.value <= early);
    });
    if (finished) break;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Whole-graph estimation

struct PairResult {
  Edge pair;
  PairStatistic stat;
};

struct EstimationResult {
  Graph graph_hat;
  std::vector<PairResult> pairs;  // every (i < j), lexicographic
  EstimatorConfig config;
  double threshold = 0.0;  // in statistic units (xi or xi^2)
  bool exact_mode = true;
  std::optional<std::size_t> n;
  double wall_seconds = 0.0;

  std::size_t failed_pairs() const {
    return static_cast<std::size_t>(std::count_if(pairs.begin(), pairs.end(),
                                                  [](const PairResult& r) { return r.stat.status == PairStatus::failed; }));
  }
};

/// Runs the thresholding test with cfg.statistic. Failed pairs (every subset
/// skipped) are reported and treated as non-edges.
inline EstimationResult estimate_structure(const CovarianceInput& input, const EstimatorConfig& cfg) {
  if (!(cfg.xi >= 0.0)) throw Error(ErrorKind::invalid_parameter, "threshold must be nonnegative");
  const auto start = std::chrono::steady_clock::now();
  const std::size_t p = input.p();
  std::vector<Edge> pairs;
  pairs.reserve(p * (p - (p > 0 ? 1 : 0)) / 2);
  for (Node i = 0; i < p; ++i)
    for (Node j = i + 1; j < p; ++j) pairs.emplace_back(i, j);

  EstimationResult result;
  result.config = cfg;
  result.threshold = detail::statistic_threshold(cfg);
  result.exact_mode = input.exact_mode();
  result.n = input.n;
  result.pairs.resize(pairs.size());
  parallel_for(pairs.size(), cfg.threads, [&](std::size_t k) {
    result.pairs[k] = {pairs[k], min_conditional_statistic(input, pairs[k].u, pairs[k].v, cfg)};
  });

  std::vector<Edge> kept;
  for (const auto& r : result.pairs)
    if (r.stat.status == PairStatus::ok && r.stat.value > result.threshold) kept.push_back(r.pair);
  result.graph_hat = Graph(p, std::move(kept));
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

/// Conditional covariance thresholding: edge iff min_S |Sigma(i,j|S)| > xi.
inline EstimationResult cmit(const CovarianceInput& input, EstimatorConfig cfg) {
  cfg.statistic = Statistic::covariance;
  return estimate_structure(input, cfg);
}

/// Conditional mutual information thresholding: edge iff min_S I(i;j|S) > xi^2.
inline EstimationResult cmit_mi(const CovarianceInput& input, EstimatorConfig cfg) {
  cfg.statistic = Statistic::mutual_information;
  return estimate_structure(input, cfg);
}

/// xi = kappa * sqrt(ln p / n).
inline double default_threshold(double n, double p, double kappa = 2.0) {
  if (!(n >= 1.0 && p >= 1.0 && kappa > 0.0)) throw Error(ErrorKind::invalid_parameter, "need n, p >= 1 and kappa > 0");
  return kappa * std::sqrt(std::log(p) / n);
}

// ---------------------------------------------------------------------------
// Oracle diagnostics on exact covariances

struct OracleGap {
  double c_min = std::numeric_limits<double>::infinity();  // weakest edge statistic over |S| <= eta
  double c_max = 0.0;  // strongest non-edge statistic at its gamma-local separator
  bool separable = false;  // c_min > c_max
  std::size_t largest_separator = 0;
  bool separators_fit = true;  // every local separator has size <= eta
};

inline OracleGap oracle_gap(const Graph& g, const Matrix& sigma, std::size_t eta, std::size_t gamma,
                            unsigned threads = 0) {
  OracleGap gap;
  const auto input = CovarianceInput::exact(sigma);
  EstimatorConfig cfg;
  cfg.eta = std::min(eta, g.p() >= 2 ? g.p() - 2 : 0);
  const auto& edges = g.edges();
  std::vector<double> edge_min(edges.size());
  parallel_for(edges.size(), threads, [&](std::size_t k) {
    const auto stat = min_conditional_statistic(input, edges[k].u, edges[k].v, cfg);
    edge_min[k] = stat.status == PairStatus::ok ? stat.value : 0.0;
  });
  for (double v : edge_min) gap.c_min = std::min(gap.c_min, v);

  const auto profile = separation_profile(g, gamma);
  gap.largest_separator = profile.eta;
  gap.separators_fit = profile.eta <= eta;
  for (const auto& [pair, sep] : profile.per_pair) {
    const auto value = detail::pair_statistic(input, pair.u, pair.v, sep, cfg);
    gap.c_max = std::max(gap.c_max, value ? *value : std::numeric_limits<double>::infinity());
  }
  gap.separable = gap.c_min > gap.c_max;
  return gap;
}

inline OracleGap oracle_gap(const GaussianModel& m, std::size_t eta, std::size_t gamma, unsigned threads = 0) {
  return oracle_gap(m.graph(), m.sigma(), eta, gamma, threads);
}

/// Threshold halfway between the oracle extremes.
inline double oracle_threshold(const OracleGap& gap) { return 0.5 * (gap.c_min + gap.c_max); }

}  // namespace ggm
