#pragma once

// Walk-summable Gaussian graphical models in information form: precision
// matrix J Markov on a graph, the partial-correlation matrix R, exact and
// walk-sum covariances, Schur-complement conditional covariances, and the
// assumption report used to sanity-check a model before learning from it.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ggm/error.hpp"
#include "ggm/graph.hpp"
#include "ggm/rng.hpp"

namespace ggm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kPositiveDefiniteTolerance = 1e-12;

struct PartialCorrelationMatrix {
  Matrix R;  // symmetric, zero diagonal
};

/// R(i,j) = -J(i,j) / sqrt(J(i,i) J(j,j)), R(i,i) = 0.
inline PartialCorrelationMatrix partial_correlation_matrix(const Matrix& J) {
  if (J.rows() != J.cols()) throw Error(ErrorKind::invalid_argument, "precision matrix must be square");
  const Eigen::Index p = J.rows();
  for (Eigen::Index k = 0; k < p; ++k)
    if (!(J(k, k) > 0.0)) throw Error(ErrorKind::invalid_argument, "precision diagonal must be positive");
  const Vector scale = J.diagonal().cwiseSqrt().cwiseInverse();
  Matrix R = -(scale.asDiagonal() * J * scale.asDiagonal());
  PartialCorrelationMatrix out{0.5 * (R + R.transpose())};
  out.R.diagonal().setZero();
  return out;
}

struct PowerIterationResult {
  double value = 0.0;
  int iterations = 0;
};

/// Largest eigenvalue of a symmetric entrywise-nonnegative matrix, which is
/// also its spectral norm. Iterates on A + I so that the -lambda eigenvalue
/// of bipartite supports cannot tie with +lambda, and reports the Rayleigh
/// quotient once it stops moving by more than rel_tol.
inline PowerIterationResult perron_eigenvalue(const Matrix& A, double rel_tol = 1e-10, int max_iters = 10000) {
  const Eigen::Index p = A.rows();
  if (p == 0) return {};
  if (A.cwiseAbs().maxCoeff() == 0.0) return {0.0, 0};
  Vector x = Vector::Constant(p, 1.0 / std::sqrt(static_cast<double>(p)));
  double previous = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iters; ++it) {
    Vector y = A * x;
    const double rayleigh = x.dot(y);
    y += x;
    x = y / y.norm();
    if (std::abs(rayleigh - previous) <= rel_tol * std::abs(rayleigh)) return {rayleigh, it};
    previous = rayleigh;
  }
  throw Error(ErrorKind::numeric_failure,
              "power iteration did not converge in " + std::to_string(max_iters) + " iterations");
}

/// alpha = || |R| ||_2, the walk-summability parameter.
inline double walk_summability_alpha(const Matrix& J, double rel_tol = 1e-10, int max_iters = 10000) {
  return perron_eigenvalue(partial_correlation_matrix(J).R.cwiseAbs(), rel_tol, max_iters).value;
}

namespace detail {

inline Eigen::LLT<Matrix> checked_cholesky(const Matrix& A) {
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::not_positive_definite, "Cholesky factorization failed");
  const double floor = kPositiveDefiniteTolerance * A.diagonal().maxCoeff();
  const Matrix& L = llt.matrixLLT();
  for (Eigen::Index k = 0; k < A.rows(); ++k)
    if (!(L(k, k) * L(k, k) > floor))
      throw Error(ErrorKind::not_positive_definite, "Cholesky pivot below tolerance at index " + std::to_string(k));
  return llt;
}

inline Matrix symmetrized(const Matrix& A) { return 0.5 * (A + A.transpose()); }

}  // namespace detail

/// Sigma = J^{-1} through a Cholesky solve.
inline Matrix exact_covariance(const Matrix& J) {
  const auto llt = detail::checked_cholesky(J);
  Matrix sigma = detail::symmetrized(llt.solve(Matrix::Identity(J.rows(), J.cols())));
  const double residual = (J * sigma - Matrix::Identity(J.rows(), J.cols())).cwiseAbs().maxCoeff();
  if (residual > 1e-8)
    throw Error(ErrorKind::numeric_failure, "inverse residual " + std::to_string(residual) + " exceeds 1e-8");
  return sigma;
}

/// Sum_{k=0}^{order} R^k: walks of length at most `order`.
inline Matrix truncated_walksum_covariance(const Matrix& R, int order) {
  Matrix total = Matrix::Identity(R.rows(), R.cols());
  Matrix power = Matrix::Identity(R.rows(), R.cols());
  for (int k = 1; k <= order; ++k) {
    power = power * R;
    total += power;
  }
  return total;
}

inline Matrix submatrix(const Matrix& A, std::span<const Node> rows, std::span<const Node> cols) {
  Matrix out(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          A(static_cast<Eigen::Index>(rows[r]), static_cast<Eigen::Index>(cols[c]));
  return out;
}

/// Sigma(i,j | S) = Sigma(i,j) - Sigma(i,S) Sigma(S,S)^{-1} Sigma(S,j).
/// Dense reference path; the estimator has its own fast small-|S| kernels.
inline double conditional_covariance_exact(const Matrix& sigma, Node i, Node j, std::span<const Node> S) {
  for (Node s : S)
    if (s == i || s == j) throw Error(ErrorKind::invalid_argument, "conditioning set must exclude i and j");
  const auto ii = static_cast<Eigen::Index>(i);
  const auto jj = static_cast<Eigen::Index>(j);
  if (S.empty()) return sigma(ii, jj);
  const Matrix block = submatrix(sigma, S, S);
  Eigen::LDLT<Matrix> ldlt(block);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().minCoeff() <= kPositiveDefiniteTolerance * block.diagonal().maxCoeff())
    throw Error(ErrorKind::numeric_failure, "Sigma(S,S) is singular");
  const std::array<Node, 1> row_i{i};
  const std::array<Node, 1> row_j{j};
  const Vector a = submatrix(sigma, S, row_i);
  const Vector b = submatrix(sigma, S, row_j);
  return sigma(ii, jj) - a.dot(ldlt.solve(b));
}

// ---------------------------------------------------------------------------
// Models

struct Attractive {};
struct Alternating {};
struct RandomSigns { std::uint64_t seed = 0; };
using SignPattern = std::variant<Attractive, Alternating, RandomSigns>;

/// Zero-mean Gaussian model Markov on `graph`. Immutable; the covariance is
/// computed on first use and shared between copies.
class GaussianModel {
 public:
  GaussianModel(Graph graph, Matrix J) : graph_(std::move(graph)), J_(std::move(J)) {
    const auto p = static_cast<Eigen::Index>(graph_.p());
    if (J_.rows() != p || J_.cols() != p)
      throw Error(ErrorKind::invalid_argument, "precision matrix dimension does not match graph");
    if ((J_ - J_.transpose()).cwiseAbs().maxCoeff() > 0.0)
      throw Error(ErrorKind::invalid_argument, "precision matrix must be exactly symmetric");
    for (Eigen::Index a = 0; a < p; ++a)
      for (Eigen::Index b = a + 1; b < p; ++b)
        if ((J_(a, b) != 0.0) != graph_.has_edge(static_cast<Node>(a), static_cast<Node>(b)))
          throw Error(ErrorKind::invalid_argument, "precision sparsity pattern differs from the graph at (" +
                                                       std::to_string(a) + "," + std::to_string(b) + ")");
    detail::checked_cholesky(J_);
    alpha_ = walk_summability_alpha(J_);
    d_min_ = p > 0 ? J_.diagonal().minCoeff() : 0.0;
    j_min_ = std::numeric_limits<double>::infinity();
    j_max_ = 0.0;
    for (const auto& e : graph_.edges()) {
      const double w = std::abs(J_(static_cast<Eigen::Index>(e.u), static_cast<Eigen::Index>(e.v)));
      j_min_ = std::min(j_min_, w);
      j_max_ = std::max(j_max_, w);
    }
    if (graph_.edge_count() == 0) j_min_ = 0.0;
  }

  const Graph& graph() const noexcept { return graph_; }
  const Matrix& J() const noexcept { return J_; }
  std::size_t p() const noexcept { return graph_.p(); }
  double alpha() const noexcept { return alpha_; }
  bool walk_summable() const noexcept { return alpha_ < 1.0; }
  double j_min() const noexcept { return j_min_; }
  double j_max() const noexcept { return j_max_; }
  double d_min() const noexcept { return d_min_; }

  bool attractive() const noexcept {
    for (const auto& e : graph_.edges())
      if (J_(static_cast<Eigen::Index>(e.u), static_cast<Eigen::Index>(e.v)) > 0.0) return false;
    return true;
  }

  const Matrix& sigma() const {
    std::call_once(cache_->once, [this] { cache_->sigma = exact_covariance(J_); });
    return cache_->sigma;
  }

 private:
  struct Cache {
    std::once_flag once;
    Matrix sigma;
  };

  Graph graph_;
  Matrix J_;
  double alpha_ = 0.0;
  double j_min_ = 0.0;
  double j_max_ = 0.0;
  double d_min_ = 0.0;
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

namespace detail {

inline Matrix assemble_precision(const Graph& g, double magnitude, const std::vector<double>& signs, double diagonal) {
  const auto p = static_cast<Eigen::Index>(g.p());
  Matrix J = Matrix::Identity(p, p) * diagonal;
  for (std::size_t k = 0; k < g.edges().size(); ++k) {
    const auto& e = g.edges()[k];
    // Partial correlation rho * sign translates to J = -rho * sign * diagonal.
    const double value = -signs[k] * magnitude * diagonal;
    J(static_cast<Eigen::Index>(e.u), static_cast<Eigen::Index>(e.v)) = value;
    J(static_cast<Eigen::Index>(e.v), static_cast<Eigen::Index>(e.u)) = value;
  }
  return J;
}

}  // namespace detail

/// Model on `g` whose edge partial correlations share one magnitude rho,
/// found by bisection so that alpha lands within 1e-6 of target_alpha.
/// Attractive: every partial correlation positive (J off-diagonal <= 0).
/// Alternating: sign flips with the edge's index in sorted order.
/// RandomSigns: independent fair signs from the given seed.
inline GaussianModel synthesize_model(const Graph& g, double target_alpha, const SignPattern& pattern,
                                      double diagonal = 1.0) {
  if (!(target_alpha >= 0.0 && target_alpha < 1.0))
    throw Error(ErrorKind::invalid_parameter, "target alpha must lie in [0, 1)");
  if (!(diagonal >= 1.0)) throw Error(ErrorKind::invalid_parameter, "diagonal must be >= 1");
  if (target_alpha > 0.0 && g.edge_count() == 0)
    throw Error(ErrorKind::synthesis_failed, "positive alpha requested on an edgeless graph");

  std::vector<double> signs(g.edge_count(), 1.0);
  if (std::holds_alternative<Alternating>(pattern)) {
    for (std::size_t k = 0; k < signs.size(); ++k) signs[k] = (k % 2 == 0) ? 1.0 : -1.0;
  } else if (const auto* random = std::get_if<RandomSigns>(&pattern)) {
    Rng rng(random->seed);
    for (auto& s : signs) s = (rng() >> 63) ? -1.0 : 1.0;
  }

  if (target_alpha == 0.0) {
    if (g.edge_count() > 0) throw Error(ErrorKind::synthesis_failed, "alpha = 0 is only realizable on an edgeless graph");
    return GaussianModel(g, detail::assemble_precision(g, 0.0, signs, diagonal));
  }

  // alpha(rho) is increasing and alpha(1) = ||adjacency|| >= 1 > target.
  double lo = 0.0;
  double hi = 1.0;
  constexpr double kTolerance = 1e-6;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    Matrix J = detail::assemble_precision(g, mid, signs, diagonal);
    const double alpha = walk_summability_alpha(J);
    if (std::abs(alpha - target_alpha) <= kTolerance) return GaussianModel(g, std::move(J));
    (alpha < target_alpha ? lo : hi) = mid;
  }
  throw Error(ErrorKind::synthesis_failed, "bisection on the edge magnitude did not reach the target alpha");
}

/// Same structure with J scaled to D^{1/2} J D^{1/2} for a positive diagonal
/// scaling D; partial correlations and alpha are unchanged.
inline GaussianModel rescaled(const GaussianModel& m, const Vector& scaling) {
  const Vector root = scaling.cwiseSqrt();
  Matrix J = root.asDiagonal() * m.J() * root.asDiagonal();
  return GaussianModel(m.graph(), detail::symmetrized(J));
}

// ---------------------------------------------------------------------------
// Assumption report

struct EdgeOverlap {
  Edge edge;
  double k = 0.0;  // || J(V \ {i,j}, {i,j}) ||_2^2
};

struct AssumptionReport {
  double alpha = 0.0;
  bool alpha_pass = false;
  double d_min = 0.0;
  double j_min = 0.0;
  double decay_ratio = 0.0;  // J_min / D_min * alpha^{-gamma}
  std::size_t eta = 0;
  std::size_t gamma = 0;
  double delta = 0.1;
  std::vector<EdgeOverlap> overlaps;
  double overlap_margin = std::numeric_limits<double>::infinity();
  bool overlap_pass = true;
  bool overlap_waived = false;  // attractive models do not need the overlap condition
  bool attractive = false;
  std::vector<std::string> notes;
};

/// Squared spectral norm of the (p-2) x 2 block J(V \ {i,j}, {i,j}), from
/// the largest eigenvalue of its 2 x 2 Gram matrix.
inline double neighbourhood_overlap(const Matrix& J, Node i, Node j) {
  double a = 0.0, b = 0.0, c = 0.0;
  const auto ii = static_cast<Eigen::Index>(i);
  const auto jj = static_cast<Eigen::Index>(j);
  for (Eigen::Index k = 0; k < J.rows(); ++k) {
    if (k == ii || k == jj) continue;
    a += J(k, ii) * J(k, ii);
    b += J(k, ii) * J(k, jj);
    c += J(k, jj) * J(k, jj);
  }
  return 0.5 * (a + c) + std::sqrt(0.25 * (a - c) * (a - c) + b * b);
}

inline AssumptionReport check_assumptions(const GaussianModel& m, std::size_t eta, std::size_t gamma,
                                          double delta = 0.1) {
  AssumptionReport report;
  report.alpha = m.alpha();
  report.alpha_pass = m.alpha() < 1.0;
  report.d_min = m.d_min();
  report.j_min = m.j_min();
  report.eta = eta;
  report.gamma = gamma;
  report.delta = delta;
  report.attractive = m.attractive();
  report.decay_ratio = m.alpha() > 0.0
                           ? m.j_min() / m.d_min() * std::pow(m.alpha(), -static_cast<double>(gamma))
                           : std::numeric_limits<double>::infinity();
  if (!report.alpha_pass) report.notes.emplace_back("model is not walk-summable (alpha >= 1)");

  for (const auto& e : m.graph().edges()) {
    const double k = neighbourhood_overlap(m.J(), e.u, e.v);
    report.overlaps.push_back({e, k});
    const double w = std::abs(m.J()(static_cast<Eigen::Index>(e.u), static_cast<Eigen::Index>(e.v)));
    const double ratio = k > 0.0 ? m.d_min() * (1.0 - m.alpha()) * w / k - 1.0 : std::numeric_limits<double>::infinity();
    report.overlap_margin = std::min(report.overlap_margin, ratio);
  }
  report.overlap_pass = report.overlap_margin > delta;
  if (report.attractive) {
    report.overlap_waived = true;
    report.notes.emplace_back("attractive model: edge-overlap condition waived");
  }
  return report;
}

}  // namespace ggm
