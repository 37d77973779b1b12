#pragma once

// Gaussian loopy belief propagation in information form with a fully
// parallel (synchronous) schedule.
//
// Message i -> j carries a precision increment dJ and a potential increment
// dh for x_j:
//   J_{i\j} = J(i,i) + sum_{k in N(i)\j} dJ_{k->i}
//   h_{i\j} = h(i)   + sum_{k in N(i)\j} dh_{k->i}
//   dJ_{i->j} = -J(j,i)^2 / J_{i\j},   dh_{i->j} = -J(j,i) h_{i\j} / J_{i\j}
// All messages of iteration t are computed from the snapshot of iteration
// t-1. Beliefs: J_i = J(i,i) + sum_k dJ_{k->i}, variance 1/J_i, mean h_i/J_i.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ggm/error.hpp"
#include "ggm/graph.hpp"
#include "ggm/model.hpp"

namespace ggm {

struct LbpState {
  std::vector<Node> from, to;  // directed edges: both orientations of every graph edge
  std::vector<double> delta_J, delta_h;
  std::size_t iteration = 0;
  double max_change = 0.0;
};

struct LbpResult {
  Vector variances;
  Vector means;
  bool converged = false;
  bool breakdown = false;  // some J_{i\j} became nonpositive
  std::string diagnostic;
  std::size_t iterations = 0;
  double max_change = 0.0;
  LbpState state;  // messages of the normalized model at exit
};

namespace detail {

inline LbpResult run_normalized(const Graph& g, const Matrix& J, const Vector& h, std::size_t max_iters, double tol) {
  const std::size_t p = g.p();
  LbpResult result;
  LbpState& state = result.state;
  // incoming[i] lists the directed-edge ids k -> i; reverse[e] is the id of the opposite direction.
  std::vector<std::vector<std::size_t>> incoming(p);
  std::vector<std::size_t> reverse;
  for (const auto& e : g.edges()) {
    const std::size_t forward = state.from.size();
    state.from.push_back(e.u);
    state.to.push_back(e.v);
    state.from.push_back(e.v);
    state.to.push_back(e.u);
    incoming[e.v].push_back(forward);
    incoming[e.u].push_back(forward + 1);
    reverse.push_back(forward + 1);
    reverse.push_back(forward);
  }
  const std::size_t m = state.from.size();
  state.delta_J.assign(m, 0.0);
  state.delta_h.assign(m, 0.0);
  std::vector<double> next_J(m), next_h(m), total_J(p), total_h(p);

  auto accumulate = [&] {
    for (Node i = 0; i < p; ++i) {
      total_J[i] = J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
      total_h[i] = h(static_cast<Eigen::Index>(i));
      for (std::size_t e : incoming[i]) {
        total_J[i] += state.delta_J[e];
        total_h[i] += state.delta_h[e];
      }
    }
  };

  for (std::size_t it = 1; it <= max_iters; ++it) {
    accumulate();
    double change = 0.0;
    for (std::size_t e = 0; e < m; ++e) {
      const Node i = state.from[e];
      const Node j = state.to[e];
      const double cavity_J = total_J[i] - state.delta_J[reverse[e]];
      const double cavity_h = total_h[i] - state.delta_h[reverse[e]];
      if (!(cavity_J > 0.0)) {
        result.breakdown = true;
        result.diagnostic = "cavity precision of " + std::to_string(i) + " excluding " + std::to_string(j) +
                            " became nonpositive at iteration " + std::to_string(it);
        state.iteration = it;
        result.iterations = it;
        return result;
      }
      const double coupling = J(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
      next_J[e] = -coupling * coupling / cavity_J;
      next_h[e] = -coupling * cavity_h / cavity_J;
      change = std::max({change, std::abs(next_J[e] - state.delta_J[e]), std::abs(next_h[e] - state.delta_h[e])});
    }
    state.delta_J.swap(next_J);
    state.delta_h.swap(next_h);
    state.iteration = it;
    state.max_change = change;
    if (change <= tol) {
      result.converged = true;
      break;
    }
  }
  accumulate();
  result.iterations = state.iteration;
  result.max_change = state.max_change;
  result.variances.resize(static_cast<Eigen::Index>(p));
  result.means.resize(static_cast<Eigen::Index>(p));
  for (Node i = 0; i < p; ++i) {
    result.variances(static_cast<Eigen::Index>(i)) = 1.0 / total_J[i];
    result.means(static_cast<Eigen::Index>(i)) = total_h[i] / total_J[i];
  }
  if (!result.converged)
    result.diagnostic = "no convergence after " + std::to_string(max_iters) + " iterations (max change " +
                        std::to_string(state.max_change) + ")";
  return result;
}

}  // namespace detail

/// Runs LBP on the unit-diagonal version D^{-1/2} J D^{-1/2} of the model
/// (potential D^{-1/2} h) and maps the beliefs back: variance / D(i,i),
/// mean / sqrt(D(i,i)).
inline LbpResult lbp_run(const GaussianModel& m, const Vector& h, std::size_t max_iters = 10000, double tol = 1e-10) {
  if (!(tol > 0.0)) throw Error(ErrorKind::invalid_parameter, "tolerance must be positive");
  if (h.size() != static_cast<Eigen::Index>(m.p())) throw Error(ErrorKind::invalid_argument, "potential vector has wrong length");
  const Vector scale = m.J().diagonal().cwiseSqrt().cwiseInverse();
  const Matrix normalized = scale.asDiagonal() * m.J() * scale.asDiagonal();
  const Vector h_normalized = scale.cwiseProduct(h);
  LbpResult result = detail::run_normalized(m.graph(), normalized, h_normalized, max_iters, tol);
  if (!result.breakdown) {
    result.variances = result.variances.cwiseProduct(scale).cwiseProduct(scale);
    result.means = result.means.cwiseProduct(scale);
  }
  return result;
}

inline LbpResult lbp_run(const GaussianModel& m, std::size_t max_iters = 10000, double tol = 1e-10) {
  return lbp_run(m, Vector::Zero(static_cast<Eigen::Index>(m.p())), max_iters, tol);
}

/// Iteration cap under which LBP is expected to converge on an
/// alpha-walk-summable model: 10 * ceil(log tol / log alpha).
inline std::size_t walk_summable_iteration_cap(double alpha, double tol) {
  if (alpha <= 0.0) return 10;
  return 10 * static_cast<std::size_t>(std::ceil(std::log(tol) / std::log(alpha)));
}

struct VarianceError {
  Vector per_node;
  double max = 0.0;
};

/// |diag(Sigma) - LBP variances|, elementwise and its maximum.
inline VarianceError lbp_variance_error(const GaussianModel& m, const LbpResult& r) {
  if (r.breakdown) throw Error(ErrorKind::lbp_breakdown, r.diagnostic);
  VarianceError out;
  out.per_node = (m.sigma().diagonal() - r.variances).cwiseAbs();
  out.max = out.per_node.size() > 0 ? out.per_node.maxCoeff() : 0.0;
  return out;
}

}  // namespace ggm
