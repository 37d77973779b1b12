#pragma once

// Sample-complexity lower bounds for learning Gaussian models on
// Erdos-Renyi graphs G(p, c/p): the Fano-type weak converse, its version
// with an edit-distance allowance D, and the typical-set quantities the
// converse is built on. Entropies are in bits; the rate function in nats.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ggm/error.hpp"
#include "ggm/graph.hpp"

namespace ggm {

/// H_b(q) in bits, with 0 log 0 = 0.
inline double binary_entropy(double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorKind::invalid_argument, "binary entropy needs q in [0, 1]");
  if (q == 0.0 || q == 1.0) return 0.0;
  return -q * std::log2(q) - (1.0 - q) * std::log2(1.0 - q);
}

inline double pairs_count(double p) { return 0.5 * p * (p - 1.0); }

struct BoundsConfig {
  double p = 0.0;
  double c = 0.0;
  double alpha = 0.0;
  std::optional<double> distortion;  // D, allowed edge edits
  double epsilon = 0.1;

  void validate() const {
    if (!(p >= 2.0)) throw Error(ErrorKind::invalid_parameter, "p must be at least 2");
    if (!(c > 0.0 && c < p)) throw Error(ErrorKind::invalid_parameter, "c must lie in (0, p)");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::invalid_parameter, "alpha must lie in (0, 1)");
    if (distortion && !(*distortion >= 0.0)) throw Error(ErrorKind::invalid_parameter, "distortion must be >= 0");
    if (!(epsilon >= 0.0)) throw Error(ErrorKind::invalid_parameter, "epsilon must be >= 0");
  }
};

/// log2[2 pi e (1/(1-alpha) + 1)]: bits per sample and node that one
/// observation of an alpha-walk-summable model can carry about the graph.
inline double per_sample_capacity_bits(double alpha) {
  return std::log2(2.0 * std::numbers::pi * std::numbers::e * (1.0 / (1.0 - alpha) + 1.0));
}

struct FanoBound {
  double exact = 0.0;       // 2 C(p,2) H_b(c/p) / (p * capacity)
  double simplified = 0.0;  // c log2 p / capacity
};

inline FanoBound fano_lower_bound(double p, double c, double alpha) {
  BoundsConfig{p, c, alpha, std::nullopt, 0.0}.validate();
  const double capacity = per_sample_capacity_bits(alpha);
  return {2.0 / (p * capacity) * pairs_count(p) * binary_entropy(c / p), c * std::log2(p) / capacity};
}

struct DistortionBound {
  double value = 0.0;
  double beta = 0.0;  // D / C(p,2)
  bool informative = true;  // beta < c/p; otherwise value is 0
};

inline DistortionBound fano_lower_bound_distortion(double p, double c, double alpha, double D) {
  BoundsConfig{p, c, alpha, D, 0.0}.validate();
  DistortionBound out;
  out.beta = D / pairs_count(p);
  if (!(out.beta < c / p)) {
    out.informative = false;
    return out;
  }
  out.value = 2.0 / (p * per_sample_capacity_bits(alpha)) * pairs_count(p) *
              (binary_entropy(c / p) - binary_entropy(out.beta));
  return out;
}

/// K(c, eps) = (c/2) [(1 + eps) ln(1 + eps) - eps].
inline double rate_function(double c, double epsilon) {
  if (!(c > 0.0 && epsilon >= 0.0)) throw Error(ErrorKind::invalid_parameter, "rate function needs c > 0, eps >= 0");
  return 0.5 * c * ((1.0 + epsilon) * std::log1p(epsilon) - epsilon);
}

/// Chernoff bound 2 exp(-p K(c, eps)) on P(G not typical), clamped to 1.
inline double atypical_probability_bound(double p, double c, double epsilon) {
  return std::min(1.0, 2.0 * std::exp(-p * rate_function(c, epsilon)));
}

/// eps-typical: |avg_degree/c - 1/2| <= eps/2 with avg_degree = |E|/p,
/// evaluated as |2|E| - c p| <= eps c p to stay exact for integral inputs.
inline bool is_typical(std::size_t p, std::size_t edges, double c, double epsilon) {
  const double cp = c * static_cast<double>(p);
  return std::abs(2.0 * static_cast<double>(edges) - cp) <= epsilon * cp;
}

inline bool is_typical(const Graph& g, double c, double epsilon) {
  return is_typical(g.p(), g.edge_count(), c, epsilon);
}

/// log2 P(G) under G(p, c/p) for a graph with `edges` edges.
inline double er_log2_probability(double p, double c, std::size_t edges) {
  const double q = c / p;
  const double k = static_cast<double>(edges);
  return k * std::log2(q) + (pairs_count(p) - k) * std::log2(1.0 - q);
}

struct TypicalSetBounds {
  // Per-member probability sandwich, as log2 values.
  double log2_prob_lower = 0.0;  // -C(p,2) H_b(c/p) (1 + eps)
  double log2_prob_upper = 0.0;  // -C(p,2) H_b(c/p)
  // Cardinality sandwich, as log2 values. The lower end is asymptotic.
  double log2_card_lower = 0.0;  // log2(1 - eps) + C(p,2) H_b(c/p)
  double log2_card_upper = 0.0;  // C(p,2) H_b(c/p) (1 + eps)
};

inline TypicalSetBounds typical_set_bounds(double p, double c, double epsilon) {
  const double entropy = pairs_count(p) * binary_entropy(c / p);
  TypicalSetBounds out;
  out.log2_prob_lower = -entropy * (1.0 + epsilon);
  out.log2_prob_upper = -entropy;
  out.log2_card_lower = (epsilon < 1.0 ? std::log2(1.0 - epsilon) : -std::numeric_limits<double>::infinity()) + entropy;
  out.log2_card_upper = entropy * (1.0 + epsilon);
  return out;
}

struct BoundsReport {
  BoundsConfig config;
  FanoBound fano;
  std::optional<DistortionBound> distortion;
  bool simplified_implied = false;  // exact >= simplified at this (p, c)
  TypicalSetBounds typical;
  double rate = 0.0;
  double atypical_probability = 0.0;
  std::vector<std::string> notes;
};

inline BoundsReport evaluate_bounds(const BoundsConfig& cfg) {
  cfg.validate();
  BoundsReport report;
  report.config = cfg;
  report.fano = fano_lower_bound(cfg.p, cfg.c, cfg.alpha);
  report.simplified_implied = report.fano.exact >= report.fano.simplified;
  if (cfg.distortion) {
    report.distortion = fano_lower_bound_distortion(cfg.p, cfg.c, cfg.alpha, *cfg.distortion);
    if (!report.distortion->informative)
      report.notes.emplace_back("distortion ratio beta >= c/p: the distortion bound is vacuous");
  }
  report.typical = typical_set_bounds(cfg.p, cfg.c, cfg.epsilon);
  report.rate = rate_function(cfg.c, cfg.epsilon);
  report.atypical_probability = atypical_probability_bound(cfg.p, cfg.c, cfg.epsilon);
  report.notes.emplace_back("bounds are formula evaluations; the converse is only established for p large enough");
  if (!report.simplified_implied)
    report.notes.emplace_back("the simplified bound exceeds the exact bound here, so it is not implied by it");
  return report;
}

/// Smallest integer sample count meeting a real-valued bound.
inline std::uint64_t required_samples(double bound) {
  return bound <= 0.0 ? 0 : static_cast<std::uint64_t>(std::ceil(bound));
}

}  // namespace ggm
