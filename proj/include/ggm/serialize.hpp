#pragma once

// JSON encodings of configurations and reports. Kept apart from the
// numerical headers so that only the CLI and tests pull in nlohmann/json.

#include <nlohmann/json.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "ggm/bounds.hpp"
#include "ggm/error.hpp"
#include "ggm/estimator.hpp"
#include "ggm/graph.hpp"
#include "ggm/harness.hpp"
#include "ggm/lbp.hpp"
#include "ggm/model.hpp"

namespace ggm {

using Json = nlohmann::json;

/// Non-finite doubles become null.
inline Json real_json(double value) { return std::isfinite(value) ? Json(value) : Json(nullptr); }

inline Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(real_json(v(k)));
  return out;
}

inline Json edges_json(const Graph& g) {
  Json out = Json::array();
  for (const auto& e : g.edges()) out.push_back({e.u, e.v});
  return out;
}

// ---------------------------------------------------------------------------
// Configurations

inline EnsembleKind ensemble_kind_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "erdos_renyi") return ErdosRenyi{j.at("c").get<double>()};
  if (kind == "random_regular") return RandomRegular{j.at("degree").get<std::size_t>()};
  if (kind == "small_world") return SmallWorld{j.value("dim", std::size_t{2}), j.value("c", 0.0)};
  if (kind == "explicit") return Explicit{j.at("path").get<std::string>()};
  if (kind == "chain") return Chain{};
  if (kind == "cycle") return Cycle{};
  throw Error(ErrorKind::invalid_parameter, "unknown ensemble kind '" + kind + "'");
}

inline EnsembleConfig ensemble_from_json(const Json& j) {
  EnsembleConfig cfg;
  cfg.kind = ensemble_kind_from_json(j);
  if (const auto* expl = std::get_if<Explicit>(&cfg.kind); expl && !j.contains("p")) {
    cfg.p = read_edge_list_file(expl->path).p();
  } else {
    cfg.p = j.at("p").get<std::size_t>();
  }
  cfg.seed = j.value("seed", std::uint64_t{0});
  return cfg;
}

inline Json ensemble_json(const EnsembleConfig& cfg) {
  Json j{{"p", cfg.p}, {"seed", cfg.seed}};
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, ErdosRenyi>) {
          j["kind"] = "erdos_renyi";
          j["c"] = k.c;
        } else if constexpr (std::is_same_v<K, RandomRegular>) {
          j["kind"] = "random_regular";
          j["degree"] = k.degree;
        } else if constexpr (std::is_same_v<K, SmallWorld>) {
          j["kind"] = "small_world";
          j["dim"] = k.dim;
          j["c"] = k.c;
          j["grid"] = "toroidal";
        } else if constexpr (std::is_same_v<K, Explicit>) {
          j["kind"] = "explicit";
          j["path"] = k.path;
        } else if constexpr (std::is_same_v<K, Chain>) {
          j["kind"] = "chain";
        } else {
          j["kind"] = "cycle";
        }
      },
      cfg.kind);
  return j;
}

inline SignPattern sign_from_json(const Json& j) {
  const std::string sign = j.value("sign", std::string("attractive"));
  if (sign == "attractive") return Attractive{};
  if (sign == "alternating") return Alternating{};
  if (sign == "random") return RandomSigns{j.value("sign_seed", std::uint64_t{0})};
  throw Error(ErrorKind::invalid_parameter, "unknown sign pattern '" + sign + "'");
}

inline std::string sign_name(const SignPattern& s) {
  if (std::holds_alternative<Attractive>(s)) return "attractive";
  if (std::holds_alternative<Alternating>(s)) return "alternating";
  return "random";
}

inline ModelSpec model_spec_from_json(const Json& j) {
  ModelSpec spec;
  spec.target_alpha = j.value("target_alpha", spec.target_alpha);
  spec.sign = sign_from_json(j);
  spec.diagonal = j.value("diagonal", spec.diagonal);
  return spec;
}

inline Json model_spec_json(const ModelSpec& spec) {
  Json j{{"target_alpha", spec.target_alpha}, {"sign", sign_name(spec.sign)}, {"diagonal", spec.diagonal}};
  if (const auto* r = std::get_if<RandomSigns>(&spec.sign)) j["sign_seed"] = r->seed;
  return j;
}

inline Statistic statistic_from_string(const std::string& s) {
  if (s == "covariance") return Statistic::covariance;
  if (s == "mutual_information" || s == "mi") return Statistic::mutual_information;
  throw Error(ErrorKind::invalid_parameter, "unknown statistic '" + s + "'");
}

inline ThresholdRule threshold_from_json(const Json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "oracle") return OracleThreshold{};
    throw Error(ErrorKind::invalid_parameter, "unknown threshold rule '" + j.get<std::string>() + "'");
  }
  if (j.contains("xi")) return FixedThreshold{j.at("xi").get<double>()};
  return KappaThreshold{j.value("kappa", 2.0)};
}

inline Json threshold_json(const ThresholdRule& rule) {
  if (const auto* f = std::get_if<FixedThreshold>(&rule)) return {{"xi", f->xi}};
  if (const auto* k = std::get_if<KappaThreshold>(&rule)) return {{"kappa", k->kappa}};
  return "oracle";
}

inline EstimatorSpec estimator_spec_from_json(const Json& j) {
  EstimatorSpec spec;
  spec.eta = j.value("eta", spec.eta);
  if (j.contains("threshold")) spec.threshold = threshold_from_json(j.at("threshold"));
  else if (j.contains("xi")) spec.threshold = FixedThreshold{j.at("xi").get<double>()};
  else if (j.contains("kappa")) spec.threshold = KappaThreshold{j.at("kappa").get<double>()};
  spec.statistic = statistic_from_string(j.value("statistic", std::string("covariance")));
  spec.exact_mode = j.value("exact_mode", false);
  spec.gamma = j.value("gamma", std::size_t{0});
  spec.early_exit = j.value("early_exit", false);
  return spec;
}

inline Json estimator_spec_json(const EstimatorSpec& spec) {
  return {{"eta", spec.eta},
          {"threshold", threshold_json(spec.threshold)},
          {"statistic", std::string(to_string(spec.statistic))},
          {"exact_mode", spec.exact_mode},
          {"gamma", spec.gamma},
          {"early_exit", spec.early_exit}};
}

inline TrialConfig trial_config_from_json(const Json& j) {
  TrialConfig cfg;
  cfg.ensemble = ensemble_from_json(j.at("ensemble"));
  if (j.contains("model")) cfg.model = model_spec_from_json(j.at("model"));
  if (j.contains("estimator")) cfg.estimator = estimator_spec_from_json(j.at("estimator"));
  cfg.n = j.value("n", cfg.n);
  cfg.trials = j.value("trials", cfg.trials);
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("distortion")) cfg.distortion = j.at("distortion").get<std::size_t>();
  return cfg;
}

inline Json trial_config_json(const TrialConfig& cfg) {
  Json j{{"ensemble", ensemble_json(cfg.ensemble)},
         {"model", model_spec_json(cfg.model)},
         {"estimator", estimator_spec_json(cfg.estimator)},
         {"n", cfg.n},
         {"trials", cfg.trials},
         {"seed", cfg.seed}};
  if (cfg.distortion) j["distortion"] = *cfg.distortion;
  return j;
}

inline BoundsConfig bounds_config_from_json(const Json& j) {
  BoundsConfig cfg;
  cfg.p = j.at("p").get<double>();
  cfg.c = j.at("c").get<double>();
  cfg.alpha = j.at("alpha").get<double>();
  if (j.contains("D")) cfg.distortion = j.at("D").get<double>();
  cfg.epsilon = j.value("epsilon", cfg.epsilon);
  return cfg;
}

// ---------------------------------------------------------------------------
// Reports

inline Json assumption_report_json(const AssumptionReport& r) {
  Json overlaps = Json::array();
  for (const auto& o : r.overlaps) overlaps.push_back({{"edge", {o.edge.u, o.edge.v}}, {"K", o.k}});
  return {{"alpha", r.alpha},           {"alpha_pass", r.alpha_pass}, {"d_min", r.d_min},
          {"j_min", r.j_min},           {"decay_ratio", real_json(r.decay_ratio)},
          {"eta", r.eta},               {"gamma", r.gamma},           {"delta", r.delta},
          {"overlap_margin", real_json(r.overlap_margin)}, {"overlap_pass", r.overlap_pass}, {"overlap_waived", r.overlap_waived},
          {"attractive", r.attractive}, {"K", overlaps},              {"notes", r.notes}};
}

inline Json estimation_json(const EstimationResult& r) {
  Json pairs = Json::array();
  for (const auto& pr : r.pairs) {
    pairs.push_back({{"i", pr.pair.u},
                     {"j", pr.pair.v},
                     {"statistic", pr.stat.status == PairStatus::ok ? real_json(pr.stat.value) : Json(nullptr)},
                     {"argmin", pr.stat.argmin},
                     {"status", pr.stat.status == PairStatus::ok ? "ok" : "estimation-failure"},
                     {"skipped_subsets", pr.stat.skipped}});
  }
  Json config{{"eta", r.config.eta},
              {"xi", r.config.xi},
              {"statistic", std::string(to_string(r.config.statistic))},
              {"exact_mode", r.exact_mode},
              {"early_exit", r.config.early_exit},
              {"max_condition", r.config.max_condition}};
  if (r.n) config["n"] = *r.n;
  return {{"p", r.graph_hat.p()},
          {"edges", edges_json(r.graph_hat)},
          {"threshold", r.threshold},
          {"failed_pairs", r.failed_pairs()},
          {"pairs", pairs},
          {"config", config},
          {"wall_seconds", r.wall_seconds}};
}

inline Json lbp_json(const LbpResult& r, const std::optional<VarianceError>& error = std::nullopt) {
  Json j{{"variances", vector_json(r.variances)},
         {"means", vector_json(r.means)},
         {"converged", r.converged},
         {"breakdown", r.breakdown},
         {"iterations", r.iterations},
         {"max_change", real_json(r.max_change)},
         {"diagnostic", r.diagnostic}};
  if (error) {
    j["variance_error"] = vector_json(error->per_node);
    j["max_variance_error"] = error->max;
  }
  return j;
}

inline Json bounds_report_json(const BoundsReport& r) {
  Json j{{"config", {{"p", r.config.p}, {"c", r.config.c}, {"alpha", r.config.alpha}, {"epsilon", r.config.epsilon}}},
         {"n_exact", r.fano.exact},
         {"n_simplified", r.fano.simplified},
         {"n_exact_ceil", required_samples(r.fano.exact)},
         {"n_simplified_ceil", required_samples(r.fano.simplified)},
         {"simplified_implied", r.simplified_implied},
         {"typical_log2_card_bounds", {real_json(r.typical.log2_card_lower), r.typical.log2_card_upper}},
         {"typical_log2_prob_bounds", {r.typical.log2_prob_lower, r.typical.log2_prob_upper}},
         {"rate", r.rate},
         {"atypical_prob_bound", r.atypical_probability},
         {"notes", r.notes}};
  if (r.config.distortion) j["config"]["D"] = *r.config.distortion;
  if (r.distortion) {
    j["n_distortion"] = r.distortion->value;
    j["beta"] = r.distortion->beta;
    j["distortion_informative"] = r.distortion->informative;
  }
  return j;
}

inline Json sweep_row_json(const SweepRow& r) {
  Json j{{"p", r.p},
         {"c_or_delta", r.c_or_delta},
         {"alpha", r.alpha},
         {"j_min", r.j_min},
         {"n", r.n},
         {"eta", r.eta},
         {"statistic", std::string(to_string(r.statistic))},
         {"trials", r.trials},
         {"pe_hat", r.pe_hat},
         {"mean_edit_distance", r.mean_edit_distance},
         {"failed_trials", r.failed_trials},
         {"mean_runtime_s", r.mean_runtime_s}};
  if (r.n_fano_exact) j["n_fano_exact"] = *r.n_fano_exact;
  if (r.n_fano_simplified) j["n_fano_simplified"] = *r.n_fano_simplified;
  return j;
}

}  // namespace ggm
