#pragma once

// End-to-end experiments: generate a graph, synthesize a model on it, draw
// samples, learn the structure back and score it; repeated over trials and
// swept over parameter grids.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "ggm/bounds.hpp"
#include "ggm/error.hpp"
#include "ggm/estimator.hpp"
#include "ggm/graph.hpp"
#include "ggm/model.hpp"
#include "ggm/parallel.hpp"
#include "ggm/rng.hpp"
#include "ggm/sampler.hpp"

namespace ggm {

struct ModelSpec {
  double target_alpha = 0.5;
  SignPattern sign = Attractive{};
  double diagonal = 1.0;
};

struct FixedThreshold { double xi = 0.0; };
struct KappaThreshold { double kappa = 2.0; };
struct OracleThreshold {};  // midpoint of the oracle gap of the true model
using ThresholdRule = std::variant<FixedThreshold, KappaThreshold, OracleThreshold>;

struct EstimatorSpec {
  std::size_t eta = 1;
  ThresholdRule threshold = KappaThreshold{};
  Statistic statistic = Statistic::covariance;
  bool exact_mode = false;
  std::size_t gamma = 0;  // path threshold for oracle separators; 0 means p
  bool early_exit = false;
};

struct TrialConfig {
  EnsembleConfig ensemble;
  ModelSpec model;
  EstimatorSpec estimator;
  std::size_t n = 100;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::optional<std::size_t> distortion;  // error iff edit distance > D
  unsigned threads = 0;
};

/// Stream ids for per-trial sub-seeds derived from master ^ trial index.
enum class Stream : std::uint64_t { graph = 0, signs = 1, samples = 2 };

inline std::uint64_t trial_seed(std::uint64_t master, std::size_t index) { return master ^ static_cast<std::uint64_t>(index); }

struct TrialRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  Graph truth;
  Graph estimate;
  double alpha = 0.0;
  double j_min = 0.0;
  bool walk_summable = false;
  double threshold = 0.0;
  std::size_t edit_distance = 0;
  bool recovered = false;  // edit distance <= D (D = 0 by default)
  std::size_t failed_pairs = 0;
  double runtime_s = 0.0;
  std::optional<EstimationResult> detail;
};

inline double resolve_threshold(const EstimatorSpec& spec, const GaussianModel& m, std::optional<std::size_t> n) {
  if (const auto* fixed = std::get_if<FixedThreshold>(&spec.threshold)) return fixed->xi;
  if (const auto* kappa = std::get_if<KappaThreshold>(&spec.threshold)) {
    if (!n) throw Error(ErrorKind::invalid_parameter, "the kappa threshold rule needs a sample count");
    return default_threshold(static_cast<double>(*n), static_cast<double>(m.p()), kappa->kappa);
  }
  const std::size_t gamma = spec.gamma == 0 ? m.p() : spec.gamma;
  return oracle_threshold(oracle_gap(m, spec.eta, gamma, 1));
}

/// One trial end to end. Failures are recorded in the returned record.
inline TrialRecord run_single_trial(const TrialConfig& cfg, std::size_t index, bool keep_detail = false) {
  TrialRecord rec;
  rec.index = index;
  rec.seed = trial_seed(cfg.seed, index);
  const auto start = std::chrono::steady_clock::now();
  try {
    EnsembleConfig ensemble = cfg.ensemble;
    ensemble.seed = derive_seed(rec.seed, static_cast<std::uint64_t>(Stream::graph));
    rec.truth = generate(ensemble);

    SignPattern sign = cfg.model.sign;
    if (auto* random = std::get_if<RandomSigns>(&sign))
      random->seed = derive_seed(rec.seed ^ random->seed, static_cast<std::uint64_t>(Stream::signs));
    const GaussianModel model = synthesize_model(rec.truth, cfg.model.target_alpha, sign, cfg.model.diagonal);
    rec.alpha = model.alpha();
    rec.j_min = model.j_min();
    rec.walk_summable = model.walk_summable();

    CovarianceInput input = cfg.estimator.exact_mode
                                ? CovarianceInput::exact(model.sigma())
                                : CovarianceInput::from_samples(
                                      sample(model, cfg.n, derive_seed(rec.seed, static_cast<std::uint64_t>(Stream::samples))));
    EstimatorConfig est;
    est.eta = cfg.estimator.eta;
    est.statistic = cfg.estimator.statistic;
    est.early_exit = cfg.estimator.early_exit;
    est.threads = 1;
    est.xi = resolve_threshold(cfg.estimator, model, input.n);
    rec.threshold = est.xi;

    EstimationResult result = estimate_structure(input, est);
    rec.estimate = result.graph_hat;
    rec.failed_pairs = result.failed_pairs();
    rec.edit_distance = edit_distance(rec.truth, rec.estimate);
    rec.recovered = rec.edit_distance <= cfg.distortion.value_or(0);
    if (keep_detail) rec.detail = std::move(result);
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  rec.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

/// All trials of a configuration; trial k uses seed master ^ k.
inline std::vector<TrialRecord> run_trial(const TrialConfig& cfg, bool keep_detail = false) {
  if (cfg.trials < 1) throw Error(ErrorKind::invalid_parameter, "trials must be >= 1");
  std::vector<TrialRecord> records(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](std::size_t k) { records[k] = run_single_trial(cfg, k, keep_detail); });
  return records;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepRow {
  std::size_t p = 0;
  double c_or_delta = 0.0;
  double alpha = 0.0;
  double j_min = 0.0;  // mean over successful trials
  std::size_t n = 0;
  std::size_t eta = 0;
  Statistic statistic = Statistic::covariance;
  std::size_t trials = 0;
  double pe_hat = 0.0;  // fraction of trials with edit distance > D (failed trials count as errors)
  double mean_edit_distance = 0.0;
  std::size_t failed_trials = 0;
  double mean_runtime_s = 0.0;
  std::optional<double> n_fano_exact;
  std::optional<double> n_fano_simplified;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // one per grid point, in grid order
};

inline double ensemble_parameter(const EnsembleKind& kind) {
  if (const auto* er = std::get_if<ErdosRenyi>(&kind)) return er->c;
  if (const auto* reg = std::get_if<RandomRegular>(&kind)) return static_cast<double>(reg->degree);
  if (const auto* sw = std::get_if<SmallWorld>(&kind)) return sw->c;
  return 0.0;
}

inline SweepRow summarize(const TrialConfig& cfg, const std::vector<TrialRecord>& records, bool with_bounds) {
  SweepRow row;
  row.p = cfg.ensemble.p;
  row.c_or_delta = ensemble_parameter(cfg.ensemble.kind);
  row.alpha = cfg.model.target_alpha;
  row.n = cfg.estimator.exact_mode ? 0 : cfg.n;
  row.eta = cfg.estimator.eta;
  row.statistic = cfg.estimator.statistic;
  row.trials = records.size();
  std::size_t errors = 0, ok = 0;
  double edit_sum = 0.0, jmin_sum = 0.0, runtime_sum = 0.0, degree_sum = 0.0;
  for (const auto& r : records) {
    runtime_sum += r.runtime_s;
    if (!r.ok) {
      ++row.failed_trials;
      ++errors;
      continue;
    }
    ++ok;
    edit_sum += static_cast<double>(r.edit_distance);
    jmin_sum += r.j_min;
    degree_sum += 2.0 * static_cast<double>(r.truth.edge_count()) / static_cast<double>(r.truth.p());
    if (!r.recovered) ++errors;
  }
  row.pe_hat = records.empty() ? 0.0 : static_cast<double>(errors) / static_cast<double>(records.size());
  row.mean_edit_distance = ok ? edit_sum / static_cast<double>(ok) : 0.0;
  row.j_min = ok ? jmin_sum / static_cast<double>(ok) : 0.0;
  row.mean_runtime_s = records.empty() ? 0.0 : runtime_sum / static_cast<double>(records.size());
  if (with_bounds && ok) {
    // Random-graph ensembles overlay their own mean degree; fixed graphs the observed one.
    double c = row.c_or_delta;
    if (std::holds_alternative<Chain>(cfg.ensemble.kind) || std::holds_alternative<Cycle>(cfg.ensemble.kind) ||
        std::holds_alternative<Explicit>(cfg.ensemble.kind) || std::holds_alternative<SmallWorld>(cfg.ensemble.kind))
      c = degree_sum / static_cast<double>(ok);
    const double p = static_cast<double>(row.p);
    if (c > 0.0 && c < p && row.alpha > 0.0 && row.alpha < 1.0) {
      const auto bound = fano_lower_bound(p, c, row.alpha);
      row.n_fano_exact = bound.exact;
      row.n_fano_simplified = bound.simplified;
    }
  }
  return row;
}

inline SweepResult sweep(const std::vector<TrialConfig>& grid, bool with_bounds = true) {
  if (grid.empty()) throw Error(ErrorKind::invalid_parameter, "sweep grid is empty");
  SweepResult out;
  out.rows.reserve(grid.size());
  for (const auto& cfg : grid) out.rows.push_back(summarize(cfg, run_trial(cfg), with_bounds));
  return out;
}

/// Smallest n in the sweep whose row reaches pe_hat <= target, if any.
inline std::optional<std::size_t> smallest_n_meeting(const SweepResult& result, double target) {
  std::optional<std::size_t> best;
  for (const auto& row : result.rows)
    if (row.pe_hat <= target && (!best || row.n < *best)) best = row.n;
  return best;
}

inline constexpr const char* kSweepCsvHeader =
    "p,c_or_delta,alpha,j_min,n,eta,statistic,trials,pe_hat,mean_edit_distance,failed_trials,mean_runtime_s,"
    "n_fano_exact,n_fano_simplified";

inline std::string format_real(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

/// Writes the sweep as CSV. With `timing` off the runtime column is left
/// empty so that reruns are byte-identical.
inline void write_sweep_csv(std::ostream& out, const SweepResult& result, bool timing = true) {
  out << kSweepCsvHeader << '\n';
  for (const auto& r : result.rows) {
    out << r.p << ',' << format_real(r.c_or_delta) << ',' << format_real(r.alpha) << ',' << format_real(r.j_min) << ','
        << r.n << ',' << r.eta << ',' << to_string(r.statistic) << ',' << r.trials << ',' << format_real(r.pe_hat) << ','
        << format_real(r.mean_edit_distance) << ',' << r.failed_trials << ','
        << (timing ? format_real(r.mean_runtime_s) : std::string()) << ','
        << (r.n_fano_exact ? format_real(*r.n_fano_exact) : std::string()) << ','
        << (r.n_fano_simplified ? format_real(*r.n_fano_simplified) : std::string()) << '\n';
  }
}

}  // namespace ggm
