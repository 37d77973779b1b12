// ggm: command-line front end. Every subcommand reads a JSON config, writes
// its outputs into the --out directory and records a manifest.json there.

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ggm/ggm.hpp"
#include "ggm/hash.hpp"
#include "ggm/serialize.hpp"

#ifndef GGM_VERSION
#define GGM_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace ggm;

namespace {

struct Options {
  std::string config_path;
  std::string out = "run";
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::string format = "csv";
};

struct Run {
  std::string command;
  Options options;
  Json config;
  Json seeds = Json::object();
  std::vector<std::string> outputs;

  fs::path path(const std::string& name) {
    outputs.push_back(name);
    return fs::path(options.out) / name;
  }

  std::uint64_t master_seed() const {
    return options.seed ? *options.seed : config.value("seed", std::uint64_t{0});
  }
};

Json load_config(const std::string& path) {
  if (path.empty()) return Json::object();
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot open config " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::io_error, "config " + path + ": " + e.what());
  }
}

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io_error, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

/// Relative paths in a config resolve against the config file's directory.
std::string resolve(const Run& run, const std::string& path) {
  if (path.empty() || fs::path(path).is_absolute() || run.options.config_path.empty()) return path;
  return (fs::path(run.options.config_path).parent_path() / path).string();
}

GaussianModel load_model(const Run& run, const Json& j) {
  std::string graph_path, precision_path;
  if (j.contains("dir")) {
    graph_path = (fs::path(resolve(run, j.at("dir").get<std::string>())) / "graph.txt").string();
    precision_path = (fs::path(resolve(run, j.at("dir").get<std::string>())) / "J.csv").string();
  } else {
    graph_path = resolve(run, j.at("graph").get<std::string>());
    precision_path = resolve(run, j.at("precision").get<std::string>());
  }
  return GaussianModel(read_edge_list_file(graph_path), read_matrix_csv_file(precision_path));
}

// ---------------------------------------------------------------------------

void cmd_generate(Run& run) {
  EnsembleConfig cfg = ensemble_from_json(run.config.at("ensemble"));
  if (const auto* expl = std::get_if<Explicit>(&cfg.kind)) cfg.kind = Explicit{resolve(run, expl->path)};
  cfg.seed = run.master_seed();
  run.seeds["graph"] = cfg.seed;
  const Graph g = generate(cfg);
  write_edge_list_file(run.path("graph.txt").string(), g);
  const auto girth_value = girth(g);
  write_json(run.path("graph.json"), {{"ensemble", ensemble_json(cfg)},
                                      {"p", g.p()},
                                      {"edges", g.edge_count()},
                                      {"max_degree", g.max_degree()},
                                      {"girth", girth_value ? Json(*girth_value) : Json(nullptr)}});
}

void cmd_synthesize(Run& run) {
  const std::uint64_t seed = run.master_seed();
  Graph g;
  Json source;
  if (run.config.contains("graph")) {
    const std::string path = resolve(run, run.config.at("graph").get<std::string>());
    g = read_edge_list_file(path);
    source = path;
  } else {
    EnsembleConfig ensemble = ensemble_from_json(run.config.at("ensemble"));
    ensemble.seed = derive_seed(seed, static_cast<std::uint64_t>(Stream::graph));
    run.seeds["graph"] = ensemble.seed;
    g = generate(ensemble);
    source = ensemble_json(ensemble);
  }
  ModelSpec spec = model_spec_from_json(run.config.value("model", Json::object()));
  if (auto* random = std::get_if<RandomSigns>(&spec.sign); random && !run.config.value("model", Json::object()).contains("sign_seed")) {
    random->seed = derive_seed(seed, static_cast<std::uint64_t>(Stream::signs));
    run.seeds["signs"] = random->seed;
  }
  const GaussianModel m = synthesize_model(g, spec.target_alpha, spec.sign, spec.diagonal);
  const std::size_t gamma = run.config.value("gamma", g.p());
  const std::size_t eta = run.config.value("eta", separation_profile(g, gamma).eta);
  const auto report = check_assumptions(m, eta, gamma, run.config.value("delta", 0.1));

  write_edge_list_file(run.path("graph.txt").string(), g);
  write_matrix_csv_file(run.path("J.csv").string(), m.J());
  write_json(run.path("model.json"), {{"alpha", m.alpha()},
                                      {"seed", seed},
                                      {"synthesis", model_spec_json(spec)},
                                      {"graph", source},
                                      {"model_id", model_fingerprint(m.J())},
                                      {"p", m.p()},
                                      {"j_min", m.j_min()},
                                      {"j_max", m.j_max()},
                                      {"assumptions", assumption_report_json(report)}});
}

void cmd_sample(Run& run) {
  const GaussianModel m = load_model(run, run.config.at("model"));
  const std::size_t n = run.config.at("n").get<std::size_t>();
  const std::uint64_t seed = run.master_seed();
  run.seeds["samples"] = seed;
  const SampleSet s = sample(m, n, seed);
  if (run.options.format == "json") {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < s.data.rows(); ++r) rows.push_back(vector_json(s.data.row(r).transpose()));
    write_json(run.path("samples_data.json"), rows);
  } else {
    write_matrix_csv_file(run.path("samples.csv").string(), s.data);
  }
  write_json(run.path("samples.json"), {{"seed", seed}, {"model_id", s.model_id}, {"n", s.n()}, {"p", s.p()}});
}

void cmd_learn(Run& run) {
  const Json& c = run.config;
  std::optional<GaussianModel> model;
  if (c.contains("model")) model = load_model(run, c.at("model"));

  CovarianceInput input;
  if (c.contains("samples")) {
    const Matrix data = read_matrix_csv_file(resolve(run, c.at("samples").get<std::string>()));
    input = {empirical_covariance(data, c.value("center", false)), static_cast<std::size_t>(data.rows())};
  } else if (c.contains("covariance")) {
    input.sigma = read_matrix_csv_file(resolve(run, c.at("covariance").get<std::string>()));
    if (c.contains("n")) input.n = c.at("n").get<std::size_t>();
  } else if (model) {
    input = CovarianceInput::exact(model->sigma());
  } else {
    throw Error(ErrorKind::invalid_parameter, "learn needs 'samples', 'covariance' or 'model'");
  }

  const EstimatorSpec spec = estimator_spec_from_json(c.value("estimator", Json::object()));
  EstimatorConfig cfg;
  cfg.eta = spec.eta;
  cfg.statistic = spec.statistic;
  cfg.early_exit = spec.early_exit;
  cfg.threads = run.options.threads;
  if (std::holds_alternative<OracleThreshold>(spec.threshold) && !model)
    throw Error(ErrorKind::invalid_parameter, "the oracle threshold needs the true 'model'");
  if (model) {
    cfg.xi = resolve_threshold(spec, *model, input.n);
  } else if (const auto* fixed = std::get_if<FixedThreshold>(&spec.threshold)) {
    cfg.xi = fixed->xi;
  } else {
    if (!input.n) throw Error(ErrorKind::invalid_parameter, "the kappa threshold rule needs a sample count");
    cfg.xi = default_threshold(static_cast<double>(*input.n), static_cast<double>(input.p()),
                               std::get<KappaThreshold>(spec.threshold).kappa);
  }

  const EstimationResult result = estimate_structure(input, cfg);
  Json out = estimation_json(result);
  out["config"]["xi"] = cfg.xi;
  if (model) out["edit_distance"] = edit_distance(model->graph(), result.graph_hat);
  if (run.options.format == "csv") {
    std::ofstream pairs(run.path("pairs.csv"));
    pairs << "i,j,statistic,argmin,status,skipped_subsets\n";
    for (const auto& pr : result.pairs) {
      std::string argmin;
      for (std::size_t k = 0; k < pr.stat.argmin.size(); ++k) argmin += (k ? " " : "") + std::to_string(pr.stat.argmin[k]);
      pairs << pr.pair.u << ',' << pr.pair.v << ','
            << (pr.stat.status == PairStatus::ok ? format_real(pr.stat.value) : std::string()) << ',' << argmin << ','
            << (pr.stat.status == PairStatus::ok ? "ok" : "estimation-failure") << ',' << pr.stat.skipped << '\n';
    }
  }
  write_json(run.path("estimate.json"), out);
  write_edge_list_file(run.path("graph_hat.txt").string(), result.graph_hat);
}

void cmd_lbp(Run& run) {
  const GaussianModel m = load_model(run, run.config.at("model"));
  Vector h = Vector::Zero(static_cast<Eigen::Index>(m.p()));
  if (run.config.contains("h")) {
    const auto values = run.config.at("h").get<std::vector<double>>();
    if (values.size() != m.p()) throw Error(ErrorKind::invalid_argument, "h has the wrong length");
    for (std::size_t k = 0; k < values.size(); ++k) h(static_cast<Eigen::Index>(k)) = values[k];
  } else if (run.config.value("random_h", false)) {
    const std::uint64_t seed = run.master_seed();
    run.seeds["h"] = seed;
    Rng rng(seed);
    for (Eigen::Index k = 0; k < h.size(); ++k) h(k) = rng.normal();
  }
  const LbpResult r = lbp_run(m, h, run.config.value("max_iters", std::size_t{10000}), run.config.value("tol", 1e-10));
  std::optional<VarianceError> error;
  Json exact_means;
  if (!r.breakdown && run.config.value("compare_exact", true)) {
    error = lbp_variance_error(m, r);
    exact_means = vector_json(m.sigma() * h);
  }
  Json out = lbp_json(r, error);
  out["alpha"] = m.alpha();
  out["walk_summable"] = m.walk_summable();
  out["iteration_cap"] = m.walk_summable() && m.alpha() > 0.0 ? Json(walk_summable_iteration_cap(m.alpha(), run.config.value("tol", 1e-10))) : Json(nullptr);
  if (!exact_means.is_null()) out["exact_means"] = exact_means;
  write_json(run.path("lbp.json"), out);
  if (run.options.format == "csv" && !r.breakdown) {
    std::ofstream table(run.path("lbp.csv"));
    table << "node,variance,mean" << (error ? ",variance_error" : "") << '\n';
    for (Eigen::Index k = 0; k < r.variances.size(); ++k) {
      table << k << ',' << format_real(r.variances(k)) << ',' << format_real(r.means(k));
      if (error) table << ',' << format_real(error->per_node(k));
      table << '\n';
    }
  }
}

void cmd_bounds(Run& run) {
  const Json& c = run.config;
  if (c.contains("p")) write_json(run.path("bounds.json"), bounds_report_json(evaluate_bounds(bounds_config_from_json(c))));
  if (!c.contains("grid")) return;

  const Json& grid = c.at("grid");
  auto axis = [&](const char* key, double fallback) {
    if (grid.contains(key)) return grid.at(key).get<std::vector<double>>();
    if (c.contains(key)) return std::vector<double>{c.at(key).get<double>()};
    return std::vector<double>{fallback};
  };
  const auto ps = axis("p", 100), cs = axis("c", 2), alphas = axis("alpha", 0.5);
  Json rows = Json::array();
  for (double p : ps)
    for (double cc : cs)
      for (double alpha : alphas) {
        BoundsConfig cfg{p, cc, alpha, std::nullopt, c.value("epsilon", 0.1)};
        if (c.contains("D")) cfg.distortion = c.at("D").get<double>();
        const auto report = evaluate_bounds(cfg);
        Json row{{"p", p}, {"c", cc}, {"alpha", alpha}, {"n_exact", report.fano.exact}, {"n_simplified", report.fano.simplified}};
        row["n_distortion"] = report.distortion ? Json(report.distortion->value) : Json(nullptr);
        rows.push_back(row);
      }
  if (run.options.format == "json") {
    write_json(run.path("bounds_grid.json"), rows);
    return;
  }
  std::ofstream out(run.path("bounds_grid.csv"));
  out << "p,c,alpha,n_exact,n_simplified,n_distortion\n";
  for (const auto& row : rows) {
    out << format_real(row["p"]) << ',' << format_real(row["c"]) << ',' << format_real(row["alpha"]) << ','
        << format_real(row["n_exact"]) << ',' << format_real(row["n_simplified"]) << ','
        << (row["n_distortion"].is_null() ? std::string() : format_real(row["n_distortion"])) << '\n';
  }
}

/// Expands {"base": TrialConfig, "grid": {axis: [values]}} into the
/// cartesian product, axes varying in the order p, c, alpha, eta, statistic,
/// n (n fastest). An explicit "points" array is taken as is.
std::vector<TrialConfig> expand_grid(const Run& run) {
  const Json& c = run.config;
  std::vector<TrialConfig> out;
  if (c.contains("points")) {
    for (const auto& point : c.at("points")) out.push_back(trial_config_from_json(point));
  } else {
    std::vector<Json> points{c.at("base")};
    const Json grid = c.value("grid", Json::object());
    const std::vector<std::pair<std::string, std::vector<std::string>>> axes{
        {"p", {"ensemble", "p"}},         {"c", {"ensemble", "c"}}, {"alpha", {"model", "target_alpha"}},
        {"eta", {"estimator", "eta"}}, {"statistic", {"estimator", "statistic"}}, {"n", {"n"}}};
    for (const auto& [name, where] : axes) {
      if (!grid.contains(name)) continue;
      std::vector<Json> next;
      for (const auto& point : points)
        for (const auto& value : grid.at(name)) {
          Json copy = point;
          Json* slot = &copy;
          for (std::size_t k = 0; k + 1 < where.size(); ++k) slot = &(*slot)[where[k]];
          (*slot)[where.back()] = value;
          next.push_back(std::move(copy));
        }
      points = std::move(next);
    }
    for (const auto& point : points) out.push_back(trial_config_from_json(point));
  }
  const std::uint64_t seed = run.master_seed();
  for (auto& cfg : out) {
    if (run.options.seed || !c.contains("points")) cfg.seed = seed;
    cfg.threads = run.options.threads;
    for (auto& kind : {&cfg.ensemble.kind})
      if (auto* expl = std::get_if<Explicit>(kind)) expl->path = resolve(run, expl->path);
  }
  return out;
}

void cmd_sweep(Run& run) {
  const auto grid = expand_grid(run);
  run.seeds["master"] = run.master_seed();
  run.seeds["per_trial"] = "master xor trial index";
  const auto result = sweep(grid, run.config.value("with_bounds", true));
  if (run.options.format == "json") {
    Json rows = Json::array();
    for (const auto& row : result.rows) rows.push_back(sweep_row_json(row));
    write_json(run.path("sweep.json"), rows);
  } else {
    std::ofstream out(run.path("sweep.csv"));
    write_sweep_csv(out, result, run.config.value("timing", true));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian graphical model structure learning toolkit"};
  app.set_version_flag("--version", std::string(GGM_VERSION));
  app.require_subcommand(1);

  Options options;
  std::string seed_text;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", options.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", options.out, "output directory")->capture_default_str();
    sub->add_option("--seed", seed_text, "master seed (u64), overrides the config");
    sub->add_option("--threads", options.threads, "worker threads, 0 = all cores")->capture_default_str();
    sub->add_option("--format", options.format, "table format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  };

  const std::vector<std::pair<std::string, std::string>> commands{
      {"generate", "draw a graph from an ensemble"},
      {"synthesize", "build a walk-summable precision matrix on a graph"},
      {"sample", "draw Gaussian samples from a model"},
      {"learn", "estimate the graph by conditional covariance thresholding"},
      {"lbp", "run Gaussian belief propagation"},
      {"bounds", "evaluate sample-complexity lower bounds"},
      {"sweep", "run Monte Carlo trials over a parameter grid"}};
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help));

  CLI11_PARSE(app, argc, argv);

  Run run;
  run.command = app.get_subcommands().front()->get_name();
  try {
    if (!seed_text.empty()) {
      std::size_t used = 0;
      const unsigned long long value = std::stoull(seed_text, &used, 0);
      if (used != seed_text.size()) throw std::invalid_argument(seed_text);
      options.seed = value;
    }
  } catch (const std::exception&) {
    std::cerr << "error: --seed must be an unsigned 64-bit integer\n";
    return 2;
  }
  run.options = options;

  const auto start = std::chrono::steady_clock::now();
  try {
    run.config = load_config(options.config_path);
    if (options.seed) run.config["seed"] = *options.seed;
    fs::create_directories(options.out);
    if (run.command == "generate") cmd_generate(run);
    else if (run.command == "synthesize") cmd_synthesize(run);
    else if (run.command == "sample") cmd_sample(run);
    else if (run.command == "learn") cmd_learn(run);
    else if (run.command == "lbp") cmd_lbp(run);
    else if (run.command == "bounds") cmd_bounds(run);
    else cmd_sweep(run);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::invalid_parameter || e.kind() == ErrorKind::io_error ? 2 : 1;
  } catch (const Json::exception& e) {
    std::cerr << "error: bad config: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  const std::string canonical = run.config.dump();
  if (!run.seeds.contains("master")) run.seeds["master"] = run.master_seed();
  write_json(fs::path(options.out) / "manifest.json",
             {{"tool", "ggm"},
              {"version", GGM_VERSION},
              {"command", run.command},
              {"config_hash", "fnv1a64:" + hex64(fnv1a64(canonical))},
              {"config", run.config},
              {"seeds", run.seeds},
              {"threads", options.threads == 0 ? default_threads() : options.threads},
              {"format", options.format},
              {"outputs", run.outputs},
              {"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}});
  return 0;
}
