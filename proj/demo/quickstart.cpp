// Library walkthrough: build a model on a sparse random graph, draw samples,
// learn the graph back and compare with LBP and the sample-size bounds.

#include <cstdio>

#include "ggm/ggm.hpp"

int main() {
  using namespace ggm;

  const Graph g = generate_er(60, 3.0, 1);
  const GaussianModel m = synthesize_model(g, 0.5, RandomSigns{2});
  std::printf("graph: p=%zu edges=%zu, model alpha=%.3f\n", g.p(), g.edge_count(), m.alpha());

  const OracleGap gap = oracle_gap(m, 2, 2);
  std::printf("exact statistics: non-edge max %.4f, edge min %.4f\n", gap.c_max, gap.c_min);

  for (std::size_t n : {500, 2000, 8000}) {
    const SampleSet s = sample(m, n, 42);
    EstimatorConfig cfg;
    cfg.eta = 2;
    cfg.xi = default_threshold(static_cast<double>(n), static_cast<double>(g.p()), 2.5);
    const EstimationResult est = estimate_structure(CovarianceInput::from_samples(s), cfg);
    std::printf("n=%5zu  xi=%.4f  edit distance %zu\n", n, cfg.xi, edit_distance(g, est.graph_hat));
  }

  const LbpResult bp = lbp_run(m);
  std::printf("LBP: %zu iterations, max variance error %.2e\n", bp.iterations,
              lbp_variance_error(m, bp).max);

  const FanoBound fano = fano_lower_bound(60, 3.0, m.alpha());
  std::printf("necessary samples (Fano): exact %.2f, simplified %.2f\n", fano.exact, fano.simplified);
}
