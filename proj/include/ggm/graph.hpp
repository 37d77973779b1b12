#pragma once

// Undirected simple graphs on nodes {0, ..., p-1}, the random ensembles the
// learner is evaluated on, and the local-separation analysis that decides
// how large the conditioning sets have to be.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "ggm/error.hpp"
#include "ggm/rng.hpp"

namespace ggm {

using Node = std::size_t;
using NodeSet = std::vector<Node>;  // always sorted ascending

/// Unordered node pair stored with u < v.
struct Edge {
  Node u = 0;
  Node v = 0;

  Edge() = default;
  Edge(Node a, Node b) : u(std::min(a, b)), v(std::max(a, b)) {}

  friend auto operator<=>(const Edge&, const Edge&) = default;
  friend bool operator==(const Edge&, const Edge&) = default;
};

class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t p) : p_(p), adjacency_(p) {}

  /// Builds a graph from an arbitrary edge list. Pairs are normalized and
  /// duplicates merged; self-loops and out-of-range labels are rejected.
  Graph(std::size_t p, std::vector<Edge> edges) : p_(p), adjacency_(p) {
    for (const auto& e : edges) {
      if (e.u == e.v) throw Error(ErrorKind::invalid_argument, "self-loop at node " + std::to_string(e.u));
      if (e.v >= p) throw Error(ErrorKind::invalid_argument, "node label " + std::to_string(e.v) + " >= p");
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);
    for (const auto& e : edges_) {
      adjacency_[e.u].push_back(e.v);
      adjacency_[e.v].push_back(e.u);
    }
    for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
  }

  std::size_t p() const noexcept { return p_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::span<const Node> neighbors(Node i) const { return adjacency_.at(i); }
  std::size_t degree(Node i) const { return adjacency_.at(i).size(); }

  std::size_t max_degree() const noexcept {
    std::size_t best = 0;
    for (const auto& nbrs : adjacency_) best = std::max(best, nbrs.size());
    return best;
  }

  bool has_edge(Node i, Node j) const {
    if (i >= p_ || j >= p_ || i == j) return false;
    const auto& nbrs = adjacency_[i];
    return std::binary_search(nbrs.begin(), nbrs.end(), j);
  }

  /// Relabels node k as perm[k].
  Graph permuted(std::span<const Node> perm) const {
    std::vector<Edge> out;
    out.reserve(edges_.size());
    for (const auto& e : edges_) out.emplace_back(perm[e.u], perm[e.v]);
    return Graph(p_, std::move(out));
  }

  friend bool operator==(const Graph& a, const Graph& b) { return a.p_ == b.p_ && a.edges_ == b.edges_; }

 private:
  std::size_t p_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<Node>> adjacency_;
};

// ---------------------------------------------------------------------------
// Deterministic families

inline Graph path_graph(std::size_t p) {
  std::vector<Edge> edges;
  for (Node k = 0; k + 1 < p; ++k) edges.emplace_back(k, k + 1);
  return Graph(p, std::move(edges));
}

inline Graph cycle_graph(std::size_t p) {
  if (p < 3) throw Error(ErrorKind::invalid_parameter, "cycle needs at least 3 nodes");
  std::vector<Edge> edges;
  for (Node k = 0; k < p; ++k) edges.emplace_back(k, (k + 1) % p);
  return Graph(p, std::move(edges));
}

inline Graph complete_graph(std::size_t p) {
  std::vector<Edge> edges;
  for (Node u = 0; u < p; ++u)
    for (Node v = u + 1; v < p; ++v) edges.emplace_back(u, v);
  return Graph(p, std::move(edges));
}

/// d-dimensional torus with side m (wrap-around in every coordinate).
/// Node label is the mixed-radix number of its coordinates.
inline Graph torus_graph(std::size_t side, std::size_t dim) {
  if (side < 2 || dim < 1) throw Error(ErrorKind::invalid_parameter, "torus needs side >= 2 and dim >= 1");
  std::size_t p = 1;
  for (std::size_t k = 0; k < dim; ++k) p *= side;
  std::vector<Edge> edges;
  for (Node v = 0; v < p; ++v) {
    std::size_t stride = 1;
    for (std::size_t k = 0; k < dim; ++k) {
      const std::size_t coord = (v / stride) % side;
      const Node w = v - coord * stride + ((coord + 1) % side) * stride;
      if (w != v) edges.emplace_back(v, w);
      stride *= side;
    }
  }
  return Graph(p, std::move(edges));
}

/// Uniform random recursive tree: node k attaches to a uniform earlier node.
inline Graph random_tree(std::size_t p, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Edge> edges;
  for (Node k = 1; k < p; ++k) edges.emplace_back(static_cast<Node>(rng.below(k)), k);
  return Graph(p, std::move(edges));
}

// ---------------------------------------------------------------------------
// Random ensembles

/// Erdos-Renyi G(p, c/p). Pairs are visited in lexicographic order and each
/// consumes exactly one uniform draw.
inline Graph generate_er(std::size_t p, double c, std::uint64_t seed) {
  if (p < 1) throw Error(ErrorKind::invalid_parameter, "ER needs p >= 1");
  if (!(c >= 0.0 && c <= static_cast<double>(p)))
    throw Error(ErrorKind::invalid_parameter, "ER mean degree c must lie in [0, p]");
  const double prob = c / static_cast<double>(p);
  Rng rng(seed);
  std::vector<Edge> edges;
  for (Node u = 0; u < p; ++u)
    for (Node v = u + 1; v < p; ++v)
      if (rng.uniform() < prob) edges.emplace_back(u, v);
  return Graph(p, std::move(edges));
}

/// Random Delta-regular graph by the pairing model, rejecting pairings with
/// loops or multi-edges.
inline Graph generate_regular(std::size_t p, std::size_t delta, std::uint64_t seed,
                              int retry_budget = 1000) {
  if (delta >= p) throw Error(ErrorKind::invalid_parameter, "regular degree must be < p");
  if ((delta * p) % 2 != 0) throw Error(ErrorKind::invalid_parameter, "delta * p must be even");
  Rng rng(seed);
  std::vector<Node> stubs;
  stubs.reserve(delta * p);
  for (int attempt = 0; attempt < retry_budget; ++attempt) {
    stubs.clear();
    for (Node v = 0; v < p; ++v) stubs.insert(stubs.end(), delta, v);
    // Fisher-Yates with the portable bounded draw.
    for (std::size_t k = stubs.size(); k > 1; --k) std::swap(stubs[k - 1], stubs[rng.below(k)]);
    std::vector<Edge> edges;
    edges.reserve(stubs.size() / 2);
    bool simple = true;
    for (std::size_t k = 0; k + 1 < stubs.size(); k += 2) {
      if (stubs[k] == stubs[k + 1]) {
        simple = false;
        break;
      }
      edges.emplace_back(stubs[k], stubs[k + 1]);
    }
    if (!simple) continue;
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) continue;
    return Graph(p, std::move(edges));
  }
  throw Error(ErrorKind::generation_failed,
              "pairing model produced no simple graph in " + std::to_string(retry_budget) + " attempts");
}

/// Union of a d-dimensional torus on p = m^d nodes and an ER(p, c/p) draw.
inline Graph generate_smallworld(std::size_t p, std::size_t dim, double c, std::uint64_t seed) {
  if (dim < 1) throw Error(ErrorKind::invalid_parameter, "grid dimension must be >= 1");
  const auto side = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(p), 1.0 / static_cast<double>(dim))));
  std::size_t check = 1;
  for (std::size_t k = 0; k < dim; ++k) check *= side;
  if (side < 2 || check != p)
    throw Error(ErrorKind::invalid_parameter, "p must be m^d for an integer m >= 2");
  const Graph grid = torus_graph(side, dim);
  const Graph random = generate_er(p, c, seed);
  std::vector<Edge> edges = grid.edges();
  edges.insert(edges.end(), random.edges().begin(), random.edges().end());
  return Graph(p, std::move(edges));
}

struct ErdosRenyi { double c = 0.0; };
struct RandomRegular { std::size_t degree = 0; };
struct SmallWorld { std::size_t dim = 2; double c = 0.0; };
struct Explicit { std::string path; };
struct Chain {};
struct Cycle {};

using EnsembleKind = std::variant<ErdosRenyi, RandomRegular, SmallWorld, Explicit, Chain, Cycle>;

struct EnsembleConfig {
  EnsembleKind kind = Chain{};
  std::size_t p = 0;
  std::uint64_t seed = 0;
};

Graph read_edge_list_file(const std::string& path);

inline Graph generate(const EnsembleConfig& cfg) {
  struct Visitor {
    const EnsembleConfig& cfg;
    Graph operator()(const ErdosRenyi& k) const { return generate_er(cfg.p, k.c, cfg.seed); }
    Graph operator()(const RandomRegular& k) const { return generate_regular(cfg.p, k.degree, cfg.seed); }
    Graph operator()(const SmallWorld& k) const { return generate_smallworld(cfg.p, k.dim, k.c, cfg.seed); }
    Graph operator()(const Explicit& k) const { return read_edge_list_file(k.path); }
    Graph operator()(const Chain&) const { return path_graph(cfg.p); }
    Graph operator()(const Cycle&) const { return cycle_graph(cfg.p); }
  };
  return std::visit(Visitor{cfg}, cfg.kind);
}

// ---------------------------------------------------------------------------
// Metrics and neighbourhoods

/// Hop distances from `source`, or max() for nodes farther than `limit` or
/// unreachable.
inline std::vector<std::size_t> bfs_distances(const Graph& g, Node source,
                                              std::size_t limit = std::numeric_limits<std::size_t>::max()) {
  constexpr auto kUnreached = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(g.p(), kUnreached);
  std::deque<Node> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const Node u = queue.front();
    queue.pop_front();
    if (dist[u] == limit) continue;
    for (Node w : g.neighbors(u)) {
      if (dist[w] == kUnreached) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

/// Length of the shortest cycle; nullopt for forests.
inline std::optional<std::size_t> girth(const Graph& g) {
  constexpr auto kUnreached = std::numeric_limits<std::size_t>::max();
  std::size_t best = kUnreached;
  std::vector<std::size_t> dist(g.p());
  std::vector<Node> parent(g.p());
  for (Node root = 0; root < g.p(); ++root) {
    std::fill(dist.begin(), dist.end(), kUnreached);
    std::deque<Node> queue{root};
    dist[root] = 0;
    parent[root] = root;
    while (!queue.empty()) {
      const Node u = queue.front();
      queue.pop_front();
      if (2 * dist[u] + 1 >= best) break;
      for (Node w : g.neighbors(u)) {
        if (dist[w] == kUnreached) {
          dist[w] = dist[u] + 1;
          parent[w] = u;
          queue.push_back(w);
        } else if (parent[u] != w) {
          best = std::min(best, dist[u] + dist[w] + 1);
        }
      }
    }
  }
  if (best == kUnreached) return std::nullopt;
  return best;
}

/// Nodes within `gamma` hops of i, including i, sorted.
inline NodeSet ball(const Graph& g, Node i, std::size_t gamma) {
  if (i >= g.p()) throw Error(ErrorKind::invalid_argument, "node out of range");
  const auto dist = bfs_distances(g, i, gamma);
  NodeSet out;
  for (Node v = 0; v < g.p(); ++v)
    if (dist[v] <= gamma) out.push_back(v);
  return out;
}

/// H_{gamma,i}: all p nodes kept, only edges with both ends in the ball.
inline Graph gamma_subgraph(const Graph& g, Node i, std::size_t gamma) {
  if (i >= g.p()) throw Error(ErrorKind::invalid_argument, "node out of range");
  const auto dist = bfs_distances(g, i, gamma);
  std::vector<Edge> kept;
  for (const auto& e : g.edges())
    if (dist[e.u] <= gamma && dist[e.v] <= gamma) kept.push_back(e);
  return Graph(g.p(), std::move(kept));
}

/// True iff the subgraph induced on the gamma-ball of i has no cycle.
inline bool is_locally_treelike(const Graph& g, Node i, std::size_t gamma) {
  const Graph local = gamma_subgraph(g, i, gamma);
  const auto members = ball(g, i, gamma);
  // The induced ball is connected, so it is a tree iff |E| = |V| - 1.
  return local.edge_count() + 1 == members.size();
}

/// |E(g) symmetric-difference E(h)|.
inline std::size_t edit_distance(const Graph& g, const Graph& h) {
  if (g.p() != h.p()) throw Error(ErrorKind::invalid_argument, "edit distance needs graphs on the same node count");
  std::size_t count = 0;
  auto a = g.edges().begin();
  auto b = h.edges().begin();
  while (a != g.edges().end() && b != h.edges().end()) {
    if (*a < *b) {
      ++count;
      ++a;
    } else if (*b < *a) {
      ++count;
      ++b;
    } else {
      ++a;
      ++b;
    }
  }
  count += static_cast<std::size_t>(g.edges().end() - a) + static_cast<std::size_t>(h.edges().end() - b);
  return count;
}

// ---------------------------------------------------------------------------
// Local separators

namespace detail {

/// Unit-capacity vertex-split flow network between s and t. Every node other
/// than s and t may be crossed once; `blocked` nodes are deleted.
class VertexCutNetwork {
 public:
  VertexCutNetwork(const Graph& h, std::span<const Node> nodes) : h_(h), nodes_(nodes.begin(), nodes.end()) {
    local_.assign(h.p(), kAbsent);
    for (std::size_t k = 0; k < nodes_.size(); ++k) local_[nodes_[k]] = k;
  }

  /// Maximum number of internally vertex-disjoint s-t paths avoiding blocked
  /// nodes; equals the minimum s-t vertex separator size (Menger).
  std::size_t min_cut(Node s, Node t, const std::vector<char>& blocked) {
    build(s, t, blocked);
    std::size_t flow = 0;
    const std::size_t source = 2 * local_[s] + 1;
    const std::size_t sink = 2 * local_[t];
    std::vector<std::size_t> via(head_.size());
    for (;;) {
      std::fill(via.begin(), via.end(), kAbsent);
      std::deque<std::size_t> queue{source};
      via[source] = kRoot;
      while (!queue.empty() && via[sink] == kAbsent) {
        const auto x = queue.front();
        queue.pop_front();
        for (auto a = head_[x]; a != kAbsent; a = next_[a]) {
          if (cap_[a] > 0 && via[to_[a]] == kAbsent) {
            via[to_[a]] = a;
            queue.push_back(to_[a]);
          }
        }
      }
      if (via[sink] == kAbsent) return flow;
      for (auto x = sink; x != source;) {
        const auto a = via[x];
        cap_[a] -= 1;
        cap_[a ^ 1] += 1;
        x = to_[a ^ 1];
      }
      ++flow;
    }
  }

 private:
  static constexpr std::size_t kAbsent = std::numeric_limits<std::size_t>::max();
  static constexpr std::size_t kRoot = kAbsent - 1;
  static constexpr int kInfinite = 1 << 20;

  void arc(std::size_t from, std::size_t to, int cap) {
    to_.push_back(to);
    cap_.push_back(cap);
    next_.push_back(head_[from]);
    head_[from] = to_.size() - 1;
    to_.push_back(from);
    cap_.push_back(0);
    next_.push_back(head_[to]);
    head_[to] = to_.size() - 1;
  }

  void build(Node s, Node t, const std::vector<char>& blocked) {
    head_.assign(2 * nodes_.size(), kAbsent);
    to_.clear();
    cap_.clear();
    next_.clear();
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
      const Node v = nodes_[k];
      if (blocked[v]) continue;
      arc(2 * k, 2 * k + 1, (v == s || v == t) ? kInfinite : 1);
      for (Node w : h_.neighbors(v)) {
        if (local_[w] == kAbsent || blocked[w]) continue;
        arc(2 * k + 1, 2 * local_[w], kInfinite);
      }
    }
  }

  const Graph& h_;
  std::vector<Node> nodes_;
  std::vector<std::size_t> local_;
  std::vector<std::size_t> head_, to_, next_;
  std::vector<int> cap_;
};

}  // namespace detail

/// Lexicographically smallest minimum-cardinality vertex set separating i
/// from j in the gamma-ball subgraph of i. Empty when j is unreachable there
/// (in particular for gamma = 0).
inline NodeSet local_separator(const Graph& g, Node i, Node j, std::size_t gamma) {
  if (i >= g.p() || j >= g.p()) throw Error(ErrorKind::invalid_argument, "node out of range");
  if (i == j) throw Error(ErrorKind::invalid_argument, "separator needs distinct nodes");
  if (g.has_edge(i, j))
    throw Error(ErrorKind::invalid_argument,
                "(" + std::to_string(i) + "," + std::to_string(j) + ") is an edge; no separator exists");
  if (gamma == 0) return {};

  const Graph h = gamma_subgraph(g, i, gamma);
  const auto reach = bfs_distances(h, i);
  if (reach[j] == std::numeric_limits<std::size_t>::max()) return {};

  NodeSet component;
  for (Node v = 0; v < g.p(); ++v)
    if (reach[v] != std::numeric_limits<std::size_t>::max()) component.push_back(v);

  detail::VertexCutNetwork network(h, component);
  std::vector<char> blocked(g.p(), 0);
  const std::size_t size = network.min_cut(i, j, blocked);

  // Greedy lexicographic completion: take the smallest node that belongs to
  // some minimum separator extending the current prefix.
  NodeSet chosen;
  for (Node v : component) {
    if (chosen.size() == size) break;
    if (v == i || v == j) continue;
    blocked[v] = 1;
    if (network.min_cut(i, j, blocked) + chosen.size() + 1 == size) {
      chosen.push_back(v);
    } else {
      blocked[v] = 0;
    }
  }
  return chosen;
}

/// True iff removing `removed` leaves no i-j path in h.
inline bool separates(const Graph& h, Node i, Node j, std::span<const Node> removed) {
  std::vector<char> gone(h.p(), 0);
  for (Node v : removed) gone[v] = 1;
  if (gone[i] || gone[j]) return false;
  std::vector<char> seen(h.p(), 0);
  std::deque<Node> queue{i};
  seen[i] = 1;
  while (!queue.empty()) {
    const Node u = queue.front();
    queue.pop_front();
    if (u == j) return false;
    for (Node w : h.neighbors(u)) {
      if (!seen[w] && !gone[w]) {
        seen[w] = 1;
        queue.push_back(w);
      }
    }
  }
  return true;
}

struct SeparationProfile {
  std::size_t gamma = 0;
  std::size_t eta = 0;
  std::map<Edge, NodeSet> per_pair;  // keyed by non-edge (i < j)
};

/// Local separators for every non-edge. For a non-edge (i,j) with i < j the
/// separator is computed in the ball subgraph of i.
inline SeparationProfile separation_profile(const Graph& g, std::size_t gamma) {
  SeparationProfile profile;
  profile.gamma = gamma;
  for (Node i = 0; i < g.p(); ++i) {
    for (Node j = i + 1; j < g.p(); ++j) {
      if (g.has_edge(i, j)) continue;
      auto sep = local_separator(g, i, j, gamma);
      profile.eta = std::max(profile.eta, sep.size());
      profile.per_pair.emplace(Edge(i, j), std::move(sep));
    }
  }
  return profile;
}

// ---------------------------------------------------------------------------
// Edge-list text format: "p <count>" then one "u v" line per edge, u < v,
// sorted lexicographically.

inline void write_edge_list(std::ostream& out, const Graph& g) {
  out << "p " << g.p() << '\n';
  for (const auto& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

inline Graph read_edge_list(std::istream& in) {
  std::string tag;
  std::size_t p = 0;
  if (!(in >> tag >> p) || tag != "p") throw Error(ErrorKind::io_error, "edge list must start with 'p <count>'");
  std::vector<Edge> edges;
  long long u = 0, v = 0;
  while (in >> u) {
    if (!(in >> v)) throw Error(ErrorKind::io_error, "dangling node label in edge list");
    if (u < 0 || v < 0) throw Error(ErrorKind::io_error, "negative node label in edge list");
    edges.emplace_back(static_cast<Node>(u), static_cast<Node>(v));
  }
  if (!in.eof()) throw Error(ErrorKind::io_error, "malformed edge list");
  return Graph(p, std::move(edges));
}

inline void write_edge_list_file(const std::string& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io_error, "cannot open " + path + " for writing");
  write_edge_list(out, g);
}

inline Graph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot open " + path);
  return read_edge_list(in);
}

}  // namespace ggm
