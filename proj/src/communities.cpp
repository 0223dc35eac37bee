#include "regnet/communities.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <random>
#include <set>

#include "regnet/parallel.hpp"
#include "regnet/partition_metrics.hpp"

namespace regnet {

int Partition::n_communities() const {
  int max_label = -1;
  for (int l : labels) max_label = std::max(max_label, l);
  return max_label + 1;
}

Partition make_partition(std::vector<int> labels, std::string period) {
  std::vector<int> remap;
  int next = 0;
  for (int& l : labels) {
    if (l == Partition::kAbsent) continue;
    if (l < 0) throw Error(ErrorCode::InvalidInput, "negative community label");
    if (static_cast<std::size_t>(l) >= remap.size()) remap.resize(static_cast<std::size_t>(l) + 1, -1);
    if (remap[l] < 0) remap[l] = next++;
    l = remap[l];
  }
  return {std::move(labels), std::move(period)};
}

Adjacency::Adjacency(Matrix<double> weights, std::vector<std::string> nodes)
    : weights_(std::move(weights)), nodes_(std::move(nodes)) {
  if (weights_.rows() != weights_.cols()) throw Error(ErrorCode::InvalidInput, "adjacency must be square");
  if (!nodes_.empty() && nodes_.size() != static_cast<std::size_t>(weights_.rows()))
    throw Error(ErrorCode::InvalidInput, "adjacency node names do not match its size");
  if (!weights_.allFinite()) throw Error(ErrorCode::InvalidInput, "adjacency weights must be finite");
  if ((weights_.array() < 0.0).any()) throw Error(ErrorCode::InvalidInput, "adjacency weights must be non-negative");
  if (weights_ != weights_.transpose()) throw Error(ErrorCode::InvalidInput, "adjacency must be symmetric");
  if ((weights_.diagonal().array() != 0.0).any())
    throw Error(ErrorCode::InvalidInput, "adjacency must have a zero diagonal");
  strength_ = weights_.rowwise().sum();
  two_m_ = strength_.sum();
}

Adjacency adjacency_from_counts(const PanelDataset& dataset, std::size_t period) {
  std::vector<std::string> nodes;
  for (const auto& c : dataset.countries()) nodes.push_back(c.code);
  return Adjacency(dataset.collaborations(period).cast<double>(), std::move(nodes));
}

Adjacency adjacency_from_significance(const SignificanceNetwork& network) {
  return Adjacency(network.p_hat, network.nodes);
}

double linearised_stability(const Adjacency& adjacency, const Partition& partition, double gamma) {
  return linearised_stability(adjacency.weights(), partition.labels, gamma);
}

std::vector<double> default_taus() { return {1.0, 0.76}; }

namespace {

using Rng = std::mt19937_64;

// Weighted graph in CSR form. Self-loops hold the weight internal to an
// aggregated node, counted in both orientations.
struct Graph {
  int n = 0;
  std::vector<int> offset;
  std::vector<int> target;
  std::vector<double> weight;
  std::vector<double> self_loop;
  std::vector<double> strength;
  double two_m = 0;
};

Graph graph_from(const Matrix<double>& a) {
  Graph g;
  g.n = static_cast<int>(a.rows());
  g.offset.assign(static_cast<std::size_t>(g.n) + 1, 0);
  g.self_loop.assign(static_cast<std::size_t>(g.n), 0.0);
  g.strength.assign(static_cast<std::size_t>(g.n), 0.0);
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      if (i == j || a(i, j) == 0.0) continue;
      g.target.push_back(j);
      g.weight.push_back(a(i, j));
      g.strength[i] += a(i, j);
    }
    g.offset[i + 1] = static_cast<int>(g.target.size());
    g.two_m += g.strength[i];
  }
  return g;
}

// Groups must be dense labels 0..m-1.
Graph aggregate(const Graph& g, const std::vector<int>& group, int m) {
  Matrix<double> w = Matrix<double>::Zero(m, m);
  Graph out;
  out.n = m;
  out.self_loop.assign(static_cast<std::size_t>(m), 0.0);
  out.strength.assign(static_cast<std::size_t>(m), 0.0);
  out.two_m = g.two_m;
  for (int v = 0; v < g.n; ++v) {
    const int gv = group[v];
    out.self_loop[gv] += g.self_loop[v];
    out.strength[gv] += g.strength[v];
    for (int e = g.offset[v]; e < g.offset[v + 1]; ++e) {
      const int gu = group[g.target[e]];
      if (gu == gv)
        out.self_loop[gv] += g.weight[e];
      else
        w(gv, gu) += g.weight[e];
    }
  }
  out.offset.assign(static_cast<std::size_t>(m) + 1, 0);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (w(i, j) == 0.0) continue;
      out.target.push_back(j);
      out.weight.push_back(w(i, j));
    }
    out.offset[i + 1] = static_cast<int>(out.target.size());
  }
  return out;
}

std::vector<int> shuffled_order(int n, Rng& rng) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<int> pick(0, i);
    std::swap(order[i], order[pick(rng)]);
  }
  return order;
}

// Dense first-appearance relabelling in place; returns the label count.
int normalise(std::vector<int>& labels) {
  std::vector<int> remap(labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1, -1);
  int next = 0;
  for (int& l : labels) {
    if (remap[l] < 0) remap[l] = next++;
    l = remap[l];
  }
  return next;
}

// Single-node moves on one graph level. Labels live in [0, n).
class NodeMover {
 public:
  NodeMover(const Graph& g, std::vector<int>& comm, double gamma)
      : g_(g), comm_(comm), gamma_(gamma), total_(g.n, 0.0), count_(g.n, 0), neighbour_w_(g.n, 0.0),
        // A move must raise Q = (.)/2m by more than kGainTolerance; scores
        // below are half the change in 2m Q.
        min_gain_(kGainTolerance * g.two_m / 2.0) {
    for (int v = 0; v < g_.n; ++v) {
      total_[comm_[v]] += g_.strength[v];
      ++count_[comm_[v]];
    }
    for (int c = 0; c < g_.n; ++c)
      if (count_[c] == 0) empty_.insert(c);
  }

  // Moves v to its best community; ties go to the lower label.
  bool try_move(int v) {
    const double k = g_.strength[v];
    if (!(k > 0.0)) return false;
    const int current = comm_[v];
    for (int e = g_.offset[v]; e < g_.offset[v + 1]; ++e) {
      const int c = comm_[g_.target[e]];
      if (neighbour_w_[c] == 0.0) touched_.push_back(c);
      neighbour_w_[c] += g_.weight[e];
    }
    total_[current] -= k;
    --count_[current];

    const double scale = gamma_ * k / g_.two_m;
    const double stay = neighbour_w_[current] - scale * total_[current];
    int best = -1;
    double best_score = 0.0;
    auto consider = [&](int c, double score) {
      if (score - stay <= min_gain_) return;
      if (best < 0 || score > best_score || (score == best_score && c < best)) {
        best = c;
        best_score = score;
      }
    };
    for (int c : touched_)
      if (c != current) consider(c, neighbour_w_[c] - scale * total_[c]);
    if (count_[current] > 0 && !empty_.empty()) consider(*empty_.begin(), 0.0);
    if (best < 0) best = current;

    for (int c : touched_) neighbour_w_[c] = 0.0;
    touched_.clear();

    comm_[v] = best;
    total_[best] += k;
    if (count_[best]++ == 0) empty_.erase(best);
    if (count_[current] == 0) empty_.insert(current);
    return best != current;
  }

  // Queue-based local moving: after a move, neighbours outside the new
  // community are revisited.
  bool fast_move(Rng& rng) {
    std::deque<int> queue;
    std::vector<bool> queued(static_cast<std::size_t>(g_.n), false);
    for (int v : shuffled_order(g_.n, rng)) {
      queue.push_back(v);
      queued[v] = true;
    }
    bool any = false;
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      queued[v] = false;
      if (!try_move(v)) continue;
      any = true;
      for (int e = g_.offset[v]; e < g_.offset[v + 1]; ++e) {
        const int u = g_.target[e];
        if (!queued[u] && comm_[u] != comm_[v]) {
          queue.push_back(u);
          queued[u] = true;
        }
      }
    }
    return any;
  }

  // Full sweeps in random order until a sweep moves nothing.
  bool sweep_until_stable(Rng& rng) {
    bool any = false;
    for (bool moved = true; moved;) {
      moved = false;
      for (int v : shuffled_order(g_.n, rng)) moved = try_move(v) || moved;
      any = any || moved;
    }
    return any;
  }

 private:
  const Graph& g_;
  std::vector<int>& comm_;
  double gamma_;
  std::vector<double> total_;
  std::vector<int> count_;
  std::vector<double> neighbour_w_;
  std::vector<int> touched_;
  std::set<int> empty_;
  double min_gain_;
};

// Splits each community into well-connected sub-communities by merging
// singletons greedily, never across community boundaries. Returns dense
// refined labels.
std::vector<int> refine(const Graph& g, const std::vector<int>& comm, int n_comm, double gamma, Rng& rng) {
  std::vector<int> refined(static_cast<std::size_t>(g.n));
  std::iota(refined.begin(), refined.end(), 0);
  std::vector<double> refined_total(g.strength);
  std::vector<int> refined_size(static_cast<std::size_t>(g.n), 1);
  std::vector<double> community_total(static_cast<std::size_t>(n_comm), 0.0);
  std::vector<std::vector<int>> members(static_cast<std::size_t>(n_comm));
  // Weight from each refined community to the rest of its community.
  std::vector<double> external(static_cast<std::size_t>(g.n), 0.0);
  for (int v = 0; v < g.n; ++v) {
    community_total[comm[v]] += g.strength[v];
    members[comm[v]].push_back(v);
    for (int e = g.offset[v]; e < g.offset[v + 1]; ++e)
      if (comm[g.target[e]] == comm[v]) external[v] += g.weight[e];
  }
  std::vector<double> node_external(external);
  std::vector<double> neighbour_w(static_cast<std::size_t>(g.n), 0.0);
  std::vector<int> touched;

  for (int c = 0; c < n_comm; ++c) {
    auto& nodes = members[c];
    const auto order = shuffled_order(static_cast<int>(nodes.size()), rng);
    const double total_c = community_total[c];
    for (int idx : order) {
      const int v = nodes[idx];
      const double k = g.strength[v];
      if (refined_size[refined[v]] != 1 || !(k > 0.0)) continue;
      if (node_external[v] < gamma * k * (total_c - k) / g.two_m) continue;

      for (int e = g.offset[v]; e < g.offset[v + 1]; ++e) {
        const int u = g.target[e];
        if (comm[u] != c) continue;
        const int r = refined[u];
        if (neighbour_w[r] == 0.0) touched.push_back(r);
        neighbour_w[r] += g.weight[e];
      }
      int best = -1;
      double best_gain = 0.0;
      for (int r : touched) {
        if (r == refined[v]) continue;
        const double kr = refined_total[r];
        if (external[r] < gamma * kr * (total_c - kr) / g.two_m) continue;
        const double gain = neighbour_w[r] - gamma * k * kr / g.two_m;
        if (gain < 0.0) continue;
        if (best < 0 || gain > best_gain || (gain == best_gain && r < best)) {
          best = r;
          best_gain = gain;
        }
      }
      if (best >= 0) {
        external[best] += node_external[v] - 2.0 * neighbour_w[best];
        refined_total[best] += k;
        ++refined_size[best];
        --refined_size[refined[v]];
        refined[v] = best;
      }
      for (int r : touched) neighbour_w[r] = 0.0;
      touched.clear();
    }
  }
  normalise(refined);
  return refined;
}

// One Leiden pass to convergence starting from `labels` on the base graph.
std::vector<int> leiden(const Graph& base, std::vector<int> labels, double gamma, Rng& rng) {
  Graph level = base;
  std::vector<int> comm = std::move(labels);
  std::vector<int> node_of(static_cast<std::size_t>(base.n));
  std::iota(node_of.begin(), node_of.end(), 0);

  while (true) {
    NodeMover(level, comm, gamma).fast_move(rng);
    const int n_comm = normalise(comm);
    if (n_comm == level.n) break;

    std::vector<int> refined = refine(level, comm, n_comm, gamma, rng);
    int n_refined = *std::max_element(refined.begin(), refined.end()) + 1;
    if (n_refined == level.n) {
      // Refinement merged nothing; aggregate by community to make progress.
      refined = comm;
      n_refined = n_comm;
    }
    Graph next = aggregate(level, refined, n_refined);
    std::vector<int> next_comm(static_cast<std::size_t>(n_refined));
    for (int v = 0; v < level.n; ++v) next_comm[refined[v]] = comm[v];
    for (int& a : node_of) a = refined[a];
    level = std::move(next);
    comm = std::move(next_comm);
  }
  std::vector<int> out(static_cast<std::size_t>(base.n));
  for (int v = 0; v < base.n; ++v) out[v] = comm[node_of[v]];
  normalise(out);
  return out;
}

std::vector<int> optimise_from(const Graph& base, std::vector<int> labels, double gamma, Rng& rng) {
  // Isolated nodes stay in singletons.
  int next = static_cast<int>(labels.size());
  for (int v = 0; v < base.n; ++v)
    if (!(base.strength[v] > 0.0)) labels[v] = next++;
  normalise(labels);

  labels = leiden(base, std::move(labels), gamma, rng);
  while (NodeMover(base, labels, gamma).sweep_until_stable(rng)) {
    normalise(labels);
    labels = leiden(base, std::move(labels), gamma, rng);
  }
  normalise(labels);
  return labels;
}

}  // namespace

StabilityResult optimise_partition(const Adjacency& adjacency, double gamma, const OptimiserOptions& options) {
  if (!(adjacency.total_weight() > 0.0)) throw Error(ErrorCode::EmptyNetwork, "network has no edge weight");
  if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidInput, "resolution gamma must be positive");
  if (options.runs < 1) throw Error(ErrorCode::InvalidInput, "optimiser needs at least one run");
  for (const auto& c : options.candidates)
    if (c.size() != adjacency.size())
      throw Error(ErrorCode::NodeSetMismatch, "candidate partition size does not match network");

  const Graph base = graph_from(adjacency.weights());
  const std::size_t total = static_cast<std::size_t>(options.runs) + options.candidates.size();
  std::vector<std::vector<int>> found(total);
  std::vector<double> scores(total, 0.0);

  parallel_for(total, options.threads, [&](std::size_t r) {
    Rng rng(options.seed + r);
    std::vector<int> start(adjacency.size());
    if (r < static_cast<std::size_t>(options.runs)) {
      std::iota(start.begin(), start.end(), 0);
    } else {
      const auto& candidate = options.candidates[r - static_cast<std::size_t>(options.runs)].labels;
      for (std::size_t v = 0; v < start.size(); ++v) {
        if (candidate[v] < 0) throw Error(ErrorCode::InvalidInput, "candidate partition has unassigned nodes");
        start[v] = candidate[v];
      }
      // Candidate labels may exceed the node count; compact them first.
      start = make_partition(std::move(start)).labels;
    }
    found[r] = optimise_from(base, std::move(start), gamma, rng);
    scores[r] = linearised_stability(adjacency.weights(), found[r], gamma);
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < total; ++r)
    if (scores[r] > scores[best]) best = r;

  StabilityResult result;
  result.partition = make_partition(std::move(found[best]));
  result.score = scores[best];
  result.gamma = gamma;
  result.tau = 1.0 / gamma;
  result.seed = options.seed;
  result.runs = options.runs;
  result.best_run_index = static_cast<int>(best);
  result.run_scores = std::move(scores);
  return result;
}

bool is_node_move_optimal(const Adjacency& adjacency, const Partition& partition, double gamma, double tolerance) {
  const double base = linearised_stability(adjacency, partition, gamma);
  std::vector<int> labels = partition.labels;
  const int n_comm = partition.n_communities();
  for (std::size_t v = 0; v < labels.size(); ++v) {
    const int original = labels[v];
    for (int c = 0; c <= n_comm; ++c) {  // c == n_comm: a new community
      if (c == original) continue;
      labels[v] = c;
      if (linearised_stability(adjacency.weights(), labels, gamma) - base > tolerance) return false;
    }
    labels[v] = original;
  }
  return true;
}

BruteForceResult brute_force_partition(const Adjacency& adjacency, double gamma) {
  const std::size_t n = adjacency.size();
  if (n > kBruteForceMaxNodes)
    throw Error(ErrorCode::TooManyNodes, "brute force is limited to " + std::to_string(kBruteForceMaxNodes) +
                                             " nodes, got " + std::to_string(n));
  if (!(adjacency.total_weight() > 0.0)) throw Error(ErrorCode::EmptyNetwork, "network has no edge weight");

  BruteForceResult best;
  best.score = -std::numeric_limits<double>::infinity();
  std::vector<int> labels(n, 0);
  // Restricted growth strings enumerate each set partition exactly once.
  auto visit = [&](auto&& self, std::size_t i, int max_label) -> void {
    if (i == n) {
      ++best.partitions_checked;
      const double q = linearised_stability(adjacency.weights(), labels, gamma);
      if (q > best.score) {
        best.score = q;
        best.partition.labels = labels;
      }
      return;
    }
    for (int l = 0; l <= max_label + 1; ++l) {
      labels[i] = l;
      self(self, i + 1, std::max(max_label, l));
    }
  };
  labels[0] = 0;
  visit(visit, 1, 0);
  best.partition = make_partition(std::move(best.partition.labels));
  return best;
}

std::vector<ScanPoint> resolution_scan(const Adjacency& adjacency, const std::vector<double>& taus, int runs_per_tau,
                                       std::uint64_t seed, int threads) {
  if (runs_per_tau < 2) throw Error(ErrorCode::InvalidInput, "resolution scan needs at least 2 runs per tau");
  std::vector<ScanPoint> points;
  for (double tau : taus) {
    if (!(tau > 0.0)) throw Error(ErrorCode::InvalidInput, "Markov time tau must be positive");
    const double gamma = 1.0 / tau;
    std::vector<StabilityResult> runs(static_cast<std::size_t>(runs_per_tau));
    parallel_for(runs.size(), threads, [&](std::size_t r) {
      OptimiserOptions opts;
      opts.runs = 1;
      opts.seed = seed + r;
      runs[r] = optimise_partition(adjacency, gamma, opts);
    });
    ScanPoint point{tau, gamma, 0.0, 0.0, 0.0};
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < runs.size(); ++a) {
      point.mean_score += runs[a].score;
      point.mean_communities += runs[a].partition.n_communities();
      for (std::size_t b = a + 1; b < runs.size(); ++b, ++pairs)
        point.mean_vi += variation_of_information(runs[a].partition, runs[b].partition);
    }
    point.mean_vi /= static_cast<double>(pairs);
    point.mean_score /= static_cast<double>(runs.size());
    point.mean_communities /= static_cast<double>(runs.size());
    points.push_back(point);
  }
  return points;
}

}  // namespace regnet
