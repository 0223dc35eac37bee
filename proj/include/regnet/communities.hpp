#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "regnet/data_model.hpp"
#include "regnet/error.hpp"
#include "regnet/partition.hpp"
#include "regnet/significance.hpp"
#include "regnet/types.hpp"

namespace regnet {

// Symmetric, non-negative weight matrix with zero diagonal.
class Adjacency {
 public:
  explicit Adjacency(Matrix<double> weights, std::vector<std::string> nodes = {});

  const Matrix<double>& weights() const { return weights_; }
  const Vector<double>& strength() const { return strength_; }
  double total_weight() const { return two_m_; }  // 2m, both orientations
  std::size_t size() const { return static_cast<std::size_t>(weights_.rows()); }
  bool active(std::size_t i) const { return strength_(static_cast<Eigen::Index>(i)) > 0.0; }
  const std::vector<std::string>& nodes() const { return nodes_; }

 private:
  Matrix<double> weights_;
  Vector<double> strength_;
  double two_m_ = 0;
  std::vector<std::string> nodes_;
};

Adjacency adjacency_from_counts(const PanelDataset& dataset, std::size_t period);
Adjacency adjacency_from_significance(const SignificanceNetwork& network);

/// Linearised stability (generalised modularity) of a labelling:
///   Q = (1/2m) sum_ij [A_ij - gamma k_i k_j / 2m] delta(x_i, x_j).
/// Evaluated per community as (1/2m) sum_c [I_c - gamma K_c^2 / 2m], where
/// I_c is the internal weight counted in both orientations and K_c the
/// community strength. Throws EmptyNetwork if 2m = 0.
template <typename Derived>
real_of_t<Derived> linearised_stability(const Eigen::MatrixBase<Derived>& weights, std::span<const int> labels,
                                        real_of_t<Derived> gamma) {
  using Real = real_of_t<Derived>;
  const auto n = weights.rows();
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw Error(ErrorCode::NodeSetMismatch, "partition size does not match network size");
  int max_label = -1;
  for (int l : labels) {
    if (l < 0) throw Error(ErrorCode::InvalidInput, "stability needs every node assigned");
    max_label = std::max(max_label, l);
  }
  Vector<Real> internal = Vector<Real>::Zero(max_label + 1);
  Vector<Real> strength = Vector<Real>::Zero(max_label + 1);
  Real two_m = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const Real w = static_cast<Real>(weights(i, j));
      two_m += w;
      strength(labels[i]) += w;
      if (labels[i] == labels[j]) internal(labels[i]) += w;
    }
  if (!(two_m > Real(0))) throw Error(ErrorCode::EmptyNetwork, "network has no edge weight");
  return (internal.sum() - gamma * strength.squaredNorm() / two_m) / two_m;
}

double linearised_stability(const Adjacency& adjacency, const Partition& partition, double gamma);

struct OptimiserOptions {
  int runs = 100;
  std::uint64_t seed = 0;
  int threads = 1;
  // Starting partitions polished in addition to the seeded runs.
  std::vector<Partition> candidates;
};

struct StabilityResult {
  Partition partition;
  double score = 0;
  double gamma = 1;
  double tau = 1;
  std::uint64_t seed = 0;
  int runs = 0;
  int best_run_index = 0;
  std::vector<double> run_scores;  // seeded runs, then candidates
};

inline constexpr double kGainTolerance = 1e-12;

/// Leiden-style maximisation of linearised stability. Each run repeats
/// local moving, refinement within communities and aggregation until the
/// community structure is stable, then sweeps single-node moves on the
/// original network until none improves Q. Run r uses seed + r; the best
/// score wins, ties to the lowest run index.
StabilityResult optimise_partition(const Adjacency& adjacency, double gamma, const OptimiserOptions& options = {});

// True when no single node can be relocated (to another community or a new
// one) with a gain above `tolerance`.
bool is_node_move_optimal(const Adjacency& adjacency, const Partition& partition, double gamma,
                          double tolerance = kGainTolerance);

struct BruteForceResult {
  Partition partition;
  double score = 0;
  std::size_t partitions_checked = 0;
};

inline constexpr std::size_t kBruteForceMaxNodes = 10;

// Exhaustive search over every set partition. Rejects more than 10 nodes.
BruteForceResult brute_force_partition(const Adjacency& adjacency, double gamma);

struct ScanPoint {
  double tau = 0;
  double gamma = 0;
  double mean_vi = 0;  // mean normalised VI over all pairs of runs
  double mean_score = 0;
  double mean_communities = 0;
};

/// For each Markov time tau, runs the optimiser `runs_per_tau` times as
/// independent single runs (gamma = 1/tau, seeds seed..seed+runs-1) and
/// averages the pairwise variation of information of the outcomes.
std::vector<ScanPoint> resolution_scan(const Adjacency& adjacency, const std::vector<double>& taus, int runs_per_tau,
                                       std::uint64_t seed, int threads = 1);

std::vector<double> default_taus();  // 1.0 and 0.76

}  // namespace regnet
