#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "regnet/data_model.hpp"
#include "regnet/types.hpp"

namespace regnet {

template <typename Real>
struct Significance {
  Matrix<Real> s;             // ratio of observed to configuration-model share
  BoolMatrix defined;         // false where either endpoint has zero strength
};

/// Observed partner share over the configuration-model share,
/// s_ij = 2m n_ij / (k_i k_j), with k the full row sums and 2m the sum over
/// both orientations. Entries touching an isolated node are undefined.
template <typename Derived>
Significance<real_of_t<Derived>> collaboration_significance(const Eigen::MatrixBase<Derived>& counts) {
  using Real = real_of_t<Derived>;
  const Matrix<Real> n = counts.template cast<Real>();
  const Vector<Real> k = n.rowwise().sum();
  const Real two_m = k.sum();
  Significance<Real> out{Matrix<Real>::Zero(n.rows(), n.cols()), BoolMatrix::Constant(n.rows(), n.cols(), false)};
  if (!(two_m > Real(0))) return out;
  for (Eigen::Index i = 0; i < n.rows(); ++i)
    for (Eigen::Index j = 0; j < n.cols(); ++j) {
      if (i == j || !(k(i) > Real(0)) || !(k(j) > Real(0))) continue;
      out.defined(i, j) = true;
      // Same value as (n_ij / k_i) / (k_j / 2m); this ordering is exactly symmetric.
      out.s(i, j) = (two_m * n(i, j)) / (k(i) * k(j));
    }
  return out;
}

/// (s - 1) / (s + 1), clamped below at zero; undefined entries map to zero.
template <typename Real>
Matrix<Real> significance_transform(const Matrix<Real>& s, const BoolMatrix& defined) {
  Matrix<Real> p = Matrix<Real>::Zero(s.rows(), s.cols());
  for (Eigen::Index i = 0; i < s.rows(); ++i)
    for (Eigen::Index j = 0; j < s.cols(); ++j) {
      if (!defined(i, j)) continue;
      const Real raw = (s(i, j) - Real(1)) / (s(i, j) + Real(1));
      p(i, j) = raw < Real(0) ? Real(0) : raw;
    }
  return p;
}

struct SignificanceNetwork {
  std::string period;
  std::vector<std::string> nodes;  // country codes, dataset order
  Matrix<double> s;
  Matrix<double> p_hat;
  BoolMatrix defined;
};

SignificanceNetwork significance_network(const PanelDataset& dataset, std::size_t period);

struct WeightedEdge {
  int source = 0;
  int target = 0;
  double weight = 0;

  bool operator==(const WeightedEdge&) const = default;
};

inline constexpr double kDefaultEdgeCutoff = 0.5;

// Pairs with p_hat > cutoff, each once (source < target), heaviest first.
std::vector<WeightedEdge> threshold_edges(const SignificanceNetwork& network, double cutoff);

struct RegionMatrix {
  std::vector<std::string> regions;
  Matrix<double> mean;     // NaN where pairs == 0
  Eigen::MatrixXi pairs;   // ordered country pairs averaged
};

/// Mean p_hat over ordered pairs of distinct, defined countries in each
/// region pair. With `positive_only` only pairs with p_hat > 0 are averaged.
RegionMatrix continental_mean_weights(const SignificanceNetwork& network, std::span<const int> region_of,
                                      const std::vector<std::string>& regions, bool positive_only = false);

enum class ExportFormat { Csv, Gexf };

struct NodeAttributes {
  std::vector<std::string> region;
  std::vector<std::int64_t> publications;
};

void write_edge_csv(const SignificanceNetwork& network, const std::vector<WeightedEdge>& edges,
                    const std::filesystem::path& path);
std::vector<WeightedEdge> read_edge_csv(const std::filesystem::path& path, const std::vector<std::string>& nodes);
void write_gexf(const SignificanceNetwork& network, const std::vector<WeightedEdge>& edges,
                const NodeAttributes& attributes, const std::filesystem::path& path);

// Thresholds and writes the network in the requested format.
void export_network(const SignificanceNetwork& network, double cutoff, const std::filesystem::path& path,
                    ExportFormat format, const NodeAttributes& attributes = {});

}  // namespace regnet
