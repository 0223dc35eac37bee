#include "regnet/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace regnet {

std::string_view to_string(ProfileKind kind) {
  return kind == ProfileKind::RelativeAbundance ? "relative_abundance" : "average_prevalence";
}

std::string_view to_string(Linkage) { return "complete"; }

ProfileMatrix relative_abundance(const PanelDataset& dataset) {
  return {relative_abundance(dataset.publications()), ProfileKind::RelativeAbundance};
}

ProfileMatrix average_prevalence(const ProfileMatrix& abundance) {
  if (abundance.kind != ProfileKind::RelativeAbundance)
    throw Error(ErrorCode::InvalidInput, "average prevalence expects a relative-abundance matrix");
  return {average_prevalence(abundance.values), ProfileKind::AveragePrevalence};
}

Matrix<double> ks_distance_matrix(const Matrix<double>& profiles) {
  const auto n = profiles.rows();
  Matrix<double> d = Matrix<double>::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = ks_distance(profiles.row(i), profiles.row(j));
  return d;
}

ProfileClustering cluster_profiles(const Matrix<double>& distances, int max_clusters) {
  if (max_clusters < 1) throw Error(ErrorCode::InvalidInput, "max_clusters must be >= 1");
  if (distances.rows() != distances.cols())
    throw Error(ErrorCode::InvalidInput, "distance matrix must be square");
  const int n = static_cast<int>(distances.rows());
  for (int i = 0; i < n; ++i) {
    if (distances(i, i) != 0.0) throw Error(ErrorCode::InvalidInput, "distance matrix diagonal must be zero");
    for (int j = 0; j < n; ++j) {
      if (!(distances(i, j) >= 0.0)) throw Error(ErrorCode::InvalidInput, "distances must be non-negative");
      if (distances(i, j) != distances(j, i)) throw Error(ErrorCode::InvalidInput, "distance matrix must be symmetric");
    }
  }

  ProfileClustering result;
  result.labels.assign(static_cast<std::size_t>(n), 0);
  if (n == 0) return result;

  // Agglomeration; clusters are named by their lowest member index.
  Matrix<double> d = distances;
  std::vector<bool> active(static_cast<std::size_t>(n), true);
  for (int step = 0; step + 1 < n; ++step) {
    int best_a = -1, best_b = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a < n; ++a) {
      if (!active[a]) continue;
      for (int b = a + 1; b < n; ++b) {
        if (!active[b]) continue;
        if (d(a, b) < best) {
          best = d(a, b);
          best_a = a;
          best_b = b;
        }
      }
    }
    result.dendrogram.push_back({best_a, best_b, best});
    active[best_b] = false;
    for (int k = 0; k < n; ++k) {
      if (!active[k] || k == best_a) continue;
      d(best_a, k) = d(k, best_a) = std::max(d(best_a, k), d(best_b, k));
    }
  }

  std::size_t performed = 0;
  if (max_clusters > n) {
    result.threshold_r = 0.0;
  } else {
    // Heights are non-decreasing under complete linkage, so the merges below
    // any cut form a prefix of the dendrogram.
    bool found = false;
    for (std::size_t k = 0; k < result.dendrogram.size(); ++k) {
      const double r = result.dendrogram[k].height;
      if (k > 0 && r == result.dendrogram[k - 1].height) continue;
      if (n - static_cast<int>(k) <= max_clusters) {
        result.threshold_r = r;
        performed = k;
        found = true;
        break;
      }
    }
    if (!found) {
      performed = result.dendrogram.size();
      const double top = result.dendrogram.empty() ? 0.0 : result.dendrogram.back().height;
      result.threshold_r = std::nextafter(top, std::numeric_limits<double>::infinity());
    }
  }

  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t k = 0; k < performed; ++k) {
    const int a = find(result.dendrogram[k].left), b = find(result.dendrogram[k].right);
    parent[std::max(a, b)] = std::min(a, b);
  }

  std::vector<std::vector<int>> groups;
  std::vector<int> group_of_root(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    const int root = find(i);
    if (group_of_root[root] < 0) {
      group_of_root[root] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[group_of_root[root]].push_back(i);
  }
  // Largest cluster first; ties by lowest member.
  std::stable_sort(groups.begin(), groups.end(),
                   [](const auto& x, const auto& y) { return x.size() > y.size(); });
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (int i : groups[g]) result.labels[i] = static_cast<int>(g);
  result.n_clusters = static_cast<int>(groups.size());
  return result;
}

Matrix<double> cluster_mean_profiles(const Matrix<double>& profiles, const ProfileClustering& clustering) {
  if (static_cast<std::size_t>(profiles.rows()) != clustering.labels.size())
    throw Error(ErrorCode::LengthMismatch, "profile rows do not match clustering labels");
  Matrix<double> means = Matrix<double>::Zero(clustering.n_clusters, profiles.cols());
  Vector<double> sizes = Vector<double>::Zero(clustering.n_clusters);
  for (Eigen::Index i = 0; i < profiles.rows(); ++i) {
    means.row(clustering.labels[i]) += profiles.row(i);
    sizes(clustering.labels[i]) += 1.0;
  }
  for (Eigen::Index c = 0; c < means.rows(); ++c) means.row(c) /= sizes(c);
  return means;
}

}  // namespace regnet
