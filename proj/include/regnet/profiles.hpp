#pragma once

#include <string>
#include <vector>

#include "regnet/data_model.hpp"
#include "regnet/error.hpp"
#include "regnet/types.hpp"

namespace regnet {

enum class ProfileKind { RelativeAbundance, AveragePrevalence };

std::string_view to_string(ProfileKind kind);

// Country x period profile values.
struct ProfileMatrix {
  Matrix<double> values;
  ProfileKind kind = ProfileKind::RelativeAbundance;
};

/// Global share of output per period: each column of `counts` divided by its
/// sum. Throws ZeroOutput if a period has no output at all.
template <typename Derived>
Matrix<real_of_t<Derived>> relative_abundance(const Eigen::MatrixBase<Derived>& counts) {
  using Real = real_of_t<Derived>;
  Matrix<Real> values = counts.template cast<Real>();
  for (Eigen::Index t = 0; t < values.cols(); ++t) {
    const Real total = values.col(t).sum();
    if (!(total > Real(0)))
      throw Error(ErrorCode::ZeroOutput, "period column " + std::to_string(t) + " has zero total output");
    values.col(t) /= total;
  }
  return values;
}

/// Each row of a relative-abundance matrix rescaled to sum to one, giving a
/// trajectory comparable across output scales.
template <typename Derived>
Matrix<real_of_t<Derived>> average_prevalence(const Eigen::MatrixBase<Derived>& abundance) {
  using Real = real_of_t<Derived>;
  Matrix<Real> values = abundance.template cast<Real>();
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    const Real total = values.row(i).sum();
    if (!(total > Real(0)))
      throw Error(ErrorCode::ZeroRow, "profile row " + std::to_string(i) + " is all zero");
    values.row(i) /= total;
  }
  return values;
}

ProfileMatrix relative_abundance(const PanelDataset& dataset);
ProfileMatrix average_prevalence(const ProfileMatrix& abundance);

/// Kolmogorov-Smirnov distance: the largest gap between the running sums of
/// two equal-length profiles.
template <typename A, typename B>
real_for_t<typename A::Scalar> ks_distance(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  using Real = real_for_t<typename A::Scalar>;
  if (a.size() != b.size())
    throw Error(ErrorCode::LengthMismatch, "profiles have different lengths (" + std::to_string(a.size()) +
                                               " vs " + std::to_string(b.size()) + ")");
  Real cum_a = 0, cum_b = 0, gap = 0;
  for (Eigen::Index t = 0; t < a.size(); ++t) {
    cum_a += static_cast<Real>(a(t));
    cum_b += static_cast<Real>(b(t));
    gap = std::max(gap, std::abs(cum_a - cum_b));
  }
  return gap;
}

// Pairwise KS distances between the rows of `profiles`.
Matrix<double> ks_distance_matrix(const Matrix<double>& profiles);

enum class Linkage { Complete };

std::string_view to_string(Linkage linkage);

struct MergeStep {
  int left = 0;   // representative item (lowest index) of each side
  int right = 0;
  double height = 0;
};

struct ProfileClustering {
  std::vector<int> labels;  // per item, 0 = largest cluster
  int n_clusters = 0;
  double threshold_r = 0;
  Linkage linkage = Linkage::Complete;
  std::vector<MergeStep> dendrogram;  // full merge sequence
};

inline constexpr int kDefaultMaxClusters = 6;

/// Complete-linkage agglomerative clustering cut at the smallest merge
/// height r for which joining every pair of clusters closer than r leaves at
/// most `max_clusters` clusters. Every within-cluster distance is < r.
ProfileClustering cluster_profiles(const Matrix<double>& distances, int max_clusters = kDefaultMaxClusters);

// Mean profile of each cluster (clusters x periods).
Matrix<double> cluster_mean_profiles(const Matrix<double>& profiles, const ProfileClustering& clustering);

}  // namespace regnet
