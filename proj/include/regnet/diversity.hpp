#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "regnet/data_model.hpp"
#include "regnet/error.hpp"
#include "regnet/types.hpp"

namespace regnet {

template <typename Real>
struct Shares {
  Matrix<Real> p;              // row i: partner shares of country i
  std::vector<bool> defined;   // false for countries with no partners
};

/// Row-normalised collaboration counts. Rows of isolated countries are left
/// zero and marked undefined.
template <typename Derived>
Shares<real_of_t<Derived>> collab_share(const Eigen::MatrixBase<Derived>& counts) {
  using Real = real_of_t<Derived>;
  Shares<Real> out{counts.template cast<Real>(), std::vector<bool>(static_cast<std::size_t>(counts.rows()))};
  out.p.diagonal().setZero();
  for (Eigen::Index i = 0; i < out.p.rows(); ++i) {
    const Real total = out.p.row(i).sum();
    out.defined[i] = total > Real(0);
    if (out.defined[i]) out.p.row(i) /= total;
  }
  return out;
}

Shares<double> collab_share(const PanelDataset& dataset, std::size_t period);

namespace detail {
template <typename Real>
Real plogp(Real p) {
  return p > Real(0) ? p * std::log(p) : Real(0);
}

template <typename Real>
Real entropy_normaliser(Eigen::Index n_countries) {
  if (n_countries < 2) throw Error(ErrorCode::InvalidInput, "collaboration entropy needs at least 2 countries");
  return std::log(static_cast<Real>(n_countries - 1));
}
}  // namespace detail

/// Shannon entropy of a partner-share row normalised by log(N-1), so that an
/// even spread over every other country scores 1. With N = 2 there is a
/// single possible partner and the entropy is 0.
template <typename Derived>
real_of_t<Derived> collaboration_entropy(const Eigen::MatrixBase<Derived>& shares, Eigen::Index n_countries) {
  using Real = real_of_t<Derived>;
  const Real norm = detail::entropy_normaliser<Real>(n_countries);
  Real sum = 0;
  for (Eigen::Index j = 0; j < shares.size(); ++j) sum -= detail::plogp(static_cast<Real>(shares(j)));
  return norm > Real(0) ? sum / norm : Real(0);
}

template <typename Real>
struct EntropySplit {
  Real within = 0;
  Real outside = 0;
};

/// Splits the entropy terms of `country`'s share row by whether the partner
/// shares its region. within + outside reproduces the full entropy term by
/// term.
template <typename Derived>
EntropySplit<real_of_t<Derived>> entropy_decomposition(const Eigen::MatrixBase<Derived>& shares,
                                                       std::span<const int> region_of, Eigen::Index country,
                                                       Eigen::Index n_countries) {
  using Real = real_of_t<Derived>;
  if (static_cast<Eigen::Index>(region_of.size()) != shares.size())
    throw Error(ErrorCode::LengthMismatch, "region labels do not match share row");
  const Real norm = detail::entropy_normaliser<Real>(n_countries);
  EntropySplit<Real> split;
  for (Eigen::Index j = 0; j < shares.size(); ++j) {
    if (j == country) continue;
    const Real term = -detail::plogp(static_cast<Real>(shares(j)));
    (region_of[j] == region_of[country] ? split.within : split.outside) += term;
  }
  if (norm > Real(0)) {
    split.within /= norm;
    split.outside /= norm;
  } else {
    split = {};
  }
  return split;
}

/// Within-region share of entropy; empty when the total is zero.
template <typename Real>
std::optional<Real> within_region_entropy_share(Real within, Real outside) {
  const Real total = within + outside;
  if (!(total > Real(0))) return std::nullopt;
  return within / total;
}

struct EntropyRecord {
  std::string country;
  std::string period;
  std::optional<double> ce;  // empty for isolated countries
  std::optional<double> ce_in;
  std::optional<double> ce_out;
  std::optional<double> share_in;
};

struct StrengthRecord {
  std::string country;
  std::string period;
  std::int64_t d_in = 0;
  std::int64_t d_out = 0;
  std::optional<double> d_prop;
};

// Entropy measures for every country and period, country-major. N is the
// country count of the dataset, held fixed over all periods.
std::vector<EntropyRecord> entropy_records(const PanelDataset& dataset);

StrengthRecord strength_decomposition(const PanelDataset& dataset, std::size_t period, std::size_t country);
std::vector<StrengthRecord> strength_records(const PanelDataset& dataset);

struct SeriesPoint {
  std::size_t country = 0;
  std::size_t period = 0;
  std::optional<double> value;
};

// Unweighted per-region, per-period means. Points with support 0 are
// omitted and listed in `flags`.
struct RegionSeries {
  std::vector<std::string> regions;
  std::vector<std::string> periods;
  Matrix<double> mean;       // region x period
  Eigen::MatrixXi support;   // number of defined values in each mean
  std::vector<std::string> flags;
};

RegionSeries region_mean_series(const std::vector<SeriesPoint>& points, const PanelDataset& dataset);

}  // namespace regnet
