#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "regnet/data_model.hpp"
#include "regnet/diversity.hpp"
#include "regnet/error.hpp"
#include "regnet/types.hpp"

namespace regnet {

inline constexpr double kDefaultSmoothing = 1.0;

/// KL divergence (nats) of country i's observed partner distribution from
/// the configuration-model prediction k_i k_j / 2m, over partners j != i.
/// `smoothing` pseudo-counts are added to both sides before normalising.
/// Empty when the country has zero strength. With zero smoothing a partner
/// observed but predicted impossible would make the divergence infinite;
/// that cannot happen because an observed tie implies k_j > 0.
template <typename Derived>
std::optional<real_of_t<Derived>> kl_divergence_to_config(const Eigen::MatrixBase<Derived>& counts,
                                                          Eigen::Index country, real_of_t<Derived> smoothing) {
  using Real = real_of_t<Derived>;
  if (!(smoothing >= Real(0))) throw Error(ErrorCode::InvalidInput, "smoothing must be non-negative");
  const Matrix<Real> n = counts.template cast<Real>();
  const Vector<Real> k = n.rowwise().sum();
  const Real two_m = k.sum();
  if (!(k(country) > Real(0))) return std::nullopt;

  Vector<Real> p(n.cols()), q(n.cols());
  Real p_total = 0, q_total = 0;
  for (Eigen::Index j = 0; j < n.cols(); ++j) {
    if (j == country) {
      p(j) = q(j) = 0;
      continue;
    }
    p(j) = n(country, j) + smoothing;
    q(j) = k(country) * k(j) / two_m + smoothing;
    p_total += p(j);
    q_total += q(j);
  }
  Real kl = 0;
  for (Eigen::Index j = 0; j < n.cols(); ++j) {
    if (j == country || p(j) == Real(0)) continue;
    const Real pj = p(j) / p_total, qj = q(j) / q_total;
    kl += pj * std::log(pj / qj);
  }
  return kl < Real(0) ? Real(0) : kl;  // rounding can dip just below zero
}

struct KLRecord {
  std::string country;
  std::string period;
  std::optional<double> kl;  // empty for inactive countries
  double smoothing = kDefaultSmoothing;
};

KLRecord kl_divergence_to_config(const PanelDataset& dataset, std::size_t period, std::size_t country,
                                 double smoothing = kDefaultSmoothing);

// All countries and periods, country-major.
std::vector<KLRecord> kl_records(const PanelDataset& dataset, double smoothing = kDefaultSmoothing);

RegionSeries region_mean_kl(const std::vector<KLRecord>& records, const PanelDataset& dataset);

}  // namespace regnet
