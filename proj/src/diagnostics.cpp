#include "regnet/diagnostics.hpp"

namespace regnet {

KLRecord kl_divergence_to_config(const PanelDataset& dataset, std::size_t period, std::size_t country,
                                 double smoothing) {
  if (country >= dataset.n_countries()) throw Error(ErrorCode::MissingCountry, "country index out of range");
  return {dataset.countries()[country].code, dataset.periods().at(period).label,
          kl_divergence_to_config(dataset.collaborations(period), static_cast<Eigen::Index>(country), smoothing),
          smoothing};
}

std::vector<KLRecord> kl_records(const PanelDataset& dataset, double smoothing) {
  std::vector<KLRecord> records;
  for (std::size_t i = 0; i < dataset.n_countries(); ++i)
    for (std::size_t t = 0; t < dataset.n_periods(); ++t)
      records.push_back(kl_divergence_to_config(dataset, t, i, smoothing));
  return records;
}

RegionSeries region_mean_kl(const std::vector<KLRecord>& records, const PanelDataset& dataset) {
  std::vector<SeriesPoint> points;
  for (const auto& r : records) {
    auto i = dataset.country_index(r.country);
    if (!i) throw Error(ErrorCode::MissingCountry, "record for unknown country '" + r.country + "'");
    points.push_back({*i, dataset.require_period(r.period), r.kl});
  }
  return region_mean_series(points, dataset);
}

}  // namespace regnet
