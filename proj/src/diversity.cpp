#include "regnet/diversity.hpp"

namespace regnet {

Shares<double> collab_share(const PanelDataset& dataset, std::size_t period) {
  return collab_share(dataset.collaborations(period));
}

std::vector<EntropyRecord> entropy_records(const PanelDataset& dataset) {
  const auto n = static_cast<Eigen::Index>(dataset.n_countries());
  std::vector<Shares<double>> shares;
  for (std::size_t t = 0; t < dataset.n_periods(); ++t) shares.push_back(collab_share(dataset, t));

  std::vector<EntropyRecord> records;
  records.reserve(dataset.n_countries() * dataset.n_periods());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < dataset.n_periods(); ++t) {
      EntropyRecord rec{dataset.countries()[i].code, dataset.periods()[t].label, {}, {}, {}, {}};
      if (shares[t].defined[i]) {
        const auto row = shares[t].p.row(i);
        const auto split = entropy_decomposition(row, dataset.region_of(), i, n);
        rec.ce = collaboration_entropy(row, n);
        rec.ce_in = split.within;
        rec.ce_out = split.outside;
        rec.share_in = within_region_entropy_share(split.within, split.outside);
      }
      records.push_back(std::move(rec));
    }
  }
  return records;
}

StrengthRecord strength_decomposition(const PanelDataset& dataset, std::size_t period, std::size_t country) {
  if (country >= dataset.n_countries()) throw Error(ErrorCode::MissingCountry, "country index out of range");
  const auto& counts = dataset.collaborations(period);
  const auto& region_of = dataset.region_of();
  StrengthRecord rec{dataset.countries()[country].code, dataset.periods().at(period).label, 0, 0, {}};
  for (Eigen::Index j = 0; j < counts.cols(); ++j) {
    if (static_cast<std::size_t>(j) == country) continue;
    (region_of[j] == region_of[country] ? rec.d_in : rec.d_out) += counts(static_cast<Eigen::Index>(country), j);
  }
  if (rec.d_in + rec.d_out > 0)
    rec.d_prop = static_cast<double>(rec.d_in) / static_cast<double>(rec.d_in + rec.d_out);
  return rec;
}

std::vector<StrengthRecord> strength_records(const PanelDataset& dataset) {
  std::vector<StrengthRecord> records;
  for (std::size_t i = 0; i < dataset.n_countries(); ++i)
    for (std::size_t t = 0; t < dataset.n_periods(); ++t) records.push_back(strength_decomposition(dataset, t, i));
  return records;
}

RegionSeries region_mean_series(const std::vector<SeriesPoint>& points, const PanelDataset& dataset) {
  const auto n_regions = static_cast<Eigen::Index>(dataset.regions().size());
  const auto n_periods = static_cast<Eigen::Index>(dataset.n_periods());
  RegionSeries series;
  series.regions = dataset.regions();
  for (const auto& p : dataset.periods()) series.periods.push_back(p.label);
  series.mean = Matrix<double>::Zero(n_regions, n_periods);
  series.support = Eigen::MatrixXi::Zero(n_regions, n_periods);

  for (const auto& point : points) {
    if (point.country >= dataset.n_countries() || point.period >= dataset.n_periods())
      throw Error(ErrorCode::InvalidInput, "series point out of range");
    if (!point.value) continue;
    const int r = dataset.region_of()[point.country];
    series.mean(r, static_cast<Eigen::Index>(point.period)) += *point.value;
    series.support(r, static_cast<Eigen::Index>(point.period)) += 1;
  }
  for (Eigen::Index r = 0; r < n_regions; ++r)
    for (Eigen::Index t = 0; t < n_periods; ++t) {
      if (series.support(r, t) > 0) {
        series.mean(r, t) /= series.support(r, t);
      } else {
        series.mean(r, t) = std::numeric_limits<double>::quiet_NaN();
        series.flags.push_back(series.regions[r] + "/" + series.periods[t] + ": no defined values");
      }
    }
  return series;
}

}  // namespace regnet
