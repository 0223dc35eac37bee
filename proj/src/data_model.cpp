#include "regnet/data_model.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "regnet/csv.hpp"
#include "regnet/error.hpp"

namespace regnet {

namespace {

using json = nlohmann::json;

void expect_header(const csv::Table& table, const std::vector<std::string>& expected,
                   const std::filesystem::path& path) {
  if (table.header.empty() && table.rows.empty()) return;  // empty file
  if (table.header != expected) {
    std::string want;
    for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
    throw Error(ErrorCode::InvalidInput,
                "'" + path.string() + "': expected header '" + want + "'");
  }
}

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.filename().string() + ":" + std::to_string(line);
}

}  // namespace

PanelDataset::PanelDataset(std::vector<std::string> regions, std::vector<CountryRecord> countries,
                           std::vector<PeriodSpec> periods, CountMatrix publications,
                           std::vector<CountMatrix> collaborations)
    : regions_(std::move(regions)),
      countries_(std::move(countries)),
      periods_(std::move(periods)),
      publications_(std::move(publications)),
      collaborations_(std::move(collaborations)) {
  validate_periods(periods_);
  const auto n = static_cast<Eigen::Index>(countries_.size());
  const auto t = static_cast<Eigen::Index>(periods_.size());
  if (publications_.rows() != n || publications_.cols() != t)
    throw Error(ErrorCode::InvalidInput, "publication matrix has wrong shape");
  if (collaborations_.size() != periods_.size())
    throw Error(ErrorCode::InvalidInput, "one collaboration matrix per period required");
  if ((publications_.array() < 0).any())
    throw Error(ErrorCode::NegativeCount, "negative publication count");

  std::set<std::string> seen;
  region_of_.reserve(countries_.size());
  for (const auto& c : countries_) {
    if (!seen.insert(c.code).second)
      throw Error(ErrorCode::InvalidInput, "duplicate country code '" + c.code + "'");
    auto it = std::find(regions_.begin(), regions_.end(), c.region);
    if (it == regions_.end())
      throw Error(ErrorCode::UnknownRegion,
                  "country '" + c.code + "' has undeclared region '" + c.region + "'");
    region_of_.push_back(static_cast<int>(it - regions_.begin()));
  }
  for (const auto& m : collaborations_) {
    if (m.rows() != n || m.cols() != n)
      throw Error(ErrorCode::InvalidInput, "collaboration matrix has wrong shape");
    if ((m.array() < 0).any()) throw Error(ErrorCode::NegativeCount, "negative collaboration count");
    if (m != m.transpose()) throw Error(ErrorCode::InvalidInput, "collaboration matrix not symmetric");
    if ((m.diagonal().array() != 0).any())
      throw Error(ErrorCode::InvalidInput, "collaboration matrix has non-zero diagonal");
  }
}

std::optional<std::size_t> PanelDataset::country_index(const std::string& code) const {
  for (std::size_t i = 0; i < countries_.size(); ++i)
    if (countries_[i].code == code) return i;
  return std::nullopt;
}

std::optional<std::size_t> PanelDataset::period_index(const std::string& label) const {
  for (std::size_t t = 0; t < periods_.size(); ++t)
    if (periods_[t].label == label) return t;
  return std::nullopt;
}

std::size_t PanelDataset::require_period(const std::string& label) const {
  auto t = period_index(label);
  if (!t) throw Error(ErrorCode::InvalidInput, "unknown period '" + label + "'");
  return *t;
}

bool PanelDataset::operator==(const PanelDataset& other) const {
  return regions_ == other.regions_ && countries_ == other.countries_ &&
         periods_ == other.periods_ && publications_ == other.publications_ &&
         collaborations_ == other.collaborations_;
}

std::vector<PeriodSpec> default_periods() {
  std::vector<PeriodSpec> periods;
  for (int start = 1970; start <= 2015; start += 5) {
    const int end = start == 2015 ? 2018 : start + 4;
    periods.push_back({std::to_string(start) + "-" + std::to_string(end), start, end});
  }
  return periods;
}

std::vector<std::string> default_regions() {
  return {"Africa", "America", "Asia", "Europe", "Oceania"};
}

void validate_periods(const std::vector<PeriodSpec>& periods) {
  if (periods.empty()) throw Error(ErrorCode::InvalidInput, "no periods defined");
  std::set<std::string> labels;
  for (std::size_t t = 0; t < periods.size(); ++t) {
    const auto& p = periods[t];
    if (p.start_year > p.end_year)
      throw Error(ErrorCode::InvalidInput, "period '" + p.label + "' ends before it starts");
    if (!labels.insert(p.label).second)
      throw Error(ErrorCode::InvalidInput, "duplicate period label '" + p.label + "'");
    if (t > 0 && p.start_year <= periods[t - 1].end_year)
      throw Error(ErrorCode::InvalidInput,
                  "period '" + p.label + "' overlaps or precedes '" + periods[t - 1].label + "'");
  }
}

LoadResult load_panel(const std::filesystem::path& publications_file,
                      const std::filesystem::path& collaborations_file,
                      const std::filesystem::path& metadata_file,
                      const std::vector<PeriodSpec>& periods,
                      const std::vector<std::string>& regions) {
  validate_periods(periods);
  LoadReport report;

  const auto meta = csv::read_file(metadata_file);
  expect_header(meta, {"country_code", "name", "region"}, metadata_file);
  std::vector<CountryRecord> countries;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t r = 0; r < meta.rows.size(); ++r) {
    const auto& row = meta.rows[r];
    if (row.size() != 3)
      throw Error(ErrorCode::InvalidInput, where(metadata_file, meta.line_numbers[r]) + ": expected 3 fields");
    if (row[0].empty())
      throw Error(ErrorCode::InvalidInput, where(metadata_file, meta.line_numbers[r]) + ": empty country code");
    if (std::find(regions.begin(), regions.end(), row[2]) == regions.end())
      throw Error(ErrorCode::UnknownRegion, where(metadata_file, meta.line_numbers[r]) +
                                                ": unknown region '" + row[2] + "' for '" + row[0] + "'");
    if (!index.emplace(row[0], countries.size()).second)
      throw Error(ErrorCode::InvalidInput, where(metadata_file, meta.line_numbers[r]) +
                                               ": duplicate country code '" + row[0] + "'");
    countries.push_back({row[0], row[1], row[2]});
  }

  const auto n = static_cast<Eigen::Index>(countries.size());
  const auto n_periods = static_cast<Eigen::Index>(periods.size());

  auto resolve = [&](const std::string& code, const std::filesystem::path& file, std::size_t line) {
    auto it = index.find(code);
    if (it == index.end())
      throw Error(ErrorCode::MissingCountry,
                  where(file, line) + ": country '" + code + "' not in metadata");
    return static_cast<Eigen::Index>(it->second);
  };
  auto bucket = [&](long long year) -> std::optional<Eigen::Index> {
    for (std::size_t t = 0; t < periods.size(); ++t)
      if (periods[t].contains(static_cast<int>(year))) return static_cast<Eigen::Index>(t);
    return std::nullopt;
  };
  std::set<long long> dropped_years;

  CountMatrix publications = CountMatrix::Zero(n, n_periods);
  const auto pubs = csv::read_file(publications_file);
  expect_header(pubs, {"year", "country_code", "count"}, publications_file);
  std::set<std::pair<long long, std::string>> pub_keys;
  for (std::size_t r = 0; r < pubs.rows.size(); ++r) {
    const auto& row = pubs.rows[r];
    const auto line = pubs.line_numbers[r];
    if (row.size() != 3)
      throw Error(ErrorCode::InvalidInput, where(publications_file, line) + ": expected 3 fields");
    const long long year = csv::parse_integer(row[0], "year");
    const long long count = csv::parse_integer(row[2], "count");
    if (count < 0)
      throw Error(ErrorCode::NegativeCount, where(publications_file, line) + ": negative count");
    const auto i = resolve(row[1], publications_file, line);
    auto t = bucket(year);
    if (!t) {
      ++report.dropped_rows;
      dropped_years.insert(year);
      continue;
    }
    if (!pub_keys.emplace(year, row[1]).second) ++report.duplicate_rows;
    publications(i, *t) += count;
  }

  std::vector<CountMatrix> collaborations(periods.size(), CountMatrix::Zero(n, n));
  const auto collabs = csv::read_file(collaborations_file);
  expect_header(collabs, {"year", "country_a", "country_b", "count"}, collaborations_file);
  if (collabs.rows.empty())
    report.warnings.push_back("collaborations file '" + collaborations_file.string() +
                              "' has no rows; all collaboration matrices are zero");
  std::set<std::tuple<long long, Eigen::Index, Eigen::Index>> pair_keys;
  for (std::size_t r = 0; r < collabs.rows.size(); ++r) {
    const auto& row = collabs.rows[r];
    const auto line = collabs.line_numbers[r];
    if (row.size() != 4)
      throw Error(ErrorCode::InvalidInput, where(collaborations_file, line) + ": expected 4 fields");
    const long long year = csv::parse_integer(row[0], "year");
    const long long count = csv::parse_integer(row[3], "count");
    if (count < 0)
      throw Error(ErrorCode::NegativeCount, where(collaborations_file, line) + ": negative count");
    const auto a = resolve(row[1], collaborations_file, line);
    const auto b = resolve(row[2], collaborations_file, line);
    if (a == b)
      throw Error(ErrorCode::InvalidInput,
                  where(collaborations_file, line) + ": self-collaboration row for '" + row[1] + "'");
    auto t = bucket(year);
    if (!t) {
      ++report.dropped_rows;
      dropped_years.insert(year);
      continue;
    }
    if (!pair_keys.emplace(year, std::min(a, b), std::max(a, b)).second) ++report.duplicate_rows;
    collaborations[*t](a, b) += count;
    collaborations[*t](b, a) += count;
  }

  for (long long year : dropped_years)
    report.warnings.push_back("rows for year " + std::to_string(year) +
                              " fall outside every period and were dropped");
  if (report.duplicate_rows > 0)
    report.warnings.push_back(std::to_string(report.duplicate_rows) +
                              " duplicate rows were summed");

  return {PanelDataset(regions, std::move(countries), periods, std::move(publications),
                       std::move(collaborations)),
          std::move(report)};
}

MergeMap read_merge_map(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(csv::read_text(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, "'" + path.string() + "': " + e.what());
  }
  if (!doc.is_object())
    throw Error(ErrorCode::InvalidInput, "'" + path.string() + "': merge map must be a JSON object");
  MergeMap map;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!it.value().is_string())
      throw Error(ErrorCode::InvalidInput, "'" + path.string() + "': merge target for '" +
                                               it.key() + "' must be a string");
    map[it.key()] = it.value().get<std::string>();
  }
  return map;
}

MergeResult merge_entities(const PanelDataset& dataset, const MergeMap& merge_map) {
  const std::size_t n = dataset.n_countries();
  auto has_data = [&](std::size_t i) {
    if ((dataset.publications().row(static_cast<Eigen::Index>(i)).array() != 0).any()) return true;
    for (const auto& m : dataset.collaborations())
      if ((m.row(static_cast<Eigen::Index>(i)).array() != 0).any()) return true;
    return false;
  };

  std::vector<std::size_t> target(n);
  for (std::size_t i = 0; i < n; ++i) target[i] = i;
  std::set<std::size_t> targets;
  for (const auto& [from, to] : merge_map) {
    auto src = dataset.country_index(from);
    if (!src) continue;  // code not present in this dataset
    auto dst = dataset.country_index(to);
    if (!dst) throw Error(ErrorCode::MissingCountry, "merge target '" + to + "' has no metadata record");
    target[*src] = *dst;
    targets.insert(*dst);
  }
  for (std::size_t t : targets) {
    const auto& code = dataset.countries()[t].code;
    auto self = merge_map.find(code);
    if (self != merge_map.end() && self->second != code)
      throw Error(ErrorCode::MergeCollision,
                  "'" + code + "' is a merge target but is itself mapped to '" + self->second + "'");
    if (self == merge_map.end() && has_data(t))
      throw Error(ErrorCode::MergeCollision,
                  "merge target '" + code + "' is an existing country with data; map it to itself to "
                  "include it in the group");
  }

  std::vector<std::size_t> kept;
  std::vector<Eigen::Index> new_index(n, -1);
  for (std::size_t i = 0; i < n; ++i)
    if (target[i] == i) {
      new_index[i] = static_cast<Eigen::Index>(kept.size());
      kept.push_back(i);
    }
  const auto m = static_cast<Eigen::Index>(kept.size());
  const auto n_periods = static_cast<Eigen::Index>(dataset.n_periods());

  std::vector<CountryRecord> countries;
  for (auto i : kept) countries.push_back(dataset.countries()[i]);

  CountMatrix publications = CountMatrix::Zero(m, n_periods);
  for (std::size_t i = 0; i < n; ++i)
    publications.row(new_index[target[i]]) += dataset.publications().row(static_cast<Eigen::Index>(i));

  std::int64_t dropped = 0;
  std::vector<CountMatrix> collaborations;
  for (const auto& old : dataset.collaborations()) {
    CountMatrix merged = CountMatrix::Zero(m, m);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const auto w = old(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        if (w == 0) continue;
        const auto a = new_index[target[i]];
        const auto b = new_index[target[j]];
        if (a == b) {
          if (i < j) dropped += w;
        } else {
          merged(a, b) += w;
        }
      }
    collaborations.push_back(std::move(merged));
  }

  return {PanelDataset(dataset.regions(), std::move(countries), dataset.periods(),
                       std::move(publications), std::move(collaborations)),
          dropped};
}

PanelDataset select_countries(const PanelDataset& dataset, const std::vector<std::size_t>& keep) {
  const auto m = static_cast<Eigen::Index>(keep.size());
  std::vector<CountryRecord> countries;
  CountMatrix publications(m, static_cast<Eigen::Index>(dataset.n_periods()));
  for (Eigen::Index a = 0; a < m; ++a) {
    countries.push_back(dataset.countries().at(keep[a]));
    publications.row(a) = dataset.publications().row(static_cast<Eigen::Index>(keep[a]));
  }
  std::vector<CountMatrix> collaborations;
  for (const auto& old : dataset.collaborations()) {
    CountMatrix sub(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = 0; b < m; ++b)
        sub(a, b) = old(static_cast<Eigen::Index>(keep[a]), static_cast<Eigen::Index>(keep[b]));
    collaborations.push_back(std::move(sub));
  }
  return PanelDataset(dataset.regions(), std::move(countries), dataset.periods(),
                      std::move(publications), std::move(collaborations));
}

PanelDataset filter_min_production(const PanelDataset& dataset, std::int64_t threshold) {
  if (threshold < 0) throw Error(ErrorCode::InvalidInput, "production threshold must be >= 0");
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < dataset.n_countries(); ++i)
    if ((dataset.publications().row(static_cast<Eigen::Index>(i)).array() > threshold).all())
      keep.push_back(i);
  if (keep.size() < 2)
    throw Error(ErrorCode::TooFewCountries,
                std::to_string(keep.size()) + " countries exceed " + std::to_string(threshold) +
                    " publications in every period; at least 2 are required");
  return select_countries(dataset, keep);
}

std::string export_dataset_json(const PanelDataset& dataset) {
  json doc;
  doc["regions"] = dataset.regions();
  doc["countries"] = json::array();
  for (const auto& c : dataset.countries())
    doc["countries"].push_back({{"code", c.code}, {"name", c.name}, {"region", c.region}});
  doc["periods"] = json::array();
  for (const auto& p : dataset.periods())
    doc["periods"].push_back({{"label", p.label}, {"start_year", p.start_year}, {"end_year", p.end_year}});

  auto rows = [](const CountMatrix& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
      out.push_back(std::move(row));
    }
    return out;
  };
  doc["publications"] = rows(dataset.publications());
  doc["collaborations"] = json::array();
  for (const auto& m : dataset.collaborations()) doc["collaborations"].push_back(rows(m));
  return doc.dump(1) + "\n";
}

PanelDataset import_dataset_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    auto regions = doc.at("regions").get<std::vector<std::string>>();
    std::vector<CountryRecord> countries;
    for (const auto& c : doc.at("countries"))
      countries.push_back({c.at("code").get<std::string>(), c.at("name").get<std::string>(),
                           c.at("region").get<std::string>()});
    std::vector<PeriodSpec> periods;
    for (const auto& p : doc.at("periods"))
      periods.push_back({p.at("label").get<std::string>(), p.at("start_year").get<int>(),
                         p.at("end_year").get<int>()});
    auto matrix = [](const json& rows, Eigen::Index r, Eigen::Index c) {
      if (rows.size() != static_cast<std::size_t>(r))
        throw Error(ErrorCode::InvalidInput, "dataset JSON: matrix has wrong row count");
      CountMatrix m(r, c);
      for (Eigen::Index i = 0; i < r; ++i) {
        const auto& row = rows.at(static_cast<std::size_t>(i));
        if (row.size() != static_cast<std::size_t>(c))
          throw Error(ErrorCode::InvalidInput, "dataset JSON: matrix has wrong column count");
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = row.at(static_cast<std::size_t>(j)).get<std::int64_t>();
      }
      return m;
    };
    const auto n = static_cast<Eigen::Index>(countries.size());
    const auto t = static_cast<Eigen::Index>(periods.size());
    CountMatrix publications = matrix(doc.at("publications"), n, t);
    std::vector<CountMatrix> collaborations;
    for (const auto& m : doc.at("collaborations")) collaborations.push_back(matrix(m, n, n));
    return PanelDataset(std::move(regions), std::move(countries), std::move(periods),
                        std::move(publications), std::move(collaborations));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("dataset JSON: ") + e.what());
  }
}

}  // namespace regnet
