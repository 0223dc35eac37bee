#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "regnet/types.hpp"

namespace regnet {

struct CountryRecord {
  std::string code;
  std::string name;
  std::string region;

  bool operator==(const CountryRecord&) const = default;
};

struct PeriodSpec {
  std::string label;
  int start_year = 0;
  int end_year = 0;  // inclusive

  bool contains(int year) const { return year >= start_year && year <= end_year; }
  bool operator==(const PeriodSpec&) const = default;
};

// Country x period publication counts plus one symmetric, zero-diagonal
// collaboration count matrix per period. Immutable once constructed; the
// constructor enforces every structural invariant.
class PanelDataset {
 public:
  PanelDataset(std::vector<std::string> regions, std::vector<CountryRecord> countries,
               std::vector<PeriodSpec> periods, CountMatrix publications,
               std::vector<CountMatrix> collaborations);

  const std::vector<std::string>& regions() const { return regions_; }
  const std::vector<CountryRecord>& countries() const { return countries_; }
  const std::vector<PeriodSpec>& periods() const { return periods_; }
  const CountMatrix& publications() const { return publications_; }
  const CountMatrix& collaborations(std::size_t period) const { return collaborations_.at(period); }
  const std::vector<CountMatrix>& collaborations() const { return collaborations_; }

  std::size_t n_countries() const { return countries_.size(); }
  std::size_t n_periods() const { return periods_.size(); }

  // Region of each country as an index into regions().
  const std::vector<int>& region_of() const { return region_of_; }

  std::optional<std::size_t> country_index(const std::string& code) const;
  std::optional<std::size_t> period_index(const std::string& label) const;
  // Resolves a period label; throws InvalidInput when absent.
  std::size_t require_period(const std::string& label) const;

  bool operator==(const PanelDataset& other) const;

 private:
  std::vector<std::string> regions_;
  std::vector<CountryRecord> countries_;
  std::vector<PeriodSpec> periods_;
  CountMatrix publications_;
  std::vector<CountMatrix> collaborations_;
  std::vector<int> region_of_;
};

struct LoadReport {
  std::vector<std::string> warnings;
  std::int64_t dropped_rows = 0;          // rows outside every period
  std::int64_t duplicate_rows = 0;        // repeated (year, key) rows, summed
  std::int64_t intra_group_dropped = 0;   // collaborations removed by merging
};

struct LoadResult {
  PanelDataset dataset;
  LoadReport report;
};

// 1970-1974, ..., 2010-2014, 2015-2018.
std::vector<PeriodSpec> default_periods();
// Africa, America, Asia, Europe, Oceania.
std::vector<std::string> default_regions();

// Throws InvalidInput unless periods are non-empty, well formed, ordered
// and non-overlapping.
void validate_periods(const std::vector<PeriodSpec>& periods);

// Reads the three input tables and buckets yearly rows into periods. The
// country list is the metadata list in file order.
LoadResult load_panel(const std::filesystem::path& publications_file,
                      const std::filesystem::path& collaborations_file,
                      const std::filesystem::path& metadata_file,
                      const std::vector<PeriodSpec>& periods,
                      const std::vector<std::string>& regions = default_regions());

using MergeMap = std::map<std::string, std::string>;

MergeMap read_merge_map(const std::filesystem::path& path);

struct MergeResult {
  PanelDataset dataset;
  std::int64_t intra_group_dropped = 0;
};

// Collapses each group of codes mapped to the same target into one node that
// keeps the target's metadata and position. Ties inside a group are removed.
MergeResult merge_entities(const PanelDataset& dataset, const MergeMap& merge_map);

// Keeps countries with strictly more than `threshold` publications in every
// period.
PanelDataset filter_min_production(const PanelDataset& dataset, std::int64_t threshold);

// Restriction to the given country indices, in the given order.
PanelDataset select_countries(const PanelDataset& dataset, const std::vector<std::size_t>& keep);

// Canonical JSON document: regions, countries, periods, publications and
// per-period dense row-major collaboration matrices.
std::string export_dataset_json(const PanelDataset& dataset);
PanelDataset import_dataset_json(const std::string& text);

}  // namespace regnet
