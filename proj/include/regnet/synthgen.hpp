#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "regnet/data_model.hpp"
#include "regnet/partition.hpp"

namespace regnet {

enum class ProductionTrend { Stable, Rising, Falling };

struct RegionSpec {
  std::string label;
  int countries = 0;
};

struct SynthConfig {
  std::vector<RegionSpec> regions;
  int periods = 10;
  // Expected collaborations between two countries of unit activity when the
  // regional mixing is neutral.
  double base_rate = 1.0;
  // Expected fraction of all collaborations that stay inside a region, one
  // value per period.
  std::vector<double> within_mix;
  // One trend per country (region order); empty means all stable.
  std::vector<ProductionTrend> production_profile;
  double publication_rate = 1000.0;  // expected publications at unit activity
  double activity_spread = 10.0;     // activities are log-uniform on [1, spread]
  int start_year = 1970;
  int period_length = 5;
  std::uint64_t seed = 0;
};

struct SyntheticPanel {
  PanelDataset dataset;
  std::vector<Partition> planted;      // region membership, one per period
  std::vector<double> activity;        // a_i
  std::vector<double> within_weight;   // block multiplier on same-region means
  std::vector<double> between_weight;  // block multiplier on cross-region means
};

/// Draws a panel whose collaboration counts are independent Poisson variates
/// with degree-corrected block means
///   mu_ij = base_rate * a_i * a_j * (same region ? w_in(t) : w_out(t)),
/// where w_in and w_out put exactly `within_mix[t]` of the expected volume
/// inside regions while keeping the total expected volume fixed.
/// Publications are Poisson with mean publication_rate * a_i * trend(t).
SyntheticPanel generate_panel(const SynthConfig& config);

// The within_mix at which w_in = w_out = 1, i.e. the pure degree-product
// model, for the activities the config's seed produces.
double neutral_within_mix(const SynthConfig& config);

std::string synth_config_to_json(const SynthConfig& config);
SynthConfig synth_config_from_json(const std::string& text);

// Writes publications.csv, collaborations.csv, metadata.csv,
// planted_partition.csv and a pipeline.json that runs on them.
void write_synthetic_panel(const SyntheticPanel& panel, const std::filesystem::path& directory);

}  // namespace regnet
