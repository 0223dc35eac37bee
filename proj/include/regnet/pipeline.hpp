#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "regnet/communities.hpp"
#include "regnet/data_model.hpp"
#include "regnet/diagnostics.hpp"
#include "regnet/partition_metrics.hpp"
#include "regnet/profiles.hpp"
#include "regnet/significance.hpp"

namespace regnet {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr std::int64_t kDefaultMinPublications = 100;

struct PipelineConfig {
  std::filesystem::path publications;
  std::filesystem::path collaborations;
  std::filesystem::path metadata;
  std::optional<std::filesystem::path> merge_map;
  std::vector<std::string> regions = default_regions();
  std::vector<PeriodSpec> periods = default_periods();
  std::int64_t min_publications = kDefaultMinPublications;
  std::vector<double> taus = default_taus();
  int runs = 100;
  std::uint64_t seed = 0;
  double cutoff = kDefaultEdgeCutoff;
  double flow_threshold = kDefaultFlowThreshold;
  int max_clusters = kDefaultMaxClusters;
  double smoothing = kDefaultSmoothing;
  std::vector<double> scan_taus;  // empty: no resolution scan in `run`
  int scan_runs = 10;
  bool use_significance_weights = false;
  bool continental_candidate = false;
  ExportFormat network_format = ExportFormat::Csv;
  int threads = 1;  // execution only; never affects outputs
};

// Relative input paths are resolved against `base_dir`.
PipelineConfig parse_pipeline_config(const std::string& text, const std::filesystem::path& base_dir);
PipelineConfig load_pipeline_config(const std::filesystem::path& file);

// The analytical parameters as canonical JSON (threads excluded).
std::string parameters_json(const PipelineConfig& config);

// Eleven Markov times spaced geometrically from 0.5 to 2.
std::vector<double> default_scan_taus();

// Independent seed for stream `stream` under the top-level seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

struct PreparedPanel {
  PanelDataset dataset;  // merged and filtered
  LoadReport report;
  std::size_t countries_loaded = 0;
  std::size_t countries_merged = 0;
  std::vector<std::string> filtered_out;
};

// ingest, then merge, then the minimum-production filter.
PreparedPanel prepare_panel(const PipelineConfig& config);

// Collects written files and their SHA-256 digests, keyed by path relative
// to the output root.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path root) : root_(std::move(root)) {}

  void write(const std::string& relative, std::string_view text);
  // Registers a file some other writer already put under the root.
  void adopt(const std::string& relative);
  const std::filesystem::path& root() const { return root_; }
  const std::map<std::string, std::string>& digests() const { return digests_; }
  // Digest over every (path, digest) pair in path order.
  std::string combined_digest() const;

 private:
  std::filesystem::path root_;
  std::map<std::string, std::string> digests_;
};

void write_ingest_outputs(const PreparedPanel& panel, OutputSet& out);
void write_profile_outputs(const PanelDataset& dataset, int max_clusters, OutputSet& out);
// fig4_entropy and fig6_strength.
void write_entropy_outputs(const PanelDataset& dataset, OutputSet& out);
void write_network_outputs(const PanelDataset& dataset, const std::vector<std::size_t>& periods, double cutoff,
                           ExportFormat format, OutputSet& out);

struct CommunitySettings {
  std::vector<double> taus = default_taus();
  int runs = 100;
  std::uint64_t seed = 0;
  int threads = 1;
  bool use_significance_weights = false;
  bool continental_candidate = false;
};

struct CommunityTable {
  std::vector<double> taus;
  std::vector<std::size_t> periods;
  std::vector<std::vector<StabilityResult>> results;  // [tau][period]
  std::vector<Adjacency> networks;                   // per period
};

Adjacency community_network(const PanelDataset& dataset, std::size_t period, bool use_significance_weights);

// Optimises every (tau, period) pair; pair (k, t) uses
// derive_seed(seed, k * n_periods + t) as its base seed.
CommunityTable detect_communities(const PanelDataset& dataset, const std::vector<std::size_t>& periods,
                                  const CommunitySettings& settings);

// The partition with zero-strength countries moved to Partition::kAbsent.
Partition present_view(const Partition& partition, const Adjacency& network);

void write_community_outputs(const PanelDataset& dataset, const CommunityTable& table, OutputSet& out);
void write_comparison_outputs(const PanelDataset& dataset, const CommunityTable& table, double flow_threshold,
                              OutputSet& out);
void write_scan_outputs(const PanelDataset& dataset, const std::vector<std::size_t>& periods,
                        const std::vector<double>& taus, int runs, std::uint64_t seed, int threads,
                        bool use_significance_weights, OutputSet& out);
void write_kl_outputs(const PanelDataset& dataset, double smoothing, OutputSet& out);

struct RunSummary {
  std::filesystem::path manifest;
  std::string analysis_digest;
  std::map<std::string, std::string> outputs;
};

// Every stage in order, each bundle under its own directory, then
// manifest.json. Stage failures are rethrown with the stage name prefixed.
RunSummary run_pipeline(const PipelineConfig& config, const std::filesystem::path& out_dir);

}  // namespace regnet
