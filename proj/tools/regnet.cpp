// regnet: country collaboration network analysis from the command line.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "regnet/csv.hpp"
#include "regnet/digest.hpp"
#include "regnet/error.hpp"
#include "regnet/pipeline.hpp"
#include "regnet/synthgen.hpp"

namespace fs = std::filesystem;
using regnet::Error;
using regnet::ErrorCode;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out = "regnet_out";
};

struct Source {
  std::string config;
  std::string dataset;
};

void add_source(CLI::App* cmd, Source& src) {
  auto* c = cmd->add_option("--config", src.config, "Pipeline config (JSON)");
  auto* d = cmd->add_option("--dataset", src.dataset, "Canonical dataset JSON written by `ingest`");
  c->excludes(d);
}

regnet::PipelineConfig config_or_default(const Source& src, const Globals& g) {
  regnet::PipelineConfig config;
  if (!src.config.empty()) config = regnet::load_pipeline_config(src.config);
  if (g.seed) config.seed = *g.seed;
  if (g.threads) config.threads = *g.threads;
  if (config.threads < 1) throw Error(ErrorCode::InvalidInput, "--threads must be >= 1");
  return config;
}

regnet::PanelDataset load_dataset(const Source& src, const regnet::PipelineConfig& config) {
  if (!src.dataset.empty()) return regnet::import_dataset_json(regnet::csv::read_text(src.dataset));
  if (src.config.empty()) throw Error(ErrorCode::InvalidInput, "either --config or --dataset is required");
  return regnet::prepare_panel(config).dataset;
}

std::vector<std::size_t> resolve_periods(const regnet::PanelDataset& d, const std::vector<std::string>& labels) {
  std::vector<std::size_t> periods;
  if (labels.empty())
    for (std::size_t t = 0; t < d.n_periods(); ++t) periods.push_back(t);
  for (const auto& l : labels) periods.push_back(d.require_period(l));
  return periods;
}

void write_manifest(const std::string& command, const regnet::OutputSet& out, const regnet::PipelineConfig& config,
                    const Source& src) {
  nlohmann::json m;
  m["tool"] = "regnet";
  m["version"] = std::string(regnet::kToolVersion);
  m["command"] = command;
  m["seed"] = config.seed;
  m["parameters"] = nlohmann::json::parse(regnet::parameters_json(config));
  if (!src.dataset.empty()) m["inputs"]["dataset"] = {{"path", src.dataset}, {"sha256", regnet::sha256_file(src.dataset)}};
  if (!src.config.empty()) m["inputs"]["config"] = {{"path", src.config}, {"sha256", regnet::sha256_file(src.config)}};
  m["outputs"] = out.digests();
  m["analysis_digest"] = out.combined_digest();
  regnet::csv::write_text(out.root() / "manifest.json", m.dump(1) + "\n");
}

int fail(ErrorCode code, const std::string& message) {
  std::cerr << "error: " << regnet::to_string(code) << ": " << message << '\n';
  return static_cast<int>(code);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regional collaboration network analysis"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Top-level random seed");
  app.add_option("--threads", g.threads, "Worker threads (outputs do not depend on it)");
  app.add_option("--out", g.out, "Output directory");
  app.fallthrough();

  Source src;
  std::vector<std::string> periods;
  double cutoff = regnet::kDefaultEdgeCutoff;
  std::string export_format = "csv";
  std::vector<double> taus;
  std::optional<int> runs;
  std::optional<int> max_clusters;
  std::optional<double> smoothing;
  std::optional<double> flow_threshold;
  bool significance_weights = false;
  std::string synth_config;

  auto* ingest = app.add_subcommand("ingest", "Load, merge and filter the input tables");
  ingest->add_option("--config", src.config, "Pipeline config (JSON)")->required();

  auto* profiles = app.add_subcommand("profiles", "Production profiles and KS clustering");
  add_source(profiles, src);
  profiles->add_option("--max-clusters", max_clusters, "Maximum number of clusters");

  auto* entropy = app.add_subcommand("entropy", "Collaboration entropy and strength decompositions");
  add_source(entropy, src);

  auto* significance = app.add_subcommand("significance", "Significance networks and region matrices");
  add_source(significance, src);
  significance->add_option("--period", periods, "Period label (repeatable; default all)");
  significance->add_option("--cutoff", cutoff, "Edge cutoff on p_hat")->capture_default_str();
  significance->add_option("--export", export_format, "Edge list format")
      ->check(CLI::IsMember({"csv", "gexf-like"}))
      ->capture_default_str();

  auto* communities = app.add_subcommand("communities", "Linearised-stability communities");
  add_source(communities, src);
  communities->add_option("--period", periods, "Period label (repeatable; default all)");
  communities->add_option("--tau", taus, "Markov time (repeatable; default 1.0 and 0.76)");
  communities->add_option("--runs", runs, "Optimiser runs per period and tau");
  communities->add_flag("--significance-weights", significance_weights, "Use p_hat weights instead of counts");

  auto* scan = app.add_subcommand("resolution-scan", "Mean variation of information across Markov times");
  add_source(scan, src);
  scan->add_option("--period", periods, "Period label (repeatable; default all)");
  scan->add_option("--tau", taus, "Markov time (repeatable; default geometric grid 0.5..2)");
  scan->add_option("--runs", runs, "Runs per Markov time (>= 2)");
  scan->add_flag("--significance-weights", significance_weights, "Use p_hat weights instead of counts");

  auto* compare = app.add_subcommand("compare", "NMI series, stability ratios and Sankey flows");
  add_source(compare, src);
  compare->add_option("--tau", taus, "Markov time (repeatable; default 1.0 and 0.76)");
  compare->add_option("--runs", runs, "Optimiser runs per period and tau");
  compare->add_option("--flow-threshold", flow_threshold, "Jaccard threshold for colour inheritance");
  compare->add_flag("--significance-weights", significance_weights, "Use p_hat weights instead of counts");

  auto* kl = app.add_subcommand("kl-div", "KL divergence from the configuration model");
  add_source(kl, src);
  kl->add_option("--smoothing", smoothing, "Additive smoothing pseudo-count");

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic panel with planted regions");
  simulate->add_option("--config", synth_config, "Synthetic generator config (JSON)")->required();

  auto* run = app.add_subcommand("run", "Full pipeline");
  run->add_option("--config", src.config, "Pipeline config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(ErrorCode::InvalidInput, e.what());
  }

  try {
    const fs::path out_dir = g.out;

    if (*simulate) {
      auto config = regnet::synth_config_from_json(regnet::csv::read_text(synth_config));
      if (g.seed) config.seed = *g.seed;
      regnet::write_synthetic_panel(regnet::generate_panel(config), out_dir);
      std::cout << out_dir.string() << '\n';
      return 0;
    }

    auto config = config_or_default(src, g);
    if (runs) config.runs = *runs;
    if (max_clusters) config.max_clusters = *max_clusters;
    if (smoothing) config.smoothing = *smoothing;
    if (flow_threshold) config.flow_threshold = *flow_threshold;
    if (significance_weights) config.use_significance_weights = true;
    config.cutoff = cutoff;

    if (*run) {
      const auto summary = regnet::run_pipeline(config, out_dir);
      std::cout << summary.manifest.string() << ' ' << summary.analysis_digest << '\n';
      return 0;
    }

    regnet::OutputSet out(out_dir);
    std::string command;
    if (*ingest) {
      command = "ingest";
      regnet::write_ingest_outputs(regnet::prepare_panel(config), out);
    } else {
      const auto dataset = load_dataset(src, config);
      if (*profiles) {
        command = "profiles";
        regnet::write_profile_outputs(dataset, config.max_clusters, out);
      } else if (*entropy) {
        command = "entropy";
        regnet::write_entropy_outputs(dataset, out);
      } else if (*significance) {
        command = "significance";
        config.network_format = export_format == "gexf-like" ? regnet::ExportFormat::Gexf : regnet::ExportFormat::Csv;
        regnet::write_network_outputs(dataset, resolve_periods(dataset, periods), config.cutoff, config.network_format,
                                      out);
      } else if (*communities || *compare) {
        command = *communities ? "communities" : "compare";
        if (!taus.empty()) config.taus = taus;
        regnet::CommunitySettings settings{config.taus, config.runs, config.seed, config.threads,
                                           config.use_significance_weights, config.continental_candidate};
        const auto table = regnet::detect_communities(dataset, resolve_periods(dataset, periods), settings);
        if (*communities)
          regnet::write_community_outputs(dataset, table, out);
        else
          regnet::write_comparison_outputs(dataset, table, config.flow_threshold, out);
      } else if (*scan) {
        command = "resolution-scan";
        config.scan_taus = taus.empty() ? regnet::default_scan_taus() : taus;
        if (runs) config.scan_runs = *runs;
        if (config.scan_runs < 2) throw Error(ErrorCode::InvalidInput, "--runs must be >= 2 for a resolution scan");
        regnet::write_scan_outputs(dataset, resolve_periods(dataset, periods), config.scan_taus, config.scan_runs,
                                   config.seed, config.threads, config.use_significance_weights, out);
      } else if (*kl) {
        command = "kl-div";
        regnet::write_kl_outputs(dataset, config.smoothing, out);
      }
    }
    write_manifest(command, out, config, src);
    std::cout << (out_dir / "manifest.json").string() << ' ' << out.combined_digest() << '\n';
    return 0;
  } catch (const Error& e) {
    return fail(e.code(), e.what());
  } catch (const std::exception& e) {
    return fail(ErrorCode::Io, e.what());
  }
}
