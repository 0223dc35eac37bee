#include "regnet/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <functional>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "regnet/csv.hpp"
#include "regnet/digest.hpp"
#include "regnet/diversity.hpp"
#include "regnet/error.hpp"

namespace regnet {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string fmt(double v) { return csv::format_double(v); }

std::string fmt(const std::optional<double>& v) { return v ? csv::format_double(*v) : "NA"; }

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string dump(const json& doc) { return doc.dump(1) + "\n"; }

std::string tau_tag(double tau) { return "tau" + fmt(tau); }

json series_json(const RegionSeries& series) {
  json doc;
  doc["regions"] = series.regions;
  doc["periods"] = series.periods;
  doc["mean"] = json::object();
  doc["support"] = json::object();
  for (std::size_t r = 0; r < series.regions.size(); ++r) {
    json mean = json::array(), support = json::array();
    for (std::size_t t = 0; t < series.periods.size(); ++t) {
      mean.push_back(number_or_null(series.mean(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(t))));
      support.push_back(series.support(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(t)));
    }
    doc["mean"][series.regions[r]] = std::move(mean);
    doc["support"][series.regions[r]] = std::move(support);
  }
  doc["flags"] = series.flags;
  return doc;
}

std::string matrix_csv(const Matrix<double>& m, const std::vector<std::string>& rows,
                       const std::vector<std::string>& cols, std::string_view corner) {
  std::ostringstream out;
  out << corner;
  for (const auto& c : cols) out << ',' << csv::quote_if_needed(c);
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << csv::quote_if_needed(rows[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << fmt(m(i, j));
    out << '\n';
  }
  return out.str();
}

std::vector<std::string> country_codes(const PanelDataset& d) {
  std::vector<std::string> codes;
  for (const auto& c : d.countries()) codes.push_back(c.code);
  return codes;
}

std::vector<std::string> period_labels(const PanelDataset& d) {
  std::vector<std::string> labels;
  for (const auto& p : d.periods()) labels.push_back(p.label);
  return labels;
}

std::vector<std::size_t> all_periods(const PanelDataset& d) {
  std::vector<std::size_t> periods(d.n_periods());
  for (std::size_t t = 0; t < periods.size(); ++t) periods[t] = t;
  return periods;
}

template <typename Body>
auto stage(const char* name, Body&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.code(), std::string("stage ") + name + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::Io, std::string("stage ") + name + ": " + e.what());
  }
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::string format_name(ExportFormat f) { return f == ExportFormat::Gexf ? "gexf-like" : "csv"; }

ExportFormat parse_format(const std::string& s) {
  if (s == "csv") return ExportFormat::Csv;
  if (s == "gexf-like" || s == "gexf") return ExportFormat::Gexf;
  throw Error(ErrorCode::Config, "unknown network export format '" + s + "'");
}

void check_taus(const std::vector<double>& taus, const char* what) {
  for (double t : taus)
    if (!(t > 0.0) || !std::isfinite(t)) throw Error(ErrorCode::Config, std::string(what) + " must be positive");
}

}  // namespace

std::vector<double> default_scan_taus() {
  std::vector<double> taus;
  for (int k = 0; k <= 10; ++k) taus.push_back(0.5 * std::pow(4.0, k / 10.0));
  return taus;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finaliser over a stream-separated state
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

PipelineConfig parse_pipeline_config(const std::string& text, const fs::path& base_dir) {
  PipelineConfig c;
  try {
    const json doc = json::parse(text);
    const auto& inputs = doc.at("inputs");
    auto resolve = [&](const std::string& p) {
      const fs::path path(p);
      return path.is_absolute() ? path : base_dir / path;
    };
    c.publications = resolve(inputs.at("publications").get<std::string>());
    c.collaborations = resolve(inputs.at("collaborations").get<std::string>());
    c.metadata = resolve(inputs.at("metadata").get<std::string>());
    if (inputs.contains("merge_map") && !inputs.at("merge_map").is_null())
      c.merge_map = resolve(inputs.at("merge_map").get<std::string>());
    if (doc.contains("regions")) c.regions = doc.at("regions").get<std::vector<std::string>>();
    if (doc.contains("periods")) {
      c.periods.clear();
      for (const auto& p : doc.at("periods"))
        c.periods.push_back({p.at("label").get<std::string>(), p.at("start_year").get<int>(),
                             p.at("end_year").get<int>()});
    }
    c.min_publications = doc.value("min_publications", c.min_publications);
    if (doc.contains("taus")) c.taus = doc.at("taus").get<std::vector<double>>();
    c.runs = doc.value("runs", c.runs);
    c.seed = doc.value("seed", c.seed);
    c.cutoff = doc.value("cutoff", c.cutoff);
    c.flow_threshold = doc.value("flow_threshold", c.flow_threshold);
    c.max_clusters = doc.value("max_clusters", c.max_clusters);
    c.smoothing = doc.value("smoothing", c.smoothing);
    if (doc.contains("scan_taus")) c.scan_taus = doc.at("scan_taus").get<std::vector<double>>();
    c.scan_runs = doc.value("scan_runs", c.scan_runs);
    c.use_significance_weights = doc.value("use_significance_weights", c.use_significance_weights);
    c.continental_candidate = doc.value("continental_candidate", c.continental_candidate);
    if (doc.contains("network_format")) c.network_format = parse_format(doc.at("network_format").get<std::string>());
    c.threads = doc.value("threads", c.threads);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, std::string("pipeline config: ") + e.what());
  }
  validate_periods(c.periods);
  if (c.taus.empty()) throw Error(ErrorCode::Config, "taus must not be empty");
  check_taus(c.taus, "taus");
  check_taus(c.scan_taus, "scan_taus");
  if (c.runs < 1) throw Error(ErrorCode::Config, "runs must be >= 1");
  if (c.scan_runs < 2) throw Error(ErrorCode::Config, "scan_runs must be >= 2");
  if (c.threads < 1) throw Error(ErrorCode::Config, "threads must be >= 1");
  if (c.max_clusters < 1) throw Error(ErrorCode::Config, "max_clusters must be >= 1");
  if (c.min_publications < 0) throw Error(ErrorCode::Config, "min_publications must be >= 0");
  return c;
}

PipelineConfig load_pipeline_config(const fs::path& file) {
  return parse_pipeline_config(csv::read_text(file), file.parent_path());
}

std::string parameters_json(const PipelineConfig& c) {
  json doc;
  doc["regions"] = c.regions;
  doc["periods"] = json::array();
  for (const auto& p : c.periods)
    doc["periods"].push_back({{"label", p.label}, {"start_year", p.start_year}, {"end_year", p.end_year}});
  doc["min_publications"] = c.min_publications;
  doc["taus"] = c.taus;
  doc["runs"] = c.runs;
  doc["seed"] = c.seed;
  doc["cutoff"] = c.cutoff;
  doc["flow_threshold"] = c.flow_threshold;
  doc["max_clusters"] = c.max_clusters;
  doc["smoothing"] = c.smoothing;
  doc["scan_taus"] = c.scan_taus;
  doc["scan_runs"] = c.scan_runs;
  doc["use_significance_weights"] = c.use_significance_weights;
  doc["continental_candidate"] = c.continental_candidate;
  doc["network_format"] = format_name(c.network_format);
  return dump(doc);
}

PreparedPanel prepare_panel(const PipelineConfig& config) {
  auto loaded = stage("ingest", [&] {
    return load_panel(config.publications, config.collaborations, config.metadata, config.periods, config.regions);
  });
  const std::size_t n_loaded = loaded.dataset.n_countries();
  PanelDataset merged = stage("merge", [&] {
    if (!config.merge_map) return loaded.dataset;
    auto result = merge_entities(loaded.dataset, read_merge_map(*config.merge_map));
    loaded.report.intra_group_dropped += result.intra_group_dropped;
    return result.dataset;
  });
  const std::size_t n_merged = merged.n_countries();
  PanelDataset filtered = stage("filter", [&] { return filter_min_production(merged, config.min_publications); });

  std::vector<std::string> dropped;
  for (const auto& c : merged.countries())
    if (!filtered.country_index(c.code)) dropped.push_back(c.code);
  return {std::move(filtered), std::move(loaded.report), n_loaded, n_merged, std::move(dropped)};
}

void OutputSet::write(const std::string& relative, std::string_view text) {
  csv::write_text(root_ / relative, text);
  digests_[relative] = sha256_hex(text);
}

void OutputSet::adopt(const std::string& relative) { digests_[relative] = sha256_file(root_ / relative); }

std::string OutputSet::combined_digest() const {
  std::string listing;
  for (const auto& [path, digest] : digests_) listing += path + '\t' + digest + '\n';
  return sha256_hex(listing);
}

void write_ingest_outputs(const PreparedPanel& panel, OutputSet& out) {
  json report;
  report["warnings"] = panel.report.warnings;
  report["dropped_rows"] = panel.report.dropped_rows;
  report["duplicate_rows"] = panel.report.duplicate_rows;
  report["intra_group_dropped"] = panel.report.intra_group_dropped;
  report["countries_loaded"] = panel.countries_loaded;
  report["countries_after_merge"] = panel.countries_merged;
  report["countries_retained"] = panel.dataset.n_countries();
  report["filtered_out"] = panel.filtered_out;
  out.write("ingest/dataset.json", export_dataset_json(panel.dataset));
  out.write("ingest/load_report.json", dump(report));
}

void write_profile_outputs(const PanelDataset& dataset, int max_clusters, OutputSet& out) {
  const auto codes = country_codes(dataset);
  const auto periods = period_labels(dataset);
  const auto abundance = relative_abundance(dataset);
  const auto prevalence = average_prevalence(abundance);
  const auto distances = ks_distance_matrix(prevalence.values);
  const auto clustering = cluster_profiles(distances, max_clusters);
  const auto means = cluster_mean_profiles(prevalence.values, clustering);

  out.write("fig2_profiles/relative_abundance.csv", matrix_csv(abundance.values, codes, periods, "country"));
  out.write("fig2_profiles/average_prevalence.csv", matrix_csv(prevalence.values, codes, periods, "country"));
  out.write("fig2_profiles/ks_distance.csv", matrix_csv(distances, codes, codes, "country"));

  std::ostringstream labels;
  labels << "country,cluster\n";
  for (std::size_t i = 0; i < codes.size(); ++i) labels << csv::quote_if_needed(codes[i]) << ',' << clustering.labels[i] << '\n';
  out.write("fig2_profiles/clusters.csv", labels.str());

  std::ostringstream dendrogram;
  dendrogram << "step,left,right,height\n";
  for (std::size_t s = 0; s < clustering.dendrogram.size(); ++s) {
    const auto& m = clustering.dendrogram[s];
    dendrogram << s << ',' << codes[static_cast<std::size_t>(m.left)] << ',' << codes[static_cast<std::size_t>(m.right)]
               << ',' << fmt(m.height) << '\n';
  }
  out.write("fig2_profiles/dendrogram.csv", dendrogram.str());

  json doc;
  doc["periods"] = periods;
  doc["linkage"] = std::string(to_string(clustering.linkage));
  doc["max_clusters"] = max_clusters;
  doc["n_clusters"] = clustering.n_clusters;
  doc["threshold_r"] = clustering.threshold_r;
  doc["clusters"] = json::array();
  for (int k = 0; k < clustering.n_clusters; ++k) {
    json members = json::array();
    for (std::size_t i = 0; i < codes.size(); ++i)
      if (clustering.labels[i] == k) members.push_back(codes[i]);
    json series = json::array();
    for (Eigen::Index t = 0; t < means.cols(); ++t) series.push_back(means(k, t));
    doc["clusters"].push_back({{"cluster", k}, {"members", members}, {"mean_prevalence", series}});
  }
  out.write("fig2_profiles/cluster_means.json", dump(doc));
}

void write_entropy_outputs(const PanelDataset& dataset, OutputSet& out) {
  const auto entropy = entropy_records(dataset);
  const auto strength = strength_records(dataset);

  std::ostringstream table;
  table << "country,period,ce,ce_in,ce_out,share_in,d_in,d_out,d_prop\n";
  std::vector<SeriesPoint> ce, ce_in, ce_out, share_in, d_prop;
  for (std::size_t r = 0; r < entropy.size(); ++r) {
    const auto& e = entropy[r];
    const auto& s = strength[r];
    table << csv::quote_if_needed(e.country) << ',' << csv::quote_if_needed(e.period) << ',' << fmt(e.ce) << ','
          << fmt(e.ce_in) << ',' << fmt(e.ce_out) << ',' << fmt(e.share_in) << ',' << s.d_in << ',' << s.d_out << ','
          << fmt(s.d_prop) << '\n';
    const std::size_t i = r / dataset.n_periods(), t = r % dataset.n_periods();
    ce.push_back({i, t, e.ce});
    ce_in.push_back({i, t, e.ce_in});
    ce_out.push_back({i, t, e.ce_out});
    share_in.push_back({i, t, e.share_in});
    d_prop.push_back({i, t, s.d_prop});
  }
  out.write("fig4_entropy/entropy.csv", table.str());

  // Final-period scatter of within against outside diversity.
  const std::size_t last = dataset.n_periods() - 1;
  const auto& counts = dataset.collaborations(last);
  std::ostringstream scatter;
  scatter << "country,region,ce_in,ce_out,total_collaborations\n";
  for (std::size_t i = 0; i < dataset.n_countries(); ++i) {
    const auto& e = entropy[i * dataset.n_periods() + last];
    scatter << csv::quote_if_needed(e.country) << ',' << csv::quote_if_needed(dataset.countries()[i].region) << ','
            << fmt(e.ce_in) << ',' << fmt(e.ce_out) << ',' << counts.row(static_cast<Eigen::Index>(i)).sum() << '\n';
  }
  out.write("fig4_entropy/scatter_final_period.csv", scatter.str());

  json means;
  means["ce"] = series_json(region_mean_series(ce, dataset));
  means["ce_in"] = series_json(region_mean_series(ce_in, dataset));
  means["ce_out"] = series_json(region_mean_series(ce_out, dataset));
  means["share_in"] = series_json(region_mean_series(share_in, dataset));
  out.write("fig4_entropy/region_means.json", dump(means));

  std::ostringstream strength_table;
  strength_table << "country,period,d_in,d_out,d_prop\n";
  for (const auto& s : strength)
    strength_table << csv::quote_if_needed(s.country) << ',' << csv::quote_if_needed(s.period) << ',' << s.d_in << ','
                   << s.d_out << ',' << fmt(s.d_prop) << '\n';
  out.write("fig6_strength/strength.csv", strength_table.str());
  json strength_means;
  strength_means["d_prop"] = series_json(region_mean_series(d_prop, dataset));
  out.write("fig6_strength/region_means.json", dump(strength_means));
}

void write_network_outputs(const PanelDataset& dataset, const std::vector<std::size_t>& periods, double cutoff,
                           ExportFormat format, OutputSet& out) {
  std::ostringstream regions;
  regions << "period,region_a,region_b,mean_weight,pairs\n";
  std::ostringstream summary;
  summary << "period,nodes,edges,cutoff\n";
  for (std::size_t t : periods) {
    const auto net = significance_network(dataset, t);
    NodeAttributes attributes;
    for (std::size_t i = 0; i < dataset.n_countries(); ++i) {
      attributes.region.push_back(dataset.countries()[i].region);
      attributes.publications.push_back(dataset.publications()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)));
    }
    const std::string name = "fig3_network/network_" + net.period + (format == ExportFormat::Gexf ? ".gexf" : ".csv");
    export_network(net, cutoff, out.root() / name, format, attributes);
    out.adopt(name);
    summary << csv::quote_if_needed(net.period) << ',' << net.nodes.size() << ','
            << threshold_edges(net, cutoff).size() << ',' << fmt(cutoff) << '\n';

    const auto matrix = continental_mean_weights(net, dataset.region_of(), dataset.regions());
    for (std::size_t a = 0; a < matrix.regions.size(); ++a)
      for (std::size_t b = 0; b < matrix.regions.size(); ++b) {
        const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
        regions << csv::quote_if_needed(net.period) << ',' << csv::quote_if_needed(matrix.regions[a]) << ','
                << csv::quote_if_needed(matrix.regions[b]) << ',' << fmt(matrix.mean(ia, ib)) << ','
                << matrix.pairs(ia, ib) << '\n';
      }
  }
  out.write("fig3_network/region_matrix.csv", regions.str());
  out.write("fig3_network/networks.csv", summary.str());
}

Adjacency community_network(const PanelDataset& dataset, std::size_t period, bool use_significance_weights) {
  if (use_significance_weights) return adjacency_from_significance(significance_network(dataset, period));
  return adjacency_from_counts(dataset, period);
}

CommunityTable detect_communities(const PanelDataset& dataset, const std::vector<std::size_t>& periods,
                                  const CommunitySettings& settings) {
  CommunityTable table{settings.taus, periods, {}, {}};
  for (std::size_t t : periods) table.networks.push_back(community_network(dataset, t, settings.use_significance_weights));
  const Partition continental = continental_partition(dataset);
  for (std::size_t k = 0; k < settings.taus.size(); ++k) {
    std::vector<StabilityResult> row;
    for (std::size_t p = 0; p < periods.size(); ++p) {
      OptimiserOptions options;
      options.runs = settings.runs;
      options.threads = settings.threads;
      options.seed = derive_seed(settings.seed, k * dataset.n_periods() + periods[p]);
      if (settings.continental_candidate) options.candidates.push_back(continental);
      auto result = optimise_partition(table.networks[p], 1.0 / settings.taus[k], options);
      result.partition.period = dataset.periods()[periods[p]].label;
      row.push_back(std::move(result));
    }
    table.results.push_back(std::move(row));
  }
  return table;
}

Partition present_view(const Partition& partition, const Adjacency& network) {
  std::vector<int> labels = partition.labels;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (!network.active(i)) labels[i] = Partition::kAbsent;
  return make_partition(std::move(labels), partition.period);
}

void write_community_outputs(const PanelDataset& dataset, const CommunityTable& table, OutputSet& out) {
  const auto codes = country_codes(dataset);
  json results = json::array();
  for (std::size_t k = 0; k < table.taus.size(); ++k)
    for (std::size_t p = 0; p < table.periods.size(); ++p) {
      const auto& r = table.results[k][p];
      const auto view = present_view(r.partition, table.networks[p]);
      std::ostringstream csv_text;
      csv_text << "country,community\n";
      for (std::size_t i = 0; i < codes.size(); ++i) {
        csv_text << csv::quote_if_needed(codes[i]) << ',';
        if (view.labels[i] == Partition::kAbsent)
          csv_text << "ABSENT";
        else
          csv_text << view.labels[i];
        csv_text << '\n';
      }
      out.write("fig5_communities/partition_" + tau_tag(table.taus[k]) + "_" + r.partition.period + ".csv",
                csv_text.str());
      results.push_back({{"period", r.partition.period},
                         {"tau", r.tau},
                         {"gamma", r.gamma},
                         {"score", r.score},
                         {"n_communities", r.partition.n_communities()},
                         {"labels", r.partition.labels},
                         {"seed", r.seed},
                         {"runs", r.runs},
                         {"best_run_index", r.best_run_index},
                         {"run_scores", r.run_scores}});
    }
  out.write("fig5_communities/stability_results.json", dump(results));
}

void write_comparison_outputs(const PanelDataset& dataset, const CommunityTable& table, double flow_threshold,
                              OutputSet& out) {
  const Partition continental = continental_partition(dataset);
  std::ostringstream adjacent, to_continents, ratios;
  adjacent << "tau,from_period,to_period,nmi\n";
  to_continents << "tau,period,nmi\n";
  ratios << "tau,period,q_detected,q_continental,ratio\n";
  json sankey = {{"threshold", flow_threshold}, {"scales", json::array()}};

  for (std::size_t k = 0; k < table.taus.size(); ++k) {
    const std::string tau = fmt(table.taus[k]);
    std::vector<Partition> views;
    for (std::size_t p = 0; p < table.periods.size(); ++p) {
      const auto& r = table.results[k][p];
      views.push_back(present_view(r.partition, table.networks[p]));
      const std::string& period = r.partition.period;
      to_continents << tau << ',' << csv::quote_if_needed(period) << ',' << fmt(nmi(views.back(), continental)) << '\n';
      const double q_c = linearised_stability(table.networks[p], continental, r.gamma);
      ratios << tau << ',' << csv::quote_if_needed(period) << ',' << fmt(r.score) << ',' << fmt(q_c) << ','
             << fmt(stability_ratio(r.partition, continental, table.networks[p], r.gamma)) << '\n';
      if (p > 0)
        adjacent << tau << ',' << csv::quote_if_needed(views[p - 1].period) << ',' << csv::quote_if_needed(period)
                 << ',' << fmt(nmi(views[p - 1], views[p])) << '\n';
    }
    const auto chart = community_sankey(views, flow_threshold);
    json nodes = json::array(), links = json::array();
    for (const auto& n : chart.nodes)
      nodes.push_back({{"period", n.period},
                       {"community", n.community == Partition::kAbsent ? json("ABSENT") : json(n.community)},
                       {"colour", n.colour},
                       {"size", n.size}});
    for (const auto& l : chart.links)
      links.push_back({{"from_period", l.from_period},
                       {"from_community", l.from_community == Partition::kAbsent ? json("ABSENT") : json(l.from_community)},
                       {"to_period", l.to_period},
                       {"to_community", l.to_community == Partition::kAbsent ? json("ABSENT") : json(l.to_community)},
                       {"jaccard", l.jaccard},
                       {"shared", l.shared}});
    sankey["scales"].push_back({{"tau", table.taus[k]}, {"nodes", nodes}, {"links", links}});
  }
  out.write("fig5_communities/nmi_adjacent.csv", adjacent.str());
  out.write("fig5_communities/nmi_continental.csv", to_continents.str());
  out.write("fig5_communities/stability_ratio.csv", ratios.str());
  out.write("fig5_communities/sankey.json", dump(sankey));
}

void write_scan_outputs(const PanelDataset& dataset, const std::vector<std::size_t>& periods,
                        const std::vector<double>& taus, int runs, std::uint64_t seed, int threads,
                        bool use_significance_weights, OutputSet& out) {
  std::ostringstream text;
  text << "period,tau,gamma,mean_vi,mean_score,mean_communities\n";
  for (std::size_t t : periods) {
    const auto network = community_network(dataset, t, use_significance_weights);
    // Streams above the community-detection range keep scan seeds disjoint.
    const auto points = resolution_scan(network, taus, runs, derive_seed(seed, (1ULL << 32) + t), threads);
    for (const auto& p : points)
      text << csv::quote_if_needed(dataset.periods()[t].label) << ',' << fmt(p.tau) << ',' << fmt(p.gamma) << ','
           << fmt(p.mean_vi) << ',' << fmt(p.mean_score) << ',' << fmt(p.mean_communities) << '\n';
  }
  out.write("fig5_communities/resolution_scan.csv", text.str());
}

void write_kl_outputs(const PanelDataset& dataset, double smoothing, OutputSet& out) {
  const auto records = kl_records(dataset, smoothing);
  std::ostringstream text;
  text << "country,period,kl,smoothing\n";
  for (const auto& r : records)
    text << csv::quote_if_needed(r.country) << ',' << csv::quote_if_needed(r.period) << ',' << fmt(r.kl) << ','
         << fmt(r.smoothing) << '\n';
  out.write("fig7_kl/kl.csv", text.str());
  json doc;
  doc["smoothing"] = smoothing;
  doc["kl"] = series_json(region_mean_kl(records, dataset));
  out.write("fig7_kl/region_means.json", dump(doc));
}

RunSummary run_pipeline(const PipelineConfig& config, const fs::path& out_dir) {
  const std::string started = utc_now();
  OutputSet out(out_dir);
  const auto panel = prepare_panel(config);
  const auto& d = panel.dataset;
  const auto periods = all_periods(d);

  stage("ingest", [&] { write_ingest_outputs(panel, out); });
  stage("profiles", [&] { write_profile_outputs(d, config.max_clusters, out); });
  stage("entropy", [&] { write_entropy_outputs(d, out); });
  stage("significance", [&] { write_network_outputs(d, periods, config.cutoff, config.network_format, out); });
  const auto table = stage("communities", [&] {
    CommunitySettings settings{config.taus, config.runs, config.seed, config.threads, config.use_significance_weights,
                               config.continental_candidate};
    auto result = detect_communities(d, periods, settings);
    write_community_outputs(d, result, out);
    if (!config.scan_taus.empty())
      write_scan_outputs(d, periods, config.scan_taus, config.scan_runs, config.seed, config.threads,
                         config.use_significance_weights, out);
    return result;
  });
  stage("compare", [&] { write_comparison_outputs(d, table, config.flow_threshold, out); });
  stage("kl-div", [&] { write_kl_outputs(d, config.smoothing, out); });

  json manifest;
  manifest["tool"] = "regnet";
  manifest["version"] = std::string(kToolVersion);
  manifest["seed"] = config.seed;
  manifest["parameters"] = json::parse(parameters_json(config));
  manifest["inputs"] = json::object();
  auto add_input = [&](const char* role, const fs::path& path) {
    manifest["inputs"][role] = {{"path", path.string()}, {"sha256", sha256_file(path)}};
  };
  add_input("publications", config.publications);
  add_input("collaborations", config.collaborations);
  add_input("metadata", config.metadata);
  if (config.merge_map) add_input("merge_map", *config.merge_map);
  manifest["outputs"] = out.digests();
  manifest["analysis_digest"] = out.combined_digest();
  manifest["execution"] = {{"started_at", started}, {"finished_at", utc_now()}, {"threads", config.threads}};

  const fs::path manifest_path = out_dir / "manifest.json";
  csv::write_text(manifest_path, dump(manifest));
  return {manifest_path, out.combined_digest(), out.digests()};
}

}  // namespace regnet
