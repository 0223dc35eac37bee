#include "regnet/significance.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "regnet/csv.hpp"
#include "regnet/error.hpp"

namespace regnet {

namespace {

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

SignificanceNetwork significance_network(const PanelDataset& dataset, std::size_t period) {
  auto sig = collaboration_significance(dataset.collaborations(period));
  SignificanceNetwork net;
  net.period = dataset.periods().at(period).label;
  for (const auto& c : dataset.countries()) net.nodes.push_back(c.code);
  net.p_hat = significance_transform(sig.s, sig.defined);
  net.s = std::move(sig.s);
  net.defined = std::move(sig.defined);
  return net;
}

std::vector<WeightedEdge> threshold_edges(const SignificanceNetwork& network, double cutoff) {
  if (!(cutoff >= 0.0 && cutoff <= 1.0)) throw Error(ErrorCode::InvalidInput, "edge cutoff must lie in [0, 1]");
  std::vector<WeightedEdge> edges;
  const auto n = network.p_hat.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (network.defined(i, j) && network.p_hat(i, j) > cutoff)
        edges.push_back({static_cast<int>(i), static_cast<int>(j), network.p_hat(i, j)});
  std::stable_sort(edges.begin(), edges.end(),
                   [](const WeightedEdge& a, const WeightedEdge& b) { return a.weight > b.weight; });
  return edges;
}

RegionMatrix continental_mean_weights(const SignificanceNetwork& network, std::span<const int> region_of,
                                      const std::vector<std::string>& regions, bool positive_only) {
  const auto n = network.p_hat.rows();
  if (static_cast<Eigen::Index>(region_of.size()) != n)
    throw Error(ErrorCode::LengthMismatch, "region labels do not match network size");
  const auto r = static_cast<Eigen::Index>(regions.size());
  RegionMatrix out{regions, Matrix<double>::Zero(r, r), Eigen::MatrixXi::Zero(r, r)};
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j || !network.defined(i, j)) continue;
      if (positive_only && !(network.p_hat(i, j) > 0.0)) continue;
      out.mean(region_of[i], region_of[j]) += network.p_hat(i, j);
      out.pairs(region_of[i], region_of[j]) += 1;
    }
  for (Eigen::Index a = 0; a < r; ++a)
    for (Eigen::Index b = 0; b < r; ++b)
      out.mean(a, b) = out.pairs(a, b) > 0 ? out.mean(a, b) / out.pairs(a, b)
                                           : std::numeric_limits<double>::quiet_NaN();
  return out;
}

void write_edge_csv(const SignificanceNetwork& network, const std::vector<WeightedEdge>& edges,
                    const std::filesystem::path& path) {
  std::ostringstream out;
  out << "source,target,weight\n";
  for (const auto& e : edges)
    out << csv::quote_if_needed(network.nodes.at(e.source)) << ',' << csv::quote_if_needed(network.nodes.at(e.target))
        << ',' << csv::format_double(e.weight) << '\n';
  csv::write_text(path, out.str());
}

std::vector<WeightedEdge> read_edge_csv(const std::filesystem::path& path, const std::vector<std::string>& nodes) {
  const auto table = csv::read_file(path);
  if (table.header != std::vector<std::string>{"source", "target", "weight"})
    throw Error(ErrorCode::InvalidInput, "'" + path.string() + "': expected header 'source,target,weight'");
  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) index.emplace(nodes[i], static_cast<int>(i));
  std::vector<WeightedEdge> edges;
  for (const auto& row : table.rows) {
    if (row.size() != 3) throw Error(ErrorCode::InvalidInput, "'" + path.string() + "': expected 3 fields");
    auto a = index.find(row[0]), b = index.find(row[1]);
    if (a == index.end() || b == index.end())
      throw Error(ErrorCode::MissingCountry, "'" + path.string() + "': unknown node in edge " + row[0] + "-" + row[1]);
    edges.push_back({a->second, b->second, csv::parse_double(row[2], "weight")});
  }
  return edges;
}

void write_gexf(const SignificanceNetwork& network, const std::vector<WeightedEdge>& edges,
                const NodeAttributes& attributes, const std::filesystem::path& path) {
  const bool has_region = attributes.region.size() == network.nodes.size();
  const bool has_pubs = attributes.publications.size() == network.nodes.size();
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<gexf xmlns=\"http://gexf.net/1.2\" version=\"1.2\">\n"
      << "  <graph mode=\"static\" defaultedgetype=\"undirected\">\n"
      << "    <attributes class=\"node\">\n"
      << "      <attribute id=\"region\" title=\"region\" type=\"string\"/>\n"
      << "      <attribute id=\"publications\" title=\"publications\" type=\"long\"/>\n"
      << "    </attributes>\n"
      << "    <nodes>\n";
  for (std::size_t i = 0; i < network.nodes.size(); ++i) {
    const auto id = xml_escape(network.nodes[i]);
    out << "      <node id=\"" << id << "\" label=\"" << id << "\">\n        <attvalues>\n";
    if (has_region)
      out << "          <attvalue for=\"region\" value=\"" << xml_escape(attributes.region[i]) << "\"/>\n";
    if (has_pubs)
      out << "          <attvalue for=\"publications\" value=\"" << attributes.publications[i] << "\"/>\n";
    out << "        </attvalues>\n      </node>\n";
  }
  out << "    </nodes>\n    <edges>\n";
  for (std::size_t e = 0; e < edges.size(); ++e)
    out << "      <edge id=\"" << e << "\" source=\"" << xml_escape(network.nodes.at(edges[e].source))
        << "\" target=\"" << xml_escape(network.nodes.at(edges[e].target)) << "\" weight=\""
        << csv::format_double(edges[e].weight) << "\"/>\n";
  out << "    </edges>\n  </graph>\n</gexf>\n";
  csv::write_text(path, out.str());
}

void export_network(const SignificanceNetwork& network, double cutoff, const std::filesystem::path& path,
                    ExportFormat format, const NodeAttributes& attributes) {
  const auto edges = threshold_edges(network, cutoff);
  if (format == ExportFormat::Csv)
    write_edge_csv(network, edges, path);
  else
    write_gexf(network, edges, attributes, path);
}

}  // namespace regnet
