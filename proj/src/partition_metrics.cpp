#include "regnet/partition_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

namespace regnet {

namespace {

struct Contingency {
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> x;
  std::map<int, double> y;
  double n = 0;
};

Contingency contingency(const Partition& a, const Partition& b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::NodeSetMismatch, "partitions cover " + std::to_string(a.size()) + " and " +
                                                std::to_string(b.size()) + " nodes");
  Contingency c;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const int la = a.labels[i], lb = b.labels[i];
    if (la == Partition::kAbsent || lb == Partition::kAbsent) continue;
    c.joint[{la, lb}] += 1.0;
    c.x[la] += 1.0;
    c.y[lb] += 1.0;
    c.n += 1.0;
  }
  if (c.n == 0) throw Error(ErrorCode::NodeSetMismatch, "partitions share no present nodes");
  return c;
}

double entropy(const std::map<int, double>& counts, double n) {
  double h = 0;
  for (const auto& [label, count] : counts) {
    const double p = count / n;
    h -= p * std::log(p);
  }
  return h;
}

}  // namespace

double nmi(const Partition& x, const Partition& y) {
  const auto c = contingency(x, y);
  const double hx = entropy(c.x, c.n), hy = entropy(c.y, c.n);
  if (hx + hy == 0.0) {
    // Both are single-community partitions of the same nodes.
    return c.joint.size() == 1 ? 1.0 : 0.0;
  }
  double mi = 0;
  for (const auto& [key, count] : c.joint) {
    const double r = count / c.n;
    mi += r * std::log(r / ((c.x.at(key.first) / c.n) * (c.y.at(key.second) / c.n)));
  }
  return std::clamp(2.0 * mi / (hx + hy), 0.0, 1.0);
}

double variation_of_information(const Partition& x, const Partition& y) {
  const auto c = contingency(x, y);
  if (c.n < 2) throw Error(ErrorCode::InvalidInput, "variation of information needs at least 2 nodes");
  double sum = 0;
  for (const auto& [key, count] : c.joint) {
    const double r = count / c.n;
    sum += r * (std::log(r / (c.x.at(key.first) / c.n)) + std::log(r / (c.y.at(key.second) / c.n)));
  }
  return std::max(0.0, -sum / std::log(c.n));
}

FlowResult jaccard_flows(const Partition& from, const Partition& to, double threshold) {
  if (from.size() != to.size())
    throw Error(ErrorCode::NodeSetMismatch, "flow partitions must share one universe of nodes");
  std::map<std::pair<int, int>, int> shared;
  std::map<int, int> size_from, size_to;
  for (std::size_t i = 0; i < from.size(); ++i) {
    ++shared[{from.labels[i], to.labels[i]}];
    ++size_from[from.labels[i]];
    ++size_to[to.labels[i]];
  }

  FlowResult result;
  for (const auto& [key, count] : shared) {
    const int uni = size_from[key.first] + size_to[key.second] - count;
    result.flows.push_back({from.period, key.first, to.period, key.second, static_cast<double>(count) / uni, count});
  }

  std::vector<const FlowRecord*> matches;
  for (const auto& f : result.flows)
    if (f.jaccard > threshold && f.from_community != Partition::kAbsent && f.to_community != Partition::kAbsent)
      matches.push_back(&f);
  std::sort(matches.begin(), matches.end(), [](const FlowRecord* a, const FlowRecord* b) {
    return std::make_tuple(-a->jaccard, -a->shared, a->from_community, a->to_community) <
           std::make_tuple(-b->jaccard, -b->shared, b->from_community, b->to_community);
  });
  std::set<int> used;
  for (const auto* m : matches) {
    if (used.count(m->from_community) || result.inherits.count(m->to_community)) continue;
    used.insert(m->from_community);
    result.inherits[m->to_community] = m->from_community;
  }
  return result;
}

Sankey community_sankey(const std::vector<Partition>& partitions, double threshold) {
  Sankey sankey;
  std::map<int, int> colour_of;  // community of the previous period -> colour
  int next_colour = 0;
  for (std::size_t t = 0; t < partitions.size(); ++t) {
    const auto& p = partitions[t];
    std::map<int, int> sizes;
    for (int l : p.labels) ++sizes[l];

    std::map<int, int> colours;
    if (t > 0) {
      auto flows = jaccard_flows(partitions[t - 1], p, threshold);
      for (const auto& [to, from] : flows.inherits) colours[to] = colour_of.at(from);
      sankey.links.insert(sankey.links.end(), flows.flows.begin(), flows.flows.end());
    }
    for (const auto& [label, size] : sizes) {
      if (label == Partition::kAbsent)
        colours[label] = -1;
      else if (!colours.count(label))
        colours[label] = next_colour++;
      sankey.nodes.push_back({p.period, label, colours[label], size});
    }
    colour_of = std::move(colours);
  }
  return sankey;
}

Partition continental_partition(const PanelDataset& dataset) {
  // Region index, compacted over the regions that have countries.
  std::vector<int> rank(dataset.regions().size(), 0);
  for (int r : dataset.region_of()) rank[r] = 1;
  for (std::size_t r = 0, next = 0; r < rank.size(); ++r) rank[r] = rank[r] ? static_cast<int>(next++) : -1;
  std::vector<int> labels;
  for (int r : dataset.region_of()) labels.push_back(rank[r]);
  return {std::move(labels), {}};
}

std::optional<double> stability_ratio(const Partition& x, const Partition& c, const Adjacency& adjacency,
                                      double gamma) {
  const double qc = linearised_stability(adjacency, c, gamma);
  if (qc == 0.0) return std::nullopt;
  return linearised_stability(adjacency, x, gamma) / qc;
}

}  // namespace regnet
