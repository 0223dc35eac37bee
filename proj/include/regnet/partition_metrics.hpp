#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "regnet/communities.hpp"
#include "regnet/data_model.hpp"
#include "regnet/partition.hpp"

namespace regnet {

// Both metrics ignore nodes labelled kAbsent in either partition and throw
// NodeSetMismatch when the partitions cover different node counts.

/// Normalised mutual information 2 I(X;Y) / (H(X) + H(Y)). When both
/// entropies vanish the result is 1 for identical partitions, else 0.
double nmi(const Partition& x, const Partition& y);

/// Variation of information normalised by log N, in [0, 1].
double variation_of_information(const Partition& x, const Partition& y);

struct FlowRecord {
  std::string from_period;
  int from_community = 0;  // kAbsent for the out-of-period group
  std::string to_period;
  int to_community = 0;
  double jaccard = 0;
  int shared = 0;
};

struct FlowResult {
  std::vector<FlowRecord> flows;        // every pair with a shared member
  std::map<int, int> inherits;          // next-period community -> earlier community
};

inline constexpr double kDefaultFlowThreshold = 0.6;

/// Jaccard overlaps between the communities of two consecutive partitions
/// over a shared universe. A later community inherits an earlier one's
/// colour when their Jaccard index exceeds `threshold`; matches are made
/// greedily by Jaccard, then intersection size, then lower labels, and each
/// earlier community is inherited at most once.
FlowResult jaccard_flows(const Partition& from, const Partition& to, double threshold = kDefaultFlowThreshold);

struct SankeyNode {
  std::string period;
  int community = 0;
  int colour = 0;  // -1 for the absent group
  int size = 0;
};

struct Sankey {
  std::vector<SankeyNode> nodes;
  std::vector<FlowRecord> links;
};

// Chains jaccard_flows across consecutive periods and propagates colours.
Sankey community_sankey(const std::vector<Partition>& partitions, double threshold = kDefaultFlowThreshold);

// Region membership as a partition (labels in region order).
Partition continental_partition(const PanelDataset& dataset);

// Q(x) / Q(c); empty when Q(c) is zero.
std::optional<double> stability_ratio(const Partition& x, const Partition& c, const Adjacency& adjacency, double gamma);

}  // namespace regnet
