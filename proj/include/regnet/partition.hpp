#pragma once

#include <string>
#include <vector>

namespace regnet {

// Community assignment of every node of one period. Labels are dense
// (0..c-1, numbered by first appearance) except for kAbsent, which marks
// nodes outside the period.
struct Partition {
  static constexpr int kAbsent = -1;

  std::vector<int> labels;
  std::string period;

  std::size_t size() const { return labels.size(); }
  int n_communities() const;
  bool operator==(const Partition&) const = default;
};

// Relabels to dense first-appearance order; kAbsent is kept as is.
Partition make_partition(std::vector<int> labels, std::string period = {});

}  // namespace regnet
