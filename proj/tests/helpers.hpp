#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "regnet/csv.hpp"
#include "regnet/data_model.hpp"

namespace regnet::testing {

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("regnet_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::vector<PeriodSpec> periods(int count, int start = 1970, int length = 5) {
  std::vector<PeriodSpec> out;
  for (int t = 0; t < count; ++t) {
    const int a = start + t * length;
    out.push_back({std::to_string(a) + "-" + std::to_string(a + length - 1), a, a + length - 1});
  }
  return out;
}

// Symmetric, zero-diagonal counts with entries uniform on [0, max_count].
inline CountMatrix random_counts(Eigen::Index n, std::mt19937_64& rng, long long max_count = 20,
                                 double zero_prob = 0.2) {
  std::uniform_int_distribution<long long> count(0, max_count);
  std::bernoulli_distribution zero(zero_prob);
  CountMatrix m = CountMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) m(i, j) = m(j, i) = zero(rng) ? 0 : count(rng);
  return m;
}

// Countries C0..C{n-1} spread round-robin over `n_regions` regions.
inline PanelDataset random_panel(int n, int n_periods, int n_regions, std::mt19937_64& rng) {
  std::vector<std::string> regions;
  for (int r = 0; r < n_regions; ++r) regions.push_back("R" + std::to_string(r));
  std::vector<CountryRecord> countries;
  for (int i = 0; i < n; ++i)
    countries.push_back({"C" + std::to_string(i), "Country " + std::to_string(i), regions[i % n_regions]});
  std::uniform_int_distribution<long long> pubs(101, 5000);
  CountMatrix publications(n, n_periods);
  for (auto& x : publications.reshaped()) x = pubs(rng);
  std::vector<CountMatrix> collab;
  for (int t = 0; t < n_periods; ++t) collab.push_back(random_counts(n, rng));
  return PanelDataset(regions, countries, periods(n_periods), publications, collab);
}

}  // namespace regnet::testing
