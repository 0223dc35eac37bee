// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "regnet/communities.hpp"
#include "regnet/diagnostics.hpp"
#include "regnet/diversity.hpp"
#include "regnet/partition_metrics.hpp"
#include "regnet/pipeline.hpp"
#include "regnet/profiles.hpp"
#include "regnet/significance.hpp"
#include "regnet/synthgen.hpp"

using namespace regnet;

namespace {

struct Verdict {
  bool ok = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Matrix<double> random_weights(int n, std::mt19937_64& rng, double density) {
  std::uniform_real_distribution<double> u(0.1, 5.0);
  std::bernoulli_distribution edge(density);
  Matrix<double> w = Matrix<double>::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (edge(rng)) w(i, j) = w(j, i) = u(rng);
  return w;
}

Verdict optimiser_matches_enumeration() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2024);
  int instances = 0, matched = 0, exceeded = 0;
  while (instances < 600) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const auto w = random_weights(n, rng, 0.5);
    if (w.sum() == 0) continue;
    const Adjacency adj(w);
    for (double gamma : {1.0 / 0.76, 1.0, 2.0}) {
      const double best = brute_force_partition(adj, gamma).score;
      const double found = optimise_partition(adj, gamma, {100, static_cast<std::uint64_t>(instances)}).score;
      ++instances;
      if (std::abs(found - best) <= 1e-9) ++matched;
      if (found > best + 1e-9) ++exceeded;
    }
  }
  const double elapsed = seconds_since(start);
  const double rate = static_cast<double>(matched) / instances;
  return {rate >= 0.99 && exceeded == 0 && elapsed < 300,
          std::to_string(instances) + " instances, matched " + num(100 * rate) + "%, exceeded " +
              std::to_string(exceeded) + ", " + num(elapsed) + " s"};
}

long double direct_modularity(const Matrix<double>& a, const std::vector<int>& labels) {
  const auto n = a.rows();
  std::vector<long double> k(n, 0);
  long double two_m = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) k[i] += a(i, j), two_m += a(i, j);
  long double q = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (labels[i] == labels[j]) q += a(i, j) - k[i] * k[j] / two_m;
  return q / two_m;
}

Verdict modularity_identity() {
  std::mt19937_64 rng(7);
  double worst = 0;
  int graphs = 0;
  while (graphs < 300) {
    const int n = 2 + static_cast<int>(rng() % 49);
    const auto w = random_weights(n, rng, 0.05 + 0.9 * std::uniform_real_distribution<double>()(rng));
    if (w.sum() == 0) continue;
    ++graphs;
    std::vector<int> labels(n);
    const int k = 1 + static_cast<int>(rng() % n);
    for (auto& l : labels) l = static_cast<int>(rng() % k);
    const double q = linearised_stability(w, std::span<const int>(labels), 1.0);
    worst = std::max(worst, std::abs(q - static_cast<double>(direct_modularity(w, labels))));
  }
  return {worst <= 1e-12, std::to_string(graphs) + " graphs, max |diff| " + num(worst)};
}

Verdict entropy_exactness() {
  std::mt19937_64 rng(11);
  double worst_split = 0, lo = 1, hi = 0, worst_uniform = 0;
  std::size_t records = 0;
  for (int rep = 0; rep < 40; ++rep) {
    const int n = 3 + static_cast<int>(rng() % 30);
    const auto d = testing::random_panel(n, 3, 1 + static_cast<int>(rng() % 5), rng);
    for (const auto& r : entropy_records(d)) {
      if (!r.ce) continue;
      ++records;
      worst_split = std::max(worst_split, std::abs(*r.ce_in + *r.ce_out - *r.ce));
      lo = std::min(lo, *r.ce);
      hi = std::max(hi, *r.ce);
    }
  }
  for (int n = 3; n <= 60; ++n) {
    CountMatrix c = CountMatrix::Constant(n, n, 7);
    c.diagonal().setZero();
    const auto shares = collab_share(c);
    for (Eigen::Index i = 0; i < n; ++i)
      worst_uniform = std::max(worst_uniform, std::abs(collaboration_entropy(shares.p.row(i), n) - 1.0));
  }
  return {worst_split <= 1e-12 && lo >= 0 && hi <= 1 && worst_uniform <= 1e-12,
          std::to_string(records) + " records, max split error " + num(worst_split) + ", CE range [" + num(lo) +
              ", " + num(hi) + "], uniform error " + num(worst_uniform)};
}

Verdict significance_fixed_point() {
  double worst_s = 0, worst_p = 0;
  int instances = 0;
  auto check = [&](const CountMatrix& c) {
    const auto sig = collaboration_significance(c);
    const auto p = significance_transform(sig.s, sig.defined);
    for (Eigen::Index i = 0; i < c.rows(); ++i)
      for (Eigen::Index j = 0; j < c.cols(); ++j)
        if (i != j && sig.defined(i, j)) {
          worst_s = std::max(worst_s, std::abs(sig.s(i, j) - 1.0));
          worst_p = std::max(worst_p, std::abs(p(i, j)));
        }
    ++instances;
  };
  // n = w w^T has k = w W and 2m = W^2, so k_i k_j / 2m = w_i w_j exactly.
  // A zero diagonal admits no exact fixed point with positive strengths.
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 30);
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> w(n);
    for (auto& x : w) x = 1 + static_cast<std::int64_t>(rng() % 50);
    check(w * w.transpose());
  }
  return {worst_s <= 1e-9 && worst_p == 0.0,
          std::to_string(instances) + " instances, max |s-1| " + num(worst_s) + ", max |p| " + num(worst_p)};
}

Verdict planted_recovery() {
  const auto start = Clock::now();
  constexpr int kPeriods = 10, kSeeds = 20;
  std::vector<std::vector<double>> nmis(kPeriods);
  std::vector<double> final_ratio;
  for (int seed = 0; seed < kSeeds; ++seed) {
    SynthConfig c;
    for (const char* r : {"Africa", "Americas", "Asia", "Europe", "Oceania"}) c.regions.push_back({r, 8});
    c.periods = kPeriods;
    for (int t = 0; t < kPeriods; ++t) c.within_mix.push_back(0.3 + 0.6 * t / (kPeriods - 1));
    c.base_rate = 1.0;
    c.seed = static_cast<std::uint64_t>(seed);
    const auto panel = generate_panel(c);
    const auto continental = continental_partition(panel.dataset);
    for (int t = 0; t < kPeriods; ++t) {
      const auto adj = adjacency_from_counts(panel.dataset, static_cast<std::size_t>(t));
      const auto found = optimise_partition(adj, 1.0, {100, derive_seed(c.seed, static_cast<std::uint64_t>(t))});
      nmis[t].push_back(nmi(found.partition, continental));
      if (t == kPeriods - 1) {
        const auto ratio = stability_ratio(found.partition, continental, adj, 1.0);
        if (ratio) final_ratio.push_back(*ratio);
      }
    }
  }
  std::vector<double> med;
  for (const auto& v : nmis) med.push_back(median(v));
  bool monotone = true;
  for (int t = 1; t < kPeriods; ++t) monotone = monotone && med[t] >= med[t - 1];
  const double ratio = final_ratio.empty() ? std::nan("") : median(final_ratio);
  const double elapsed = seconds_since(start);
  std::string trace;
  for (double m : med) trace += (trace.empty() ? "" : " ") + num(m);
  return {monotone && med.back() > 0.9 && ratio >= 1.0 && ratio <= 1.1 && elapsed < 600,
          "median NMI by period [" + trace + "], final ratio " + num(ratio) + ", " + num(elapsed) + " s"};
}

Verdict information_identities() {
  double worst = 0;
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 40);
    std::vector<int> labels(n);
    for (auto& l : labels) l = static_cast<int>(rng() % (1 + rng() % n));
    const auto x = make_partition(labels);
    if (x.n_communities() > 1) worst = std::max(worst, std::abs(nmi(x, x) - 1.0));
    worst = std::max(worst, std::abs(variation_of_information(x, x)));
    std::vector<int> singletons(n), one(n, 0);
    for (int i = 0; i < n; ++i) singletons[i] = i;
    worst = std::max(worst, std::abs(variation_of_information(make_partition(singletons), make_partition(one)) - 1.0));
  }
  for (int m = 1; m <= 10; ++m) {
    std::vector<int> a, b;
    for (int i = 0; i < 4 * m; ++i) a.push_back((i / (2 * m)) % 2), b.push_back(i % 2);
    worst = std::max(worst, std::abs(nmi(make_partition(a), make_partition(b))));
  }
  return {worst <= 1e-12, "max deviation " + num(worst)};
}

Verdict kl_null_agreement() {
  std::mt19937_64 rng(19);
  double worst_exact = 0, worst_smoothed = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 3 + static_cast<int>(rng() % 30);
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> w(n);
    for (auto& x : w) x = 1 + static_cast<std::int64_t>(rng() % 20);
    const CountMatrix base = w * w.transpose();
    const CountMatrix large = base * 1000;
    for (Eigen::Index i = 0; i < n; ++i) {
      worst_exact = std::max(worst_exact, std::abs(*kl_divergence_to_config(base, i, 0.0)));
      worst_smoothed = std::max(worst_smoothed, *kl_divergence_to_config(large, i, 1.0));
    }
  }
  return {worst_exact <= 1e-9 && worst_smoothed < 1e-3,
          "max |kl| at smoothing 0: " + num(worst_exact) + ", max kl at smoothing 1: " + num(worst_smoothed)};
}

// Prevalence rows (summing to one) following a linear trend of the given slope plus jitter.
Matrix<double> trajectories(const std::vector<double>& slopes, int periods, double jitter, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> noise(-jitter, jitter);
  Matrix<double> p(static_cast<Eigen::Index>(slopes.size()), periods);
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (int t = 0; t < periods; ++t)
      p(i, t) = std::max(1e-6, 1.0 + slopes[i] * (t - (periods - 1) / 2.0) + noise(rng));
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

Verdict profile_recovery() {
  std::mt19937_64 rng(23);
  int two_group_trials = 0, recovered = 0, skipped = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const int a = 3 + static_cast<int>(rng() % 8), b = 3 + static_cast<int>(rng() % 8);
    std::vector<double> slopes;
    for (int i = 0; i < a + b; ++i) slopes.push_back(i < a ? 0.15 : -0.15);
    const auto p = trajectories(slopes, 10, 0.005, rng);
    const auto d = ks_distance_matrix(p);
    double within = 0, between = 1;
    for (int i = 0; i < a + b; ++i)
      for (int j = i + 1; j < a + b; ++j)
        ((i < a) == (j < a) ? within = std::max(within, d(i, j)) : between = std::min(between, d(i, j)));
    if (within > 0.05 || between < 0.3) {
      ++skipped;
      continue;
    }
    ++two_group_trials;
    const auto c = cluster_profiles(d, 2);
    bool exact = c.n_clusters == 2;
    for (int i = 0; i < a + b; ++i) exact = exact && ((c.labels[i] == c.labels[0]) == (i < a));
    recovered += exact;
  }

  int mixed_trials = 0, violations = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SynthConfig c;
    for (const char* r : {"Africa", "Americas", "Asia", "Europe", "Oceania"}) c.regions.push_back({r, 12});
    c.periods = 10;
    c.within_mix.assign(10, 0.6);
    c.seed = seed;
    std::mt19937_64 pick(seed);
    for (int i = 0; i < 60; ++i)
      c.production_profile.push_back(static_cast<ProductionTrend>(pick() % 3));
    const auto panel = generate_panel(c);
    const auto prevalence = average_prevalence(relative_abundance(panel.dataset));
    const auto d = ks_distance_matrix(prevalence.values);
    const auto clustering = cluster_profiles(d, 6);
    ++mixed_trials;
    bool ok = clustering.n_clusters <= 6;
    for (Eigen::Index i = 0; i < d.rows(); ++i)
      for (Eigen::Index j = i + 1; j < d.rows(); ++j)
        if (clustering.labels[i] == clustering.labels[j] && !(d(i, j) < clustering.threshold_r)) ok = false;
    violations += !ok;
  }
  return {two_group_trials >= 50 && recovered == two_group_trials && violations == 0,
          "two-group recovery " + std::to_string(recovered) + "/" + std::to_string(two_group_trials) + " (" +
              std::to_string(skipped) + " draws outside the separation bounds), mixed panels with violations " +
              std::to_string(violations) + "/" + std::to_string(mixed_trials)};
}

Verdict pipeline_determinism() {
  const auto dir = testing::scratch("acceptance_determinism");
  SynthConfig c;
  for (const char* r : {"Africa", "Asia", "Europe"}) c.regions.push_back({r, 6});
  c.periods = 4;
  c.within_mix = {0.4, 0.6, 0.7, 0.8};
  c.base_rate = 2.0;
  c.seed = 3;
  write_synthetic_panel(generate_panel(c), dir / "panel");
  auto config = load_pipeline_config(dir / "panel" / "pipeline.json");
  config.runs = 20;
  config.seed = 99;
  config.scan_taus = {0.8, 1.0, 1.25};
  config.scan_runs = 4;
  const auto a = run_pipeline(config, dir / "a");
  const auto b = run_pipeline(config, dir / "b");
  config.threads = 4;
  const auto t = run_pipeline(config, dir / "threads");
  bool bytes = true;
  for (const auto& [path, digest] : a.outputs)
    bytes = bytes && csv::read_text(dir / "a" / path) == csv::read_text(dir / "b" / path);
  return {bytes && a.analysis_digest == b.analysis_digest && a.analysis_digest == t.analysis_digest,
          std::to_string(a.outputs.size()) + " outputs, digest " + a.analysis_digest.substr(0, 16) +
              (a.analysis_digest == t.analysis_digest ? " (threads 1 and 4 agree)" : " (threads differ)")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"optimiser attains exhaustive optimum", optimiser_matches_enumeration},
      {"modularity identity", modularity_identity},
      {"entropy exactness", entropy_exactness},
      {"significance fixed point", significance_fixed_point},
      {"planted regionalisation recovery", planted_recovery},
      {"information-metric identities", information_identities},
      {"KL null agreement", kl_null_agreement},
      {"KS profile cluster recovery", profile_recovery},
      {"pipeline determinism", pipeline_determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.ok;
    std::printf("%s %zu %s: %s\n", v.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
