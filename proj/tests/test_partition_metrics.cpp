#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "helpers.hpp"
#include "regnet/partition_metrics.hpp"

using namespace regnet;

namespace {

Partition part(std::vector<int> labels, std::string period = {}) { return make_partition(std::move(labels), period); }

Partition random_partition(int n, int k, std::mt19937_64& rng) {
  std::vector<int> l(n);
  for (auto& x : l) x = static_cast<int>(rng() % k);
  return part(l);
}

struct Oracle {
  long double nmi, vi;
};

// Direct evaluation of both formulas from the contingency table.
Oracle oracle(const Partition& x, const Partition& y) {
  const long double n = static_cast<long double>(x.size());
  std::map<int, long double> p, q;
  std::map<std::pair<int, int>, long double> r;
  for (std::size_t i = 0; i < x.size(); ++i) {
    p[x.labels[i]] += 1 / n;
    q[y.labels[i]] += 1 / n;
    r[{x.labels[i], y.labels[i]}] += 1 / n;
  }
  long double hx = 0, hy = 0, mi = 0, vi = 0;
  for (auto [k, v] : p) hx -= v * std::log(v);
  for (auto [k, v] : q) hy -= v * std::log(v);
  for (auto [k, v] : r) {
    mi += v * std::log(v / (p[k.first] * q[k.second]));
    vi += v * (std::log(v / p[k.first]) + std::log(v / q[k.second]));
  }
  return {hx + hy == 0 ? 1.0L : 2 * mi / (hx + hy), -vi / std::log(n)};
}

}  // namespace

TEST_CASE("normalised mutual information") {
  const auto x = part({0, 0, 1, 1});
  const auto y = part({0, 1, 0, 1});
  CHECK(nmi(x, x) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(nmi(x, y)) <= 1e-12);
  CHECK(nmi(part({0, 0, 0}), part({5, 5, 5})) == 1.0);
  CHECK(nmi(part({0, 0, 0}), part({0, 1, 2})) == 0.0);
  CHECK_THROWS_AS(nmi(x, part({0, 1})), Error);

  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 200; ++rep) {
    const auto a = random_partition(8, 1 + static_cast<int>(rng() % 4), rng);
    const auto b = random_partition(8, 1 + static_cast<int>(rng() % 4), rng);
    const auto o = oracle(a, b);
    if (a.n_communities() > 1 || b.n_communities() > 1)
      CHECK(nmi(a, b) == doctest::Approx(static_cast<double>(o.nmi)).epsilon(1e-12));
    CHECK(nmi(a, b) == doctest::Approx(nmi(b, a)).epsilon(1e-15));
    // Relabelling leaves it unchanged.
    std::vector<int> relabelled = a.labels;
    for (auto& l : relabelled) l = 10 - l;
    CHECK(nmi(part(relabelled), b) == doctest::Approx(nmi(a, b)).epsilon(1e-14));
  }
}

TEST_CASE("absent nodes are excluded") {
  const auto x = part({0, 0, 1, 1, Partition::kAbsent});
  const auto y = part({0, 0, 1, 1, 0});
  CHECK(nmi(x, y) == doctest::Approx(1.0));
  CHECK(variation_of_information(x, y) == doctest::Approx(0.0));
}

TEST_CASE("variation of information") {
  const auto x = part({0, 0, 1, 2, 2});
  CHECK(variation_of_information(x, x) == 0.0);
  for (int n : {2, 5, 17}) {
    std::vector<int> singletons(n), one(n, 0);
    for (int i = 0; i < n; ++i) singletons[i] = i;
    CHECK(std::abs(variation_of_information(part(singletons), part(one)) - 1.0) <= 1e-12);
  }
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 200; ++rep) {
    const auto a = random_partition(8, 3, rng), b = random_partition(8, 4, rng), c = random_partition(8, 2, rng);
    CHECK(variation_of_information(a, b) == doctest::Approx(static_cast<double>(oracle(a, b).vi)).epsilon(1e-12));
    CHECK(variation_of_information(a, b) == doctest::Approx(variation_of_information(b, a)).epsilon(1e-14));
    CHECK(variation_of_information(a, c) <= variation_of_information(a, b) + variation_of_information(b, c) + 1e-12);
    if (a != b) CHECK(variation_of_information(a, b) > 0.0);
  }
}

TEST_CASE("Jaccard flows") {
  SUBCASE("identical partitions inherit everything") {
    const auto x = part({0, 0, 1, 1, 2}, "t0");
    const auto r = jaccard_flows(x, x);
    CHECK(r.inherits.size() == 3);
    for (const auto& [to, from] : r.inherits) CHECK(to == from);
    for (const auto& f : r.flows) CHECK(f.jaccard == 1.0);
  }
  SUBCASE("an even split inherits nothing") {
    const auto r = jaccard_flows(part({0, 0, 0, 0, 1, 1}), part({0, 0, 1, 1, 2, 2}));
    CHECK(r.inherits.size() == 1);
    CHECK(r.inherits.at(2) == 1);
    int halves = 0;
    for (const auto& f : r.flows)
      if (f.from_community == 0) {
        CHECK(f.jaccard == 0.5);
        ++halves;
      }
    CHECK(halves == 2);
  }
  SUBCASE("inheritance is one-to-one and follows the threshold") {
    CHECK(kDefaultFlowThreshold == 0.6);
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 100; ++rep) {
      const auto a = random_partition(12, 3, rng), b = random_partition(12, 3, rng);
      const auto r = jaccard_flows(a, b, 0.3);
      std::map<int, int> used;
      for (const auto& [to, from] : r.inherits) CHECK(++used[from] == 1);
      for (const auto& f : r.flows) {
        int inter = 0, uni = 0;
        for (std::size_t i = 0; i < 12; ++i) {
          const bool in_a = a.labels[i] == f.from_community, in_b = b.labels[i] == f.to_community;
          inter += in_a && in_b;
          uni += in_a || in_b;
        }
        CHECK(f.shared == inter);
        CHECK(f.jaccard == doctest::Approx(static_cast<double>(inter) / uni));
      }
    }
  }
  SUBCASE("sankey propagates colours and keeps the absent group white") {
    const auto a = part({0, 0, 1, 1, Partition::kAbsent}, "t0");
    const auto b = part({0, 0, 1, 1, 1}, "t1");
    const auto s = community_sankey({a, b});
    REQUIRE(s.nodes.size() == 5);
    CHECK(s.nodes[0].colour == -1);
    std::map<std::pair<std::string, int>, int> colour;
    for (const auto& n : s.nodes) colour[{n.period, n.community}] = n.colour;
    CHECK(colour[{"t1", 0}] == colour[{"t0", 0}]);
    CHECK(colour[{"t1", 1}] == colour[{"t0", 1}]);
  }
}

TEST_CASE("continental partition and stability ratio") {
  std::mt19937_64 rng(4);
  const auto d = testing::random_panel(10, 2, 5, rng);
  const auto c = continental_partition(d);
  CHECK(c.n_communities() == 5);
  for (std::size_t i = 0; i < 10; ++i) CHECK(c.labels[i] == d.region_of()[i]);
  CHECK(nmi(c, c) == 1.0);

  const auto one = testing::random_panel(4, 1, 1, rng);
  CHECK(continental_partition(one).n_communities() == 1);

  const auto adj = adjacency_from_counts(d, 0);
  const double q = linearised_stability(adj, c, 1.0);
  if (q != 0.0) CHECK(*stability_ratio(c, c, adj, 1.0) == 1.0);
  const Partition all(std::vector<int>(10, 0));
  CHECK_FALSE(stability_ratio(c, all, adj, 1.0));
}
