#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "regnet/error.hpp"
#include "regnet/significance.hpp"

using namespace regnet;

TEST_CASE("significance fixed point of the configuration model") {
  // n = w w^T: row sums w_i W, so k_i k_j / 2m = w_i w_j exactly.
  Eigen::VectorXd w(4);
  w << 1, 2, 3, 4;
  const Matrix<double> n = w * w.transpose();
  const auto s = collaboration_significance(n);
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j)
      if (i != j) CHECK(std::abs(s.s(i, j) - 1.0) <= 1e-12);
  CHECK(significance_transform(s.s, s.defined).isZero());

  // A zero-diagonal instance: the triangle with weights x = 1, y = 2, z = 3.
  CountMatrix t(3, 3);
  t << 0, 1, 2,  //
      1, 0, 3,   //
      2, 3, 0;
  const auto st = collaboration_significance(t);
  // k = (3, 4, 5), 2m = 12; s_01 = 12 / 12 = 1.
  CHECK(st.s(0, 1) == 1.0);
  CHECK(st.s(0, 2) == doctest::Approx(24.0 / 15.0));
}

TEST_CASE("significance values") {
  SUBCASE("zero count between active nodes") {
    CountMatrix c(3, 3);
    c << 0, 2, 0, 2, 0, 1, 0, 1, 0;
    const auto s = collaboration_significance(c);
    CHECK(s.defined(0, 2));
    CHECK(s.s(0, 2) == 0.0);
  }
  SUBCASE("complete uniform graph on four nodes") {
    for (long long c : {1LL, 7LL}) {
      CountMatrix m = CountMatrix::Constant(4, 4, c);
      m.diagonal().setZero();
      const auto s = collaboration_significance(m);
      CHECK(s.s(0, 1) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    }
  }
  SUBCASE("isolated nodes are undefined") {
    CountMatrix c = CountMatrix::Zero(3, 3);
    c(0, 1) = c(1, 0) = 5;
    const auto s = collaboration_significance(c);
    CHECK_FALSE(s.defined(0, 2));
    CHECK_FALSE(s.defined(2, 1));
    CHECK_FALSE(s.defined(0, 0));
    CHECK(s.defined(0, 1));
  }
  SUBCASE("symmetric on random matrices") {
    std::mt19937_64 rng(1);
    for (int rep = 0; rep < 30; ++rep) {
      const auto s = collaboration_significance(testing::random_counts(9, rng));
      CHECK(s.s == s.s.transpose());
      CHECK(s.defined == s.defined.transpose());
    }
  }
}

TEST_CASE("significance transform") {
  Matrix<double> s(1, 3);
  s << 1, 3, 0.25;
  const BoolMatrix defined = BoolMatrix::Constant(1, 3, true);
  const auto p = significance_transform(s, defined);
  CHECK(p(0, 0) == 0.0);
  CHECK(p(0, 1) == 0.5);
  CHECK(p(0, 2) == 0.0);
}

namespace {

PanelDataset fixture(std::mt19937_64& rng, int n = 10) { return testing::random_panel(n, 2, 2, rng); }

}  // namespace

TEST_CASE("edge thresholding") {
  std::mt19937_64 rng(2);
  const auto d = fixture(rng);
  const auto net = significance_network(d, 0);
  CHECK(threshold_edges(net, 1.0).empty());
  const auto all = threshold_edges(net, 0.0);
  std::size_t positive = 0;
  for (Eigen::Index i = 0; i < net.p_hat.rows(); ++i)
    for (Eigen::Index j = i + 1; j < net.p_hat.cols(); ++j) positive += net.p_hat(i, j) > 0.0;
  CHECK(all.size() == positive);
  for (std::size_t e = 1; e < all.size(); ++e) CHECK(all[e - 1].weight >= all[e].weight);
  for (const auto& e : all) CHECK(e.source < e.target);
  CHECK(kDefaultEdgeCutoff == 0.5);
  CHECK_THROWS_AS(threshold_edges(net, 1.5), Error);
}

TEST_CASE("continental mean weights") {
  std::vector<CountryRecord> c{{"A1", "", "A"}, {"A2", "", "A"}, {"B1", "", "B"}, {"B2", "", "B"}};
  CountMatrix pubs = CountMatrix::Constant(4, 1, 500);
  CountMatrix m = CountMatrix::Zero(4, 4);
  const PanelDataset d({"A", "B"}, c, testing::periods(1), pubs, {m});
  SignificanceNetwork net{"p", {"A1", "A2", "B1", "B2"}, Matrix<double>::Zero(4, 4), Matrix<double>::Zero(4, 4),
                          BoolMatrix::Constant(4, 4, true)};
  net.defined.diagonal().setConstant(false);
  SUBCASE("constant weights") {
    net.p_hat.setConstant(0.3);
    net.p_hat.diagonal().setZero();
    const auto r = continental_mean_weights(net, d.region_of(), d.regions());
    CHECK(r.mean.isApproxToConstant(0.3, 1e-15));
    CHECK(r.pairs(0, 0) == 2);
    CHECK(r.pairs(0, 1) == 4);
  }
  SUBCASE("only within-region weight") {
    net.p_hat(0, 1) = net.p_hat(1, 0) = 0.8;
    net.p_hat(2, 3) = net.p_hat(3, 2) = 0.4;
    const auto r = continental_mean_weights(net, d.region_of(), d.regions());
    CHECK(r.mean(0, 1) == 0.0);
    CHECK(r.mean(1, 0) == 0.0);
    CHECK(r.mean(0, 0) == doctest::Approx(0.8));
    const auto pos = continental_mean_weights(net, d.region_of(), d.regions(), true);
    CHECK(pos.pairs(0, 1) == 0);
    CHECK(std::isnan(pos.mean(0, 1)));
  }
}

TEST_CASE("edge list export") {
  const auto dir = testing::scratch("sig_export");
  std::mt19937_64 rng(3);
  const auto d = fixture(rng, 12);
  const auto net = significance_network(d, 1);

  SUBCASE("header only when empty") {
    write_edge_csv(net, {}, dir / "empty.csv");
    CHECK(csv::read_text(dir / "empty.csv") == "source,target,weight\n");
  }
  SUBCASE("one row per edge and exact round trip") {
    const auto edges = threshold_edges(net, 0.1);
    const std::vector<WeightedEdge> three(edges.begin(), edges.begin() + std::min<std::size_t>(3, edges.size()));
    write_edge_csv(net, three, dir / "three.csv");
    CHECK(csv::read_file(dir / "three.csv").rows.size() == three.size());
    export_network(net, 0.1, dir / "all.csv", ExportFormat::Csv);
    CHECK(read_edge_csv(dir / "all.csv", net.nodes) == edges);
  }
  SUBCASE("gexf") {
    NodeAttributes attrs{std::vector<std::string>(12, "R0"), std::vector<std::int64_t>(12, 7)};
    export_network(net, 0.2, dir / "net.gexf", ExportFormat::Gexf, attrs);
    const auto text = csv::read_text(dir / "net.gexf");
    CHECK(text.find("<gexf") != std::string::npos);
    std::size_t count = 0;
    for (std::size_t pos = text.find("<edge "); pos != std::string::npos; pos = text.find("<edge ", pos + 1)) ++count;
    CHECK(count == threshold_edges(net, 0.2).size());
  }
}
