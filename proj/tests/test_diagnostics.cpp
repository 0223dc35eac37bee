#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "regnet/diagnostics.hpp"

using namespace regnet;

namespace {

// KL of one row, smoothing added over partners j != i, in long double.
long double kl_oracle(const Matrix<long double>& n, int i, long double alpha) {
  const auto size = n.rows();
  std::vector<long double> k(size, 0);
  long double two_m = 0;
  for (Eigen::Index a = 0; a < size; ++a)
    for (Eigen::Index b = 0; b < size; ++b) k[a] += n(a, b), two_m += n(a, b);
  long double ps = 0, qs = 0;
  for (Eigen::Index j = 0; j < size; ++j)
    if (j != i) ps += n(i, j) + alpha, qs += k[i] * k[j] / two_m + alpha;
  long double kl = 0;
  for (Eigen::Index j = 0; j < size; ++j) {
    if (j == i) continue;
    const long double p = (n(i, j) + alpha) / ps, q = (k[i] * k[j] / two_m + alpha) / qs;
    if (p > 0) kl += p * std::log(p / q);
  }
  return kl;
}

}  // namespace

TEST_CASE("KL divergence at the configuration expectation") {
  Eigen::VectorXd w(5);
  w << 1, 2, 3, 4, 5;
  const Matrix<double> n = w * w.transpose();
  for (Eigen::Index i = 0; i < 5; ++i) {
    CHECK(std::abs(*kl_divergence_to_config(n, i, 0.0)) <= 1e-12);
    CHECK(*kl_divergence_to_config(n, i, 1.0) < 1e-12);
  }
}

TEST_CASE("KL divergence smoothing limit") {
  std::mt19937_64 rng(1);
  const auto c = testing::random_counts(6, rng);
  double previous = *kl_divergence_to_config(c, 0, 0.0);
  for (double alpha : {1.0, 10.0, 1e3, 1e6}) {
    const double kl = *kl_divergence_to_config(c, 0, alpha);
    CHECK(kl <= previous + 1e-15);
    previous = kl;
  }
  CHECK(previous < 1e-9);
}

TEST_CASE("KL divergence of an exclusive partnership") {
  CountMatrix c(4, 4);
  c << 0, 9, 0, 0,  //
      9, 0, 2, 3,   //
      0, 2, 0, 4,   //
      0, 3, 4, 0;
  const Matrix<long double> n = c.cast<long double>();
  for (int i = 0; i < 4; ++i)
    for (double alpha : {0.0, 0.5, 1.0}) {
      const auto kl = kl_divergence_to_config(c, i, alpha);
      REQUIRE(kl);
      CHECK(*kl == doctest::Approx(static_cast<double>(kl_oracle(n, i, alpha))).epsilon(1e-13));
    }
}

TEST_CASE("KL records and regional means") {
  std::vector<CountryRecord> countries{{"A", "", "R0"}, {"B", "", "R0"}, {"C", "", "R1"}, {"D", "", "R1"}};
  CountMatrix c = CountMatrix::Zero(4, 4);
  c(0, 1) = c(1, 0) = 3;
  c(1, 2) = c(2, 1) = 1;
  const PanelDataset d({"R0", "R1"}, countries, testing::periods(1), CountMatrix::Constant(4, 1, 200), {c});
  const auto recs = kl_records(d);
  REQUIRE(recs.size() == 4);
  CHECK_FALSE(recs[3].kl);
  CHECK(recs[0].smoothing == kDefaultSmoothing);

  std::vector<KLRecord> fixed{{"A", "1970-1974", 0.1, 1}, {"B", "1970-1974", 0.3, 1}, {"C", "1970-1974", 0.5, 1}};
  const auto s = region_mean_kl(fixed, d);
  CHECK(s.mean(0, 0) == doctest::Approx(0.2));
  CHECK(s.mean(1, 0) == 0.5);
  CHECK_THROWS_AS(kl_divergence_to_config(c, 0, -1.0), Error);
}
