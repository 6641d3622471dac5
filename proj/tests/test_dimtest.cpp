#include <doctest.h>

#include <cmath>
#include <vector>

#include "covdim/dimtest.hpp"
#include "test_util.hpp"

using namespace covdim;
using testutil::random_matrix;

namespace {

GramMatrix make_gram(const Eigen::MatrixXd& entries, int p) {
  GramMatrix g;
  g.entries = entries;
  g.kind = GramKind::Estimated;
  g.dim_p = p;
  return g;
}

// q groups whose population covariances lie in a span of dimension d.
std::vector<GroupSample> draw_span_groups(int p, int d, int q, int n,
                                          Rng& rng) {
  auto sigmas = testutil::span_of_dim(p, d, q, rng);
  std::vector<GroupSample> groups;
  for (int i = 0; i < q; ++i) {
    SymMatrix root = psd_sqrt(sigmas[i]);
    Eigen::MatrixXd x = root.mat() * random_matrix(p, n, rng);
    groups.emplace_back(i, std::move(x));
  }
  return groups;
}

}  // namespace

TEST_CASE("m_hat averages principal minors") {
  Eigen::MatrixXd e(3, 3);
  e << 1.0, 0.5, -0.2, 0.5, 2.0, 0.3, -0.2, 0.3, 0.7;
  GramMatrix g = make_gram(e, 10);

  CHECK(m_hat(g, 1) == doctest::Approx(e.trace() / 3.0).epsilon(1e-14));

  double pair_sum = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      pair_sum += e(i, i) * e(j, j) - e(i, j) * e(j, i);
  CHECK(m_hat(g, 2) == doctest::Approx(pair_sum / 3.0).epsilon(1e-13));
  CHECK(m_hat(g, 3) == doctest::Approx(e.determinant()).epsilon(1e-13));
}

TEST_CASE("m_hat k=3 matches a triple-loop oracle at q=10") {
  Rng rng(211);
  Eigen::MatrixXd a = random_matrix(10, 10, rng);
  Eigen::MatrixXd e = (a + a.transpose()) / 2.0;
  GramMatrix g = make_gram(e, 4);

  double sum = 0.0;
  for (int i = 0; i < 10; ++i)
    for (int j = i + 1; j < 10; ++j)
      for (int k = j + 1; k < 10; ++k) {
        Eigen::Matrix3d s;
        s << e(i, i), e(i, j), e(i, k), e(j, i), e(j, j), e(j, k), e(k, i),
            e(k, j), e(k, k);
        sum += s.determinant();
      }
  const double expect = sum / binomial(10, 3);
  CHECK(m_hat(g, 3, MinorStrategy::Enumerate) ==
        doctest::Approx(expect).epsilon(1e-11));
  CHECK(m_hat(g, 3, MinorStrategy::Spectral) ==
        doctest::Approx(expect).epsilon(1e-11));
}

TEST_CASE("beta_hat and sigma_hat closed forms") {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(2, 2);
  e(0, 0) = 2.0;
  e(1, 1) = 3.0;
  GramMatrix g = make_gram(e, 8);
  std::vector<double> c = {0.5, 1.0};
  const double b = beta_hat(g, c);
  CHECK(b == doctest::Approx((0.25 * 4.0 + 1.0 * 9.0) / 2.0).epsilon(1e-14));

  CHECK(sigma_hat(-0.5, 4.0, 2) == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(sigma_hat(0.0, 4.0, 2) == doctest::Approx(0.0));

  std::vector<double> bad = {0.5};
  CHECK_THROWS_AS(beta_hat(g, bad), DimensionError);
}

TEST_CASE("normal tail and quantile") {
  CHECK(normal_sf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(normal_sf(1.6448536269514722) == doctest::Approx(0.05).epsilon(1e-10));
  CHECK(normal_sf(-1.6448536269514722) ==
        doctest::Approx(0.95).epsilon(1e-10));
  CHECK(z_alpha(0.05) == doctest::Approx(1.6448536269514722).epsilon(1e-9));
  CHECK(z_alpha(0.5) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  for (double a : {0.2, 0.1, 0.025, 0.01, 0.001})
    CHECK(normal_sf(z_alpha(a)) == doctest::Approx(a).epsilon(1e-9));
  CHECK_THROWS_AS(z_alpha(0.0), DomainError);
  CHECK_THROWS_AS(z_alpha(1.0), DomainError);
}

TEST_CASE("dim_test accepts the true dimension and rejects below it") {
  Rng rng(223);
  const int p = 60, d = 2, q = 6, n = 150;
  auto groups = draw_span_groups(p, d, q, n, rng);

  TestReport at_truth = dim_test(groups, d, 0.05);
  CHECK(at_truth.q == q);
  CHECK(at_truth.p == p);
  CHECK(at_truth.p_value == doctest::Approx(normal_sf(at_truth.statistic)));
  CHECK_FALSE(at_truth.reject);

  TestReport below = dim_test(groups, d - 1, 0.05);
  CHECK(below.reject);
  CHECK(below.statistic > at_truth.statistic);
}

TEST_CASE("dim_test statistic is scale invariant") {
  Rng rng(227);
  const int p = 30, q = 5, n = 80;
  auto groups = draw_span_groups(p, 2, q, n, rng);
  TestReport base = dim_test(groups, 2, 0.05);

  for (double w : {0.1, 3.0, 10.0}) {
    std::vector<GroupSample> scaled;
    for (const auto& g : groups)
      scaled.emplace_back(g.group_id, (w * g.data).eval());
    TestReport r = dim_test(scaled, 2, 0.05);
    CHECK(r.statistic == doctest::Approx(base.statistic).epsilon(1e-8));
    CHECK(r.p_value == doctest::Approx(base.p_value).epsilon(1e-8));
  }
}

TEST_CASE("dim_test strategies agree") {
  Rng rng(229);
  auto groups = draw_span_groups(25, 2, 7, 60, rng);
  TestOptions en;
  en.strategy = MinorStrategy::Enumerate;
  TestOptions sp;
  sp.strategy = MinorStrategy::Spectral;
  TestReport a = dim_test(groups, 3, 0.05, en);
  TestReport b = dim_test(groups, 3, 0.05, sp);
  CHECK(a.statistic == doctest::Approx(b.statistic).epsilon(1e-9));
  CHECK(a.m_hat_d0 == doctest::Approx(b.m_hat_d0).epsilon(1e-9));
}

TEST_CASE("dim_test guards") {
  Rng rng(233);
  auto groups = draw_span_groups(10, 1, 4, 20, rng);
  CHECK_THROWS_AS(dim_test(groups, 3, 0.05), DomainError);  // q < d0 + 2
  CHECK_THROWS_AS(dim_test(groups, 0, 0.05), DomainError);
  CHECK_THROWS_AS(dim_test(groups, 1, 0.0), DomainError);

  std::vector<GroupSample> zeros;
  for (int i = 0; i < 4; ++i)
    zeros.emplace_back(i, Eigen::MatrixXd::Zero(10, 20));
  CHECK_THROWS_AS(dim_test(zeros, 1, 0.05), DegenerateVarianceError);
}

TEST_CASE("sequential_dim finds the span dimension") {
  Rng rng(239);
  const int p = 80, d = 2, q = 7, n = 200;
  auto groups = draw_span_groups(p, d, q, n, rng);

  SequentialReport rep = sequential_dim(groups, 0.05);
  REQUIRE(rep.estimated_d.has_value());
  CHECK(*rep.estimated_d == d);
  CHECK(static_cast<int>(rep.per_d.size()) == d);
  for (int i = 0; i + 1 < static_cast<int>(rep.per_d.size()); ++i)
    CHECK(rep.per_d[i].second.reject);
  CHECK_FALSE(rep.per_d.back().second.reject);
}
