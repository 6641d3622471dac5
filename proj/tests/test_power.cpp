#include <doctest.h>

#include <cmath>
#include <vector>

#include "covdim/dimtest.hpp"
#include "covdim/power.hpp"
#include "test_util.hpp"

using namespace covdim;
using testutil::random_psd;

namespace {

// Null configuration: majority spans exactly d0 dimensions and the outliers
// sit inside that span.
AlternativeSpec null_spec(int p, int d0, int q_major, int n_out, Rng& rng) {
  AlternativeSpec spec;
  spec.d0 = d0;
  spec.majority = testutil::span_of_dim(p, d0, q_major, rng);
  for (int k = 0; k < n_out; ++k) {
    SymMatrix combo = SymMatrix::zero(p);
    for (int i = 0; i < d0; ++i)
      combo = combo + spec.majority[i].scaled(0.2 + rng.uniform());
    spec.outliers.push_back(combo);
  }
  spec.c_list.assign(q_major + n_out, 0.5);
  return spec;
}

AlternativeSpec outlier_spec(int p, int d0, int q_major, Rng& rng) {
  AlternativeSpec spec = null_spec(p, d0, q_major, 0, rng);
  spec.outliers.push_back(random_psd(p, rng));
  spec.c_list.assign(q_major + 1, 0.5);
  return spec;
}

}  // namespace

TEST_CASE("beta_pop closed form") {
  const int p = 5;
  std::vector<SymMatrix> mats = {SymMatrix::identity(p),
                                 SymMatrix::identity(p).scaled(2.0)};
  std::vector<double> c = {0.5, 1.0};
  // <I,I> = 1, <2I,2I> = 4: (0.25*1 + 1*16)/2
  CHECK(beta_pop(mats, c) == doctest::Approx((0.25 + 16.0) / 2.0));
  CHECK_THROWS_AS(beta_pop(mats, std::vector<double>{1.0}), DimensionError);
}

TEST_CASE("r_i_matrix closed form for d0=1, q=2") {
  Rng rng(307);
  const int p = 6;
  AlternativeSpec spec;
  spec.d0 = 1;
  spec.majority = {random_psd(p, rng)};
  spec.outliers = {random_psd(p, rng)};
  spec.c_list = {0.5, 0.5};

  GramMatrix g = gram({spec.majority[0], spec.outliers[0]});
  // R_1: top row (S1, S2), scalar row (G21, G22) -> G22 S1 - G21 S2
  RiResult r1 = r_i_matrix(spec, 1);
  Eigen::MatrixXd expect = g.entries(1, 1) * spec.majority[0].mat() -
                           g.entries(1, 0) * spec.outliers[0].mat();
  CHECK_FALSE(r1.sampled);
  CHECK((r1.r.mat() - expect).norm() < 1e-12 * expect.norm());

  RiResult r2 = r_i_matrix(spec, 2);
  Eigen::MatrixXd expect2 = g.entries(0, 0) * spec.outliers[0].mat() -
                            g.entries(0, 1) * spec.majority[0].mat();
  CHECK((r2.r.mat() - expect2).norm() < 1e-12 * expect2.norm());

  CHECK_THROWS_AS(r_i_matrix(spec, 0), DomainError);
  CHECK_THROWS_AS(r_i_matrix(spec, 3), DomainError);
}

TEST_CASE("r_i_matrix vanishes under the null") {
  Rng rng(311);
  const int p = 8;
  AlternativeSpec spec = null_spec(p, 2, 5, 1, rng);
  double scale = 0.0;
  for (const auto& m : spec.majority) scale += m.mat().norm();
  for (int i = 1; i <= spec.q(); ++i) {
    RiResult ri = r_i_matrix(spec, i);
    CHECK(ri.r.mat().norm() < 1e-9 * scale * scale * scale);
  }
  CHECK(r_pop(spec) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  spec.validate();  // span dimension invariant holds
}

TEST_CASE("r_pop homogeneity in the matrix scale") {
  Rng rng(313);
  const int p = 7;
  AlternativeSpec spec = outlier_spec(p, 2, 5, rng);
  const double base = r_pop(spec);
  CHECK(base > 0.0);

  const double w = 2.0;
  AlternativeSpec scaled = spec;
  for (auto& m : scaled.majority) m = m.scaled(w);
  for (auto& m : scaled.outliers) m = m.scaled(w);
  // R_i ~ w^{2 d0 + 1}, mu(R,R|S) adds two more powers: total w^{4 d0 + 4}
  const double factor = std::pow(w, 4.0 * spec.d0 + 4.0);
  CHECK(r_pop(scaled) == doctest::Approx(factor * base).epsilon(1e-9));
}

TEST_CASE("gamma_outlier is quadratic in the orthogonal part") {
  Rng rng(317);
  const int p = 9;
  AlternativeSpec spec = outlier_spec(p, 2, 5, rng);
  const double base = gamma_outlier(spec);
  CHECK(base > 0.0);

  OrthoDecomposition dec =
      orth_decompose(spec.outliers[0], spec.majority);
  AlternativeSpec doubled = spec;
  doubled.outliers[0] = dec.parallel_part + dec.perp_part.scaled(2.0);
  // beta changes too, so compare the numerators directly
  const double mass_base = p * dec.perp_norm_sq;
  OrthoDecomposition dec2 =
      orth_decompose(doubled.outliers[0], doubled.majority);
  CHECK(dec2.perp_norm_sq ==
        doctest::Approx(4.0 * dec.perp_norm_sq).epsilon(1e-9));

  // adding a span element to the outlier leaves gamma untouched
  AlternativeSpec shifted = spec;
  shifted.outliers[0] = spec.outliers[0] + spec.majority[0].scaled(0.7);
  OrthoDecomposition dec3 =
      orth_decompose(shifted.outliers[0], shifted.majority);
  CHECK(dec3.perp_norm_sq == doctest::Approx(dec.perp_norm_sq).epsilon(1e-9));
  CHECK(mass_base > 0.0);
}

TEST_CASE("theoretical_power boundary and monotonicity") {
  Rng rng(331);
  const int p = 8;
  AlternativeSpec null0 = null_spec(p, 2, 5, 1, rng);
  CHECK(gamma_outlier(null0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK(theoretical_power(null0, 0.05) == doctest::Approx(0.05).epsilon(1e-6));

  AlternativeSpec alt = outlier_spec(p, 2, 5, rng);
  OrthoDecomposition dec = orth_decompose(alt.outliers[0], alt.majority);
  double prev = 0.05;
  for (double s : {0.5, 1.0, 2.0, 4.0}) {
    AlternativeSpec sc = alt;
    sc.outliers[0] = dec.parallel_part + dec.perp_part.scaled(s);
    const double pw = theoretical_power(sc, 0.05);
    CHECK(pw >= prev - 1e-12);
    prev = pw;
  }
  CHECK(prev > 0.5);
  CHECK_THROWS_AS(theoretical_power(alt, 0.0), DomainError);
}

TEST_CASE("rank-one outlier identity for the d0=2 mixture family") {
  Rng rng(337);
  const int p = 12, q = 8;
  SymMatrix l1 = random_psd(p, rng);
  SymMatrix l2 = random_psd(p, rng);
  SymMatrix l3 = random_psd(p, rng);
  const double w = 0.6;

  std::vector<int> labels = {0, 1, 0, 0, 1, 1, 0};  // both labels present
  std::vector<SymMatrix> sigmas;
  for (int j = 0; j < q - 1; ++j)
    sigmas.push_back(labels[j] == 0 ? l1 : l2);
  SymMatrix last = (labels.back() == 0 ? l1 : l2).scaled(1.0 - w) + l3.scaled(w);
  sigmas.push_back(last);

  const double m3 = m_pop(sigmas, 3);
  std::vector<SymMatrix> majority(sigmas.begin(), sigmas.end() - 1);
  const double m2_major = m_pop(majority, 2);
  OrthoDecomposition dec = orth_decompose(l3, {l1, l2});
  const double expect = 3.0 * w * w / q * dec.perp_norm_sq * m2_major;
  CHECK(m3 == doctest::Approx(expect).epsilon(1e-8));
}

TEST_CASE("validate rejects misdeclared span dimension") {
  Rng rng(347);
  AlternativeSpec spec = outlier_spec(8, 2, 5, rng);
  spec.validate();
  AlternativeSpec wrong = spec;
  wrong.d0 = 1;
  CHECK_THROWS_AS(wrong.validate(), DomainError);
  AlternativeSpec empty = spec;
  empty.outliers.clear();
  CHECK_THROWS_AS(empty.validate(), DomainError);
}
