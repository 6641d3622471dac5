#include "covdim/power.hpp"

#include <algorithm>
#include <cmath>

#include "covdim/dimtest.hpp"
#include "covdim/rng.hpp"

namespace covdim {

namespace {

constexpr int kMaxExactQ = 60;
constexpr int kSampleDraws = 100000;

std::vector<SymMatrix> all_mats(const AlternativeSpec& spec) {
  std::vector<SymMatrix> mats = spec.majority;
  mats.insert(mats.end(), spec.outliers.begin(), spec.outliers.end());
  return mats;
}

SymMatrix ri_term(const std::vector<SymMatrix>& mats,
                  const Eigen::MatrixXd& g, int i,
                  const std::vector<int>& subset) {
  const int d0 = static_cast<int>(subset.size());
  std::vector<SymMatrix> top;
  top.reserve(d0 + 1);
  top.push_back(mats[i]);
  for (int j : subset) top.push_back(mats[j]);
  Eigen::MatrixXd rows(d0, d0 + 1);
  for (int t = 0; t < d0; ++t) {
    rows(t, 0) = g(subset[t], i);
    for (int c = 0; c < d0; ++c) rows(t, c + 1) = g(subset[t], subset[c]);
  }
  return matrix_row_det(top, rows);
}

}  // namespace

void AlternativeSpec::validate() const {
  if (outliers.empty()) throw DomainError("AlternativeSpec: need K >= 1 outliers");
  if (d0 < 1) throw DomainError("AlternativeSpec: d0 must be >= 1");
  if (static_cast<int>(c_list.size()) != q())
    throw DimensionError("AlternativeSpec: c_list length != q");
  if (static_cast<int>(majority.size()) < d0 + 1)
    throw DomainError("AlternativeSpec: majority too small for d0");
  const double at_d0 = m_pop(majority, d0);
  const double at_d0p1 = m_pop(majority, d0 + 1);
  GramMatrix g = gram(majority);
  double scale = 1.0;
  const double gmax = g.entries.diagonal().maxCoeff();
  for (int t = 0; t <= d0; ++t) scale *= std::max(gmax, 1.0);
  if (at_d0 <= 0.0 || std::abs(at_d0p1) > 1e-10 * scale)
    throw DomainError("AlternativeSpec: majority span dimension != d0");
}

double beta_pop(const std::vector<SymMatrix>& mats,
                const std::vector<double>& c_list) {
  if (mats.size() != c_list.size())
    throw DimensionError("beta_pop: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < mats.size(); ++i) {
    const double gii = inner(mats[i], mats[i]);
    s += c_list[i] * c_list[i] * gii * gii;
  }
  return s / static_cast<double>(mats.size());
}

RiResult r_i_matrix(const AlternativeSpec& spec, int i,
                    std::uint64_t sample_seed) {
  const std::vector<SymMatrix> mats = all_mats(spec);
  const int q = static_cast<int>(mats.size());
  const int d0 = spec.d0;
  if (i < 1 || i > q) throw DomainError("r_i_matrix: index out of range");
  if (q - 1 < d0) throw DomainError("r_i_matrix: q - 1 < d0");
  const int i0 = i - 1;
  GramMatrix g = gram(mats);

  std::vector<int> others;
  others.reserve(q - 1);
  for (int j = 0; j < q; ++j)
    if (j != i0) others.push_back(j);

  const int p = mats[0].dim_p();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(p, p);
  const double n_subsets = binomial(q - 1, d0);

  if (q <= kMaxExactQ) {
    std::vector<int> pick(d0);
    for (int t = 0; t < d0; ++t) pick[t] = t;
    for (;;) {
      std::vector<int> subset(d0);
      for (int t = 0; t < d0; ++t) subset[t] = others[pick[t]];
      acc += ri_term(mats, g.entries, i0, subset).mat();
      int t = d0 - 1;
      while (t >= 0 && pick[t] == q - 1 - (d0 - t)) --t;
      if (t < 0) break;
      ++pick[t];
      for (int u = t + 1; u < d0; ++u) pick[u] = pick[u - 1] + 1;
    }
    return RiResult{SymMatrix(((acc + acc.transpose()) / 2.0 / n_subsets).eval()),
                    false};
  }

  Rng rng(derive_seed(sample_seed, static_cast<std::uint64_t>(i)));
  const int m = static_cast<int>(others.size());
  for (int draw = 0; draw < kSampleDraws; ++draw) {
    // Partial Fisher-Yates for a uniform d0-subset.
    std::vector<int> pool = others;
    for (int t = 0; t < d0; ++t) {
      const int j = static_cast<int>(rng.uniform_int(t, m - 1));
      std::swap(pool[t], pool[j]);
    }
    std::vector<int> subset(pool.begin(), pool.begin() + d0);
    std::sort(subset.begin(), subset.end());
    acc += ri_term(mats, g.entries, i0, subset).mat();
  }
  return RiResult{
      SymMatrix(((acc + acc.transpose()) / 2.0 / kSampleDraws).eval()), true};
}

double r_pop(const AlternativeSpec& spec, std::uint64_t sample_seed) {
  const std::vector<SymMatrix> mats = all_mats(spec);
  const int q = static_cast<int>(mats.size());
  double s = 0.0;
  for (int i = 1; i <= q; ++i) {
    RiResult ri = r_i_matrix(spec, i, sample_seed);
    s += spec.c_list[i - 1] *
         mu_functional(ri.r, ri.r, mats[i - 1], spec.nu4);
  }
  return std::max(s / q, 0.0);
}

double gamma_outlier(const AlternativeSpec& spec) {
  const std::vector<SymMatrix> mats = all_mats(spec);
  const double beta = beta_pop(mats, spec.c_list);
  const int p = mats[0].dim_p();
  double mass = 0.0;
  for (const auto& out : spec.outliers) {
    OrthoDecomposition dec = orth_decompose(out, spec.majority);
    mass += p * dec.perp_norm_sq;  // tr(perp^2)
  }
  return mass /
         (2.0 * std::sqrt(static_cast<double>(mats.size())) * std::sqrt(beta));
}

double theoretical_power(const AlternativeSpec& spec, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("theoretical_power: alpha must be in (0,1)");
  const double gamma = gamma_outlier(spec);
  return normal_sf(z_alpha(alpha) - gamma);
}

}  // namespace covdim
