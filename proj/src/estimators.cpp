#include "covdim/estimators.hpp"

#include <cmath>

namespace covdim {

namespace {

void check_finite(const Eigen::MatrixXd& x) {
  if (!x.allFinite()) throw DataError("GroupSample: non-finite entry in data");
}

}  // namespace

GroupSample::GroupSample(int id, Eigen::MatrixXd x) {
  if (x.cols() < 5)
    throw SampleTooSmallError("GroupSample: need n >= 5 observations");
  check_finite(x);
  group_id = id;
  p = static_cast<int>(x.rows());
  n = static_cast<int>(x.cols());
  c_ip = static_cast<double>(p) / n;
  data = std::move(x);
}

GroupSample GroupSample::unchecked(int id, Eigen::MatrixXd x) {
  check_finite(x);
  GroupSample g;
  g.group_id = id;
  g.p = static_cast<int>(x.rows());
  g.n = static_cast<int>(x.cols());
  g.c_ip = static_cast<double>(g.p) / g.n;
  g.data = std::move(x);
  return g;
}

SymMatrix sample_cov(const GroupSample& g, bool center) {
  Eigen::MatrixXd s;
  if (center) {
    Eigen::VectorXd mean = g.data.rowwise().mean();
    Eigen::MatrixXd xc = g.data.colwise() - mean;
    s.noalias() = xc * xc.transpose() / g.n;
  } else {
    s.noalias() = g.data * g.data.transpose() / g.n;
  }
  return SymMatrix(((s + s.transpose()) / 2.0).eval());
}

double eta4_hat(const GroupSample& g) {
  const int n = g.n;
  if (n < 5) throw SampleTooSmallError("eta4_hat: need n >= 5");
  // d(j,k) = |x_j - x_k|^2 from the column Gram matrix.
  Eigen::MatrixXd c;
  c.noalias() = g.data.transpose() * g.data;
  Eigen::VectorXd diag = c.diagonal();

  double t1 = 0.0, t2 = 0.0, rsq = 0.0;
  for (int j = 0; j < n; ++j) {
    double rj = 0.0;
    for (int k = 0; k < n; ++k) {
      if (k == j) continue;
      double d = diag[j] + diag[k] - 2.0 * c(j, k);
      rj += d;
      t1 += d;
      t2 += d * d;
    }
    rsq += rj * rj;
  }
  // Ordered quadruple sum over distinct (j1,j2,j3,j4) of (d_{j1j2}-d_{j3j4})^2,
  // reduced to pair statistics. Validated against the O(n^4) loop in tests.
  const double quad =
      2.0 * (n - 2.0) * (n - 3.0) * t2 - 2.0 * (t1 * t1 + 2.0 * t2 - 4.0 * rsq);
  const double perms = static_cast<double>(n) * (n - 1.0) * (n - 2.0) * (n - 3.0);
  return quad / (4.0 * g.p * perms);
}

double gram_hat_diagonal(const GroupSample& g, bool center) {
  const int p = g.p;
  SymMatrix s = sample_cov(g, center);
  const double c = g.c_ip;
  const double tr_s = s.mat().trace() / p;
  const double tr_s2 = inner(s, s);
  const double eta4 = eta4_hat(g);
  const double numer =
      tr_s2 - c * tr_s * tr_s -
      (c / p - c * c / (p * static_cast<double>(p))) * eta4;
  const double denom = (1.0 - 2.0 * c / p) * (1.0 - c / p);
  return numer / denom;
}

GramMatrix gram_hat(const std::vector<GroupSample>& groups, bool center) {
  if (groups.size() < 2) throw DomainError("gram_hat: need at least 2 groups");
  const int q = static_cast<int>(groups.size());
  const int p = groups[0].p;
  for (const auto& g : groups)
    if (g.p != p) throw DimensionError("gram_hat: inconsistent p across groups");
  for (int i = 0; i < q; ++i)
    for (int j = i + 1; j < q; ++j)
      if (groups[i].group_id == groups[j].group_id)
        throw DomainError("gram_hat: duplicate group_id");

  std::vector<SymMatrix> covs;
  covs.reserve(q);
  for (const auto& g : groups) covs.push_back(sample_cov(g, center));

  GramMatrix out;
  out.dim_p = p;
  out.kind = GramKind::Estimated;
  out.entries.resize(q, q);
  for (int i = 0; i < q; ++i) {
    for (int j = i + 1; j < q; ++j) {
      double v = inner(covs[i], covs[j]);
      out.entries(i, j) = v;
      out.entries(j, i) = v;
    }
    out.entries(i, i) = gram_hat_diagonal(groups[i], center);
  }
  return out;
}

double mu_functional(const SymMatrix& a, const SymMatrix& b,
                     const SymMatrix& lambda, double nu4) {
  const int p = lambda.dim_p();
  if (a.dim_p() != p || b.dim_p() != p)
    throw DimensionError("mu_functional: dim mismatch");
  SymMatrix half = psd_sqrt(lambda);
  const Eigen::MatrixXd la = lambda.mat() * a.mat();
  const Eigen::MatrixXd lb = lambda.mat() * b.mat();
  const double term1 = 2.0 / p * (la.array() * lb.transpose().array()).sum();
  const Eigen::VectorXd da =
      (half.mat() * a.mat() * half.mat()).diagonal();
  const Eigen::VectorXd db =
      (half.mat() * b.mat() * half.mat()).diagonal();
  const double term2 = (nu4 - 3.0) / p * da.dot(db);
  return term1 + term2;
}

MomentOracle analytic_moments(const SymMatrix& sigma, const SymMatrix& a,
                              const SymMatrix& b, int n, double nu4) {
  const int p = sigma.dim_p();
  if (a.dim_p() != p || b.dim_p() != p)
    throw DimensionError("analytic_moments: dim mismatch");
  if (n < 1) throw DomainError("analytic_moments: need n >= 1");
  const double cp = static_cast<double>(p) / n;
  const double tr_sig2 = inner(sigma, sigma);
  const double tr_sig = sigma.mat().trace() / p;
  const Eigen::VectorXd dsig = sigma.mat().diagonal();
  const double tr_dsig2 = dsig.squaredNorm() / p;

  MomentOracle out;
  out.e_tr_s2 = tr_sig2 + cp * tr_sig * tr_sig +
                (tr_sig2 + (nu4 - 3.0) * tr_dsig2) / n;
  const double tr_sa = (sigma.mat().array() * a.mat().array()).sum() / p;
  const double tr_sb = (sigma.mat().array() * b.mat().array()).sum() / p;
  out.e_cross = tr_sa * tr_sb +
                mu_functional(a, b, sigma, nu4) / (static_cast<double>(p) * n);
  out.var_corrected = 4.0 * cp * cp * tr_sig2 * tr_sig2 +
                      4.0 * cp * mu_functional(sigma, sigma, sigma, nu4);
  return out;
}

}  // namespace covdim
