#include "covdim/core.hpp"

#include <algorithm>
#include <cmath>

namespace covdim {

namespace {

// Kahan-compensated accumulator.
struct Kahan {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

double subset_det(const Eigen::MatrixXd& g, const std::vector<int>& idx) {
  const int k = static_cast<int>(idx.size());
  switch (k) {
    case 1:
      return g(idx[0], idx[0]);
    case 2: {
      double a = g(idx[0], idx[0]), b = g(idx[0], idx[1]);
      double d = g(idx[1], idx[1]);
      return a * d - b * b;
    }
    case 3: {
      double a = g(idx[0], idx[0]), b = g(idx[0], idx[1]), c = g(idx[0], idx[2]);
      double e = g(idx[1], idx[1]), f = g(idx[1], idx[2]);
      double i = g(idx[2], idx[2]);
      return a * (e * i - f * f) - b * (b * i - f * c) + c * (b * f - e * c);
    }
    default: {
      Eigen::MatrixXd sub(k, k);
      for (int r = 0; r < k; ++r)
        for (int s = 0; s < k; ++s) sub(r, s) = g(idx[r], idx[s]);
      return Eigen::PartialPivLU<Eigen::MatrixXd>(sub).determinant();
    }
  }
}

bool next_combination(std::vector<int>& idx, int q) {
  const int k = static_cast<int>(idx.size());
  for (int i = k - 1; i >= 0; --i) {
    if (idx[i] < q - (k - i)) {
      ++idx[i];
      for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

SymMatrix::SymMatrix(Eigen::MatrixXd m, double tol) : m_(std::move(m)) {
  if (m_.rows() < 1 || m_.rows() != m_.cols())
    throw DimensionError("SymMatrix: matrix must be square with dim >= 1");
  const double scale = m_.cwiseAbs().maxCoeff();
  const double bound = tol * scale;
  for (Eigen::Index r = 0; r < m_.rows(); ++r)
    for (Eigen::Index s = r + 1; s < m_.cols(); ++s)
      if (std::abs(m_(r, s) - m_(s, r)) > bound)
        throw DimensionError("SymMatrix: input is not symmetric");
  if (tol > 0.0) m_ = ((m_ + m_.transpose()) / 2.0).eval();
}

SymMatrix SymMatrix::identity(int p) {
  return SymMatrix(Eigen::MatrixXd::Identity(p, p));
}

SymMatrix SymMatrix::zero(int p) {
  return SymMatrix(Eigen::MatrixXd::Zero(p, p));
}

SymMatrix SymMatrix::band_indicator(int p, int band) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, p);
  for (int r = 0; r < p; ++r) {
    if (band == 0) {
      m(r, r) = 1.0;
    } else if (r + band < p) {
      m(r, r + band) = 1.0;
      m(r + band, r) = 1.0;
    }
  }
  return SymMatrix(std::move(m));
}

SymMatrix SymMatrix::operator+(const SymMatrix& o) const {
  if (dim_p() != o.dim_p()) throw DimensionError("SymMatrix +: dim mismatch");
  return SymMatrix(m_ + o.m_);
}

SymMatrix SymMatrix::operator-(const SymMatrix& o) const {
  if (dim_p() != o.dim_p()) throw DimensionError("SymMatrix -: dim mismatch");
  return SymMatrix(m_ - o.m_);
}

SymMatrix SymMatrix::scaled(double a) const { return SymMatrix(a * m_); }

double inner(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim_p() != b.dim_p()) throw DimensionError("inner: dim mismatch");
  // tr(AB) = sum of elementwise products for symmetric A, B.
  return (a.mat().array() * b.mat().array()).sum() / a.dim_p();
}

GramMatrix gram(const std::vector<SymMatrix>& mats) {
  if (mats.empty()) throw EmptyInputError("gram: empty matrix list");
  const int q = static_cast<int>(mats.size());
  GramMatrix g;
  g.dim_p = mats[0].dim_p();
  g.kind = GramKind::Population;
  g.entries.resize(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = i; j < q; ++j) {
      double v = inner(mats[i], mats[j]);
      g.entries(i, j) = v;
      g.entries(j, i) = v;
    }
  return g;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double principal_minor_sum(const GramMatrix& g, int k, MinorStrategy strategy) {
  const int q = g.size_q();
  if (k < 1 || k > q) throw DomainError("principal_minor_sum: k out of range");

  if (strategy == MinorStrategy::Auto) {
    const double cost = binomial(q, k) * k * k * k;
    strategy = cost <= 1e7 ? MinorStrategy::Enumerate : MinorStrategy::Spectral;
  }

  if (strategy == MinorStrategy::Enumerate) {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    Kahan acc;
    do {
      acc.add(subset_det(g.entries, idx));
    } while (next_combination(idx, q));
    return acc.sum;
  }

  // Spectral: e_k of the eigenvalues via the coefficient recurrence of
  // prod(x - lambda_i). coef[j] holds (-1)^j e_j after each step.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.entries,
                                                    Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError("principal_minor_sum: eigen solver failed");
  const Eigen::VectorXd lam = es.eigenvalues();
  std::vector<Kahan> coef(k + 1);
  coef[0].add(1.0);
  for (int i = 0; i < q; ++i) {
    for (int j = std::min(i + 1, k); j >= 1; --j)
      coef[j].add(-lam[i] * coef[j - 1].sum);
  }
  return (k % 2 == 0 ? 1.0 : -1.0) * coef[k].sum;
}

double m_pop(const std::vector<SymMatrix>& mats, int k, MinorStrategy strategy) {
  return principal_minor_sum(gram(mats), k, strategy) /
         binomial(static_cast<int>(mats.size()), k);
}

SymMatrix psd_sqrt(const SymMatrix& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.mat());
  if (es.info() != Eigen::Success)
    throw NumericalError("psd_sqrt: eigen solver failed");
  Eigen::VectorXd lam = es.eigenvalues();
  const double maxeig = std::max(lam.maxCoeff(), 0.0);
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam[i] < -1e-10 * maxeig)
      throw NotPSDError("psd_sqrt: matrix has a negative eigenvalue");
    lam[i] = std::sqrt(std::max(lam[i], 0.0));
  }
  Eigen::MatrixXd root = es.eigenvectors() * lam.asDiagonal() *
                         es.eigenvectors().transpose();
  return SymMatrix(((root + root.transpose()) / 2.0).eval());
}

SymMatrix matrix_row_det(const std::vector<SymMatrix>& top_row,
                         const Eigen::MatrixXd& scalar_rows) {
  const int m = static_cast<int>(top_row.size());
  if (m < 1) throw EmptyInputError("matrix_row_det: empty top row");
  if (scalar_rows.rows() != m - 1 || scalar_rows.cols() != m)
    throw DimensionError("matrix_row_det: scalar_rows must be (m-1) x m");
  const int p = top_row[0].dim_p();
  for (const auto& b : top_row)
    if (b.dim_p() != p) throw DimensionError("matrix_row_det: dim mismatch");

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(p, p);
  Eigen::MatrixXd minor(m - 1, m - 1);
  for (int k = 0; k < m; ++k) {
    for (int r = 0; r < m - 1; ++r) {
      int cc = 0;
      for (int c = 0; c < m; ++c) {
        if (c == k) continue;
        minor(r, cc++) = scalar_rows(r, c);
      }
    }
    double cof = m == 1 ? 1.0
                        : Eigen::PartialPivLU<Eigen::MatrixXd>(minor).determinant();
    double sign = (k % 2 == 0) ? 1.0 : -1.0;  // (-1)^{1+k}, k 1-based
    out.noalias() += sign * cof * top_row[k].mat();
  }
  return SymMatrix(((out + out.transpose()) / 2.0).eval());
}

OrthoDecomposition orth_decompose(const SymMatrix& target,
                                  const std::vector<SymMatrix>& basis) {
  if (basis.empty()) throw EmptyInputError("orth_decompose: empty basis");
  const int q = static_cast<int>(basis.size());
  GramMatrix g = gram(basis);
  Eigen::VectorXd rhs(q);
  for (int i = 0; i < q; ++i) rhs[i] = inner(basis[i], target);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.entries);
  if (es.info() != Eigen::Success)
    throw NumericalError("orth_decompose: eigen solver failed");
  const Eigen::VectorXd lam = es.eigenvalues();
  const double thresh = 1e-10 * std::max(lam.maxCoeff(), 0.0);
  Eigen::VectorXd inv_lam = Eigen::VectorXd::Zero(q);
  for (int i = 0; i < q; ++i)
    if (lam[i] > thresh) inv_lam[i] = 1.0 / lam[i];
  Eigen::VectorXd coeff = es.eigenvectors() * inv_lam.asDiagonal() *
                          es.eigenvectors().transpose() * rhs;

  Eigen::MatrixXd par = Eigen::MatrixXd::Zero(target.dim_p(), target.dim_p());
  for (int i = 0; i < q; ++i) par.noalias() += coeff[i] * basis[i].mat();
  SymMatrix parallel(std::move(par));
  SymMatrix perp = target - parallel;
  double nsq = std::max(inner(perp, perp), 0.0);
  return OrthoDecomposition{std::move(parallel), std::move(perp), nsq};
}

}  // namespace covdim
