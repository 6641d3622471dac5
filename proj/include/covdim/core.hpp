#pragma once

#include <Eigen/Dense>
#include <vector>

#include "covdim/errors.hpp"

namespace covdim {

// Element of the inner-product space of p x p real symmetric matrices,
// with <A,B> = tr(AB)/p.
class SymMatrix {
 public:
  // Constructed matrices must be exactly symmetric; ingested data may carry
  // round-off, controlled by `tol` (relative to the largest entry).
  explicit SymMatrix(Eigen::MatrixXd m, double tol = 0.0);

  static SymMatrix identity(int p);
  static SymMatrix zero(int p);
  // Band indicator: entries 1 where |r-s| == band, 0 elsewhere (band 0 = I).
  static SymMatrix band_indicator(int p, int band);

  int dim_p() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& mat() const { return m_; }

  SymMatrix operator+(const SymMatrix& o) const;
  SymMatrix operator-(const SymMatrix& o) const;
  SymMatrix scaled(double a) const;

 private:
  Eigen::MatrixXd m_;
};

enum class GramKind { Population, Estimated };

// q x q matrix of pairwise inner products. Population Grams are PSD by
// construction; Estimated ones carry a bias-corrected diagonal and may be
// indefinite.
struct GramMatrix {
  Eigen::MatrixXd entries;
  GramKind kind = GramKind::Population;
  int dim_p = 0;

  int size_q() const { return static_cast<int>(entries.rows()); }
};

struct OrthoDecomposition {
  SymMatrix parallel_part;
  SymMatrix perp_part;
  double perp_norm_sq = 0.0;  // <perp, perp>
};

enum class MinorStrategy { Enumerate, Spectral, Auto };

double inner(const SymMatrix& a, const SymMatrix& b);

GramMatrix gram(const std::vector<SymMatrix>& mats);

// Unnormalized sum of determinants of all k x k principal submatrices of G.
// Enumerate walks the C(q,k) subsets; Spectral computes the k-th elementary
// symmetric polynomial of the eigenvalues via the characteristic-polynomial
// coefficient recurrence with compensated summation.
double principal_minor_sum(const GramMatrix& g, int k,
                           MinorStrategy strategy = MinorStrategy::Auto);

// C(q,k)^{-1} * principal_minor_sum(gram(mats), k).
double m_pop(const std::vector<SymMatrix>& mats, int k,
             MinorStrategy strategy = MinorStrategy::Auto);

// Unique symmetric PSD square root via spectral decomposition. Eigenvalues
// below -1e-10 * max eigenvalue raise NotPSDError; tiny negatives are clamped.
SymMatrix psd_sqrt(const SymMatrix& s);

// First-row Laplace expansion of a determinant whose first row holds matrices:
// sum_k (-1)^{1+k} A_{1k} B_k, with A_{1k} the scalar minor of scalar_rows
// with column k removed. scalar_rows is (m-1) x m.
SymMatrix matrix_row_det(const std::vector<SymMatrix>& top_row,
                         const Eigen::MatrixXd& scalar_rows);

// Least-squares projection of target onto span(basis) under <.,.>, via the
// Gram normal equations with eigenvalue-thresholded pseudo-inversion
// (threshold 1e-10 * lambda_max, so dependent bases are fine).
OrthoDecomposition orth_decompose(const SymMatrix& target,
                                  const std::vector<SymMatrix>& basis);

double binomial(int n, int k);

}  // namespace covdim
