#pragma once

#include <Eigen/Dense>
#include <vector>

#include "covdim/core.hpp"

namespace covdim {

// One population's observations, columns of `data` being the p-vectors.
struct GroupSample {
  int group_id = 0;
  Eigen::MatrixXd data;  // p x n
  int n = 0;
  int p = 0;
  double c_ip = 0.0;  // p / n

  // n >= 5 is required by the eta4 quadruple sum and by the Ghat diagonal
  // denominator (1 - 2/n)(1 - 1/n).
  GroupSample(int id, Eigen::MatrixXd x);

  // Skips the n >= 5 floor; for tests only.
  static GroupSample unchecked(int id, Eigen::MatrixXd x);

 private:
  GroupSample() = default;
};

// Analytic moments of tr(S^2)/p and cross-trace products for a sample
// covariance from n observations of Sigma^{1/2} z with kurtosis nu4.
struct MomentOracle {
  double e_tr_s2 = 0.0;     // E[tr(S^2)/p]
  double e_cross = 0.0;     // E[(tr(SA)/p)(tr(SB)/p)]
  double var_corrected = 0.0;  // Var(tr(S^2) - c tr(S)^2 / p)
};

// S = X X^T / n. No mean subtraction unless `center`; centering keeps the
// divisor n.
SymMatrix sample_cov(const GroupSample& g, bool center = false);

// Fourth-moment estimator: the ordered-quadruple difference sum scaled by
// (n-4)!/(4 p n!), evaluated through an O(n^2) reduction over the pairwise
// squared distances.
double eta4_hat(const GroupSample& g);

// Sample Gram matrix: off-diagonal tr(S_i S_j)/p, diagonal bias-corrected
// through eta4_hat.
GramMatrix gram_hat(const std::vector<GroupSample>& groups,
                    bool center = false);

// The bias-corrected diagonal entry for a single group.
double gram_hat_diagonal(const GroupSample& g, bool center = false);

MomentOracle analytic_moments(const SymMatrix& sigma, const SymMatrix& a,
                              const SymMatrix& b, int n, double nu4);

// mu(A,B|Lambda) = (2/p) tr(L A L B)
//                + ((nu4-3)/p) tr(D(L^1/2 A L^1/2) D(L^1/2 B L^1/2)).
double mu_functional(const SymMatrix& a, const SymMatrix& b,
                     const SymMatrix& lambda, double nu4);

}  // namespace covdim
