#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "covdim/errors.hpp"

namespace covdim {

// (pq) x (pq) matrix viewed as a q x q grid of p x p blocks.
struct BlockMatrix {
  Eigen::MatrixXd big;
  int p = 0;
  int q = 0;

  BlockMatrix(Eigen::MatrixXd m, int p_, int q_);
};

// q^2 x p^2 rearrangement whose rank counts Kronecker-sum terms.
struct RearrangedMatrix {
  Eigen::MatrixXd mat;
  int p = 0;
  int q = 0;
};

struct RssSummary {
  int splits = 0;
  std::vector<int> ranks;
  // rss_by_rank[r][s]: RSS for ranks[r] on split s.
  std::vector<std::vector<double>> rss_by_rank;
  double diff_mean = 0.0;  // mean of RSS_{ranks.back} - RSS_{ranks.front}
  double diff_sd = 0.0;
  double frac_higher_rank_better = 0.0;
  std::uint64_t seed = 0;
};

// Linear bijection pinned by reshape(A (x) B) == vec(A) vec(B)^T with
// column-major vec, A the q x q Kronecker factor.
RearrangedMatrix reshape(const BlockMatrix& m);

BlockMatrix inverse_reshape(const RearrangedMatrix& r);

// Truncated SVD: sum of the d leading singular triplets, plus all singular
// values.
std::pair<RearrangedMatrix, std::vector<double>> rank_d_approx(
    const RearrangedMatrix& r, int d);

// Train/test split experiment: per split, fit rank-d rearranged approximations
// on the training half's (centered, divisor n) covariance and score them
// against the rearranged test covariance in Frobenius norm.
RssSummary rss_experiment(const std::vector<Eigen::MatrixXd>& observations,
                          const std::vector<int>& ranks, int splits,
                          std::uint64_t seed);

}  // namespace covdim
