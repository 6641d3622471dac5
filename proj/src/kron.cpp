#include "covdim/kron.hpp"

#include <cmath>

#include "covdim/rng.hpp"

namespace covdim {

BlockMatrix::BlockMatrix(Eigen::MatrixXd m, int p_, int q_)
    : big(std::move(m)), p(p_), q(q_) {
  if (p < 1 || q < 1 || big.rows() != static_cast<Eigen::Index>(p) * q ||
      big.cols() != static_cast<Eigen::Index>(p) * q)
    throw DimensionError("BlockMatrix: dimensions do not factor as p*q");
}

RearrangedMatrix reshape(const BlockMatrix& m) {
  const int p = m.p, q = m.q;
  RearrangedMatrix out;
  out.p = p;
  out.q = q;
  out.mat.resize(static_cast<Eigen::Index>(q) * q,
                 static_cast<Eigen::Index>(p) * p);
  // Row (bc-1)q + br holds vec(block(br, bc))^T, so that for A (x) B the
  // row ordering matches column-major vec(A).
  for (int bc = 0; bc < q; ++bc)
    for (int br = 0; br < q; ++br) {
      const Eigen::MatrixXd block = m.big.block(br * p, bc * p, p, p);
      out.mat.row(static_cast<Eigen::Index>(bc) * q + br) =
          Eigen::Map<const Eigen::VectorXd>(block.data(), p * p).transpose();
    }
  return out;
}

BlockMatrix inverse_reshape(const RearrangedMatrix& r) {
  const int p = r.p, q = r.q;
  if (r.mat.rows() != static_cast<Eigen::Index>(q) * q ||
      r.mat.cols() != static_cast<Eigen::Index>(p) * p)
    throw DimensionError("inverse_reshape: shape mismatch");
  Eigen::MatrixXd big(static_cast<Eigen::Index>(p) * q,
                      static_cast<Eigen::Index>(p) * q);
  for (int bc = 0; bc < q; ++bc)
    for (int br = 0; br < q; ++br) {
      Eigen::VectorXd v =
          r.mat.row(static_cast<Eigen::Index>(bc) * q + br).transpose();
      big.block(br * p, bc * p, p, p) =
          Eigen::Map<const Eigen::MatrixXd>(v.data(), p, p);
    }
  return BlockMatrix(std::move(big), p, q);
}

std::pair<RearrangedMatrix, std::vector<double>> rank_d_approx(
    const RearrangedMatrix& r, int d) {
  const Eigen::Index maxrank = std::min(r.mat.rows(), r.mat.cols());
  if (d < 1 || d > maxrank)
    throw DomainError("rank_d_approx: d out of range");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(r.mat,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success)
    throw NumericalError("rank_d_approx: SVD failed to converge");
  const Eigen::VectorXd sv = svd.singularValues();
  RearrangedMatrix out;
  out.p = r.p;
  out.q = r.q;
  out.mat = svd.matrixU().leftCols(d) * sv.head(d).asDiagonal() *
            svd.matrixV().leftCols(d).transpose();
  return {std::move(out), std::vector<double>(sv.data(), sv.data() + sv.size())};
}

RssSummary rss_experiment(const std::vector<Eigen::MatrixXd>& observations,
                          const std::vector<int>& ranks, int splits,
                          std::uint64_t seed) {
  const int n = static_cast<int>(observations.size());
  if (n < 4 || n % 2 != 0)
    throw DomainError("rss_experiment: need an even observation count >= 4");
  if (ranks.empty()) throw DomainError("rss_experiment: ranks must be nonempty");
  if (splits < 1) throw DomainError("rss_experiment: need splits >= 1");
  const int p = static_cast<int>(observations[0].rows());
  const int q = static_cast<int>(observations[0].cols());
  for (const auto& x : observations)
    if (x.rows() != p || x.cols() != q)
      throw DimensionError("rss_experiment: inconsistent observation shapes");

  const int half = n / 2;
  const Eigen::Index pq = static_cast<Eigen::Index>(p) * q;
  std::vector<Eigen::VectorXd> vecs;
  vecs.reserve(n);
  for (const auto& x : observations)
    vecs.emplace_back(Eigen::Map<const Eigen::VectorXd>(x.data(), pq));

  auto rearranged_cov = [&](const std::vector<int>& idx) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(pq);
    for (int i : idx) mean += vecs[i];
    mean /= static_cast<double>(idx.size());
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(pq, pq);
    for (int i : idx) s.noalias() += vecs[i] * vecs[i].transpose();
    s /= static_cast<double>(idx.size());
    s.noalias() -= mean * mean.transpose();
    return reshape(BlockMatrix(std::move(s), p, q));
  };

  RssSummary out;
  out.splits = splits;
  out.ranks = ranks;
  out.seed = seed;
  out.rss_by_rank.assign(ranks.size(), std::vector<double>(splits, 0.0));

  std::vector<int> perm(n);
  double diff_sum = 0.0, diff_sq = 0.0;
  int better = 0;
  for (int s = 0; s < splits; ++s) {
    Rng rng(derive_seed(seed, s));
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.uniform_int(0, i));
      std::swap(perm[i], perm[j]);
    }
    std::vector<int> train(perm.begin(), perm.begin() + half);
    std::vector<int> test(perm.begin() + half, perm.end());
    RearrangedMatrix r_train = rearranged_cov(train);
    RearrangedMatrix r_test = rearranged_cov(test);
    for (std::size_t ri = 0; ri < ranks.size(); ++ri) {
      auto [approx, sv] = rank_d_approx(r_train, ranks[ri]);
      out.rss_by_rank[ri][s] = (approx.mat - r_test.mat).norm();
    }
    const double diff = out.rss_by_rank.back()[s] - out.rss_by_rank.front()[s];
    diff_sum += diff;
    diff_sq += diff * diff;
    if (out.rss_by_rank.back()[s] < out.rss_by_rank.front()[s]) ++better;
  }
  out.diff_mean = diff_sum / splits;
  const double var =
      splits > 1 ? (diff_sq - diff_sum * diff_sum / splits) / (splits - 1) : 0.0;
  out.diff_sd = std::sqrt(std::max(var, 0.0));
  out.frac_higher_rank_better = static_cast<double>(better) / splits;
  return out;
}

}  // namespace covdim
