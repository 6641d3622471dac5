#pragma once

#include <cstdint>
#include <vector>

#include "covdim/estimators.hpp"

namespace covdim {

// Outlier alternative: the first q-K populations span dimension d0, the last
// K have components orthogonal to that span.
struct AlternativeSpec {
  std::vector<SymMatrix> majority;
  std::vector<SymMatrix> outliers;
  int d0 = 0;
  std::vector<double> c_list;  // c_{i,p} for all q = majority + outlier groups
  double nu4 = 3.0;

  int q() const {
    return static_cast<int>(majority.size() + outliers.size());
  }
  // Checks the span-dimension invariant of the majority via m_pop.
  void validate() const;
};

struct RiResult {
  SymMatrix r;
  bool sampled = false;  // subset sum approximated by random draws
};

// (1/q) sum c_i^2 (tr(Sigma_i^2)/p)^2.
double beta_pop(const std::vector<SymMatrix>& mats,
                const std::vector<double>& c_list);

// R_i: averaged matrix-row determinants over d0-subsets excluding i
// (i is 1-based over the combined majority+outlier list). Exact enumeration
// up to q <= 60; beyond that, seeded uniform subset sampling with 1e5 draws.
RiResult r_i_matrix(const AlternativeSpec& spec, int i,
                    std::uint64_t sample_seed = 0);

// (1/q) sum_i c_i mu(R_i, R_i | Sigma_i); zero under the null configuration.
double r_pop(const AlternativeSpec& spec, std::uint64_t sample_seed = 0);

// gamma_{p,q} = sum_j tr(Sigma_perp_j^2) / (2 sqrt(q) sqrt(beta_p)).
double gamma_outlier(const AlternativeSpec& spec);

// Asymptotic power lower bound Phi(gamma - z_alpha).
double theoretical_power(const AlternativeSpec& spec, double alpha);

}  // namespace covdim
