#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "covdim/estimators.hpp"

namespace covdim {

struct TestReport {
  int d0 = 0;
  double m_hat_d0 = 0.0;
  double m_hat_d0p1 = 0.0;
  double beta_hat = 0.0;
  double sigma_hat = 0.0;
  double statistic = 0.0;
  double p_value = 0.0;
  double alpha = 0.05;
  bool reject = false;
  int q = 0;
  int p = 0;
};

struct SequentialReport {
  std::optional<int> estimated_d;  // first accepted d, or nullopt
  std::vector<std::pair<int, TestReport>> per_d;
  double alpha = 0.05;  // raw per-step level, no multiplicity correction
};

struct TestOptions {
  MinorStrategy strategy = MinorStrategy::Auto;
  bool center = false;
};

// C(q,k)^{-1} * principal_minor_sum of the estimated Gram. May be negative.
double m_hat(const GramMatrix& g_hat, int k,
             MinorStrategy strategy = MinorStrategy::Auto);

// (1/q) sum c_i^2 Ghat_ii^2.
double beta_hat(const GramMatrix& g_hat, const std::vector<double>& c_list);

// 2 (d0+1) |Mhat^(d0)| sqrt(beta_hat).
double sigma_hat(double m_hat_d0, double beta_hat, int d0);

// Standard normal survival function 1 - Phi(z).
double normal_sf(double z);

// (1-alpha) quantile of N(0,1), by bisection on normal_sf.
double z_alpha(double alpha);

TestReport dim_test(const std::vector<GroupSample>& groups, int d0,
                    double alpha, const TestOptions& opts = {});

SequentialReport sequential_dim(const std::vector<GroupSample>& groups,
                                double alpha, int d_max = -1,
                                const TestOptions& opts = {});

}  // namespace covdim
