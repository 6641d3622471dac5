#include "covdim/dimtest.hpp"

#include <cmath>

namespace covdim {

double m_hat(const GramMatrix& g_hat, int k, MinorStrategy strategy) {
  return principal_minor_sum(g_hat, k, strategy) /
         binomial(g_hat.size_q(), k);
}

double beta_hat(const GramMatrix& g_hat, const std::vector<double>& c_list) {
  const int q = g_hat.size_q();
  if (static_cast<int>(c_list.size()) != q)
    throw DimensionError("beta_hat: c_list length != q");
  double s = 0.0;
  for (int i = 0; i < q; ++i) {
    if (c_list[i] <= 0.0) throw DomainError("beta_hat: c_list entries must be > 0");
    const double gii = g_hat.entries(i, i);
    s += c_list[i] * c_list[i] * gii * gii;
  }
  return s / q;
}

double sigma_hat(double m_hat_d0, double beta_hat, int d0) {
  if (beta_hat < 0.0) throw DomainError("sigma_hat: beta_hat must be >= 0");
  return 2.0 * (d0 + 1) * std::abs(m_hat_d0) * std::sqrt(beta_hat);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double z_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("z_alpha: alpha must be in (0,1)");
  double lo = -40.0, hi = 40.0;
  while (hi - lo > 1e-12) {
    double mid = 0.5 * (lo + hi);
    if (normal_sf(mid) > alpha)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

TestReport dim_test(const std::vector<GroupSample>& groups, int d0,
                    double alpha, const TestOptions& opts) {
  const int q = static_cast<int>(groups.size());
  if (d0 < 1) throw DomainError("dim_test: d0 must be >= 1");
  if (q < d0 + 2) throw DomainError("dim_test: need q >= d0 + 2");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("dim_test: alpha must be in (0,1)");

  GramMatrix g = gram_hat(groups, opts.center);
  std::vector<double> c_list;
  c_list.reserve(q);
  for (const auto& gr : groups) c_list.push_back(gr.c_ip);

  TestReport r;
  r.d0 = d0;
  r.q = q;
  r.p = groups[0].p;
  r.alpha = alpha;
  r.m_hat_d0 = m_hat(g, d0, opts.strategy);
  r.m_hat_d0p1 = m_hat(g, d0 + 1, opts.strategy);
  r.beta_hat = beta_hat(g, c_list);
  r.sigma_hat = sigma_hat(r.m_hat_d0, r.beta_hat, d0);
  if (r.sigma_hat == 0.0)
    throw DegenerateVarianceError(
        "dim_test: sigma_hat vanished (M_hat^(d0) is zero)");
  r.statistic = std::sqrt(static_cast<double>(q)) * r.p * r.m_hat_d0p1 /
                r.sigma_hat;
  r.p_value = normal_sf(r.statistic);
  r.reject = r.statistic > z_alpha(alpha);
  return r;
}

SequentialReport sequential_dim(const std::vector<GroupSample>& groups,
                                double alpha, int d_max,
                                const TestOptions& opts) {
  const int q = static_cast<int>(groups.size());
  if (d_max < 0) d_max = q - 2;
  if (d_max < 1) throw DomainError("sequential_dim: d_max must be >= 1");
  SequentialReport out;
  out.alpha = alpha;
  for (int d = 1; d <= d_max; ++d) {
    TestReport r = dim_test(groups, d, alpha, opts);
    out.per_d.emplace_back(d, r);
    if (!r.reject) {
      out.estimated_d = d;
      break;
    }
  }
  return out;
}

}  // namespace covdim
