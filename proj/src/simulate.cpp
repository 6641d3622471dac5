#include "covdim/simulate.hpp"

#include <cmath>

#include "covdim/dimtest.hpp"

namespace covdim {

namespace {

constexpr std::uint64_t kGroupStreamTag = 0xD0A7;

void validate_span(const Scenario& s) {
  GramMatrix g = gram(s.sigma_list);
  const int expect = s.w == 0.0 ? s.d0_true : s.d0_true + 1;
  const double at_d = principal_minor_sum(g, expect, MinorStrategy::Spectral) /
                      binomial(s.q, expect);
  const double beyond =
      expect + 1 <= s.q
          ? principal_minor_sum(g, expect + 1, MinorStrategy::Spectral) /
                binomial(s.q, expect + 1)
          : 0.0;
  double scale = 1.0;
  const double gmax = g.entries.diagonal().maxCoeff();
  for (int t = 0; t <= expect; ++t) scale *= std::max(gmax, 1.0);
  if (at_d <= 0.0 || std::abs(beyond) > 1e-9 * scale)
    throw NumericalError("Scenario: span dimension invariant violated");
}

void finish_scenario(Scenario& s) {
  s.sqrt_list.reserve(s.sigma_list.size());
  for (const auto& sig : s.sigma_list) s.sqrt_list.push_back(psd_sqrt(sig));
  validate_span(s);
}

}  // namespace

AlternativeSpec Scenario::to_alternative_spec() const {
  AlternativeSpec spec;
  spec.majority.assign(sigma_list.begin(), sigma_list.end() - 1);
  spec.outliers.assign(sigma_list.end() - 1, sigma_list.end());
  spec.d0 = d0_true;
  spec.c_list.reserve(q);
  for (int j = 0; j < q; ++j)
    spec.c_list.push_back(static_cast<double>(p) / n_list[j]);
  spec.nu4 = noise == NoiseKind::Normal ? 3.0 : 4.5;
  return spec;
}

Eigen::MatrixXd haar_orthogonal(int p, Rng& rng) {
  Eigen::MatrixXd a(p, p);
  for (int c = 0; c < p; ++c)
    for (int r = 0; r < p; ++r) a(r, c) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q_mat = qr.householderQ();
  Eigen::MatrixXd r_mat = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < p; ++c)
    if (r_mat(c, c) < 0.0) q_mat.col(c) = -q_mat.col(c);
  return q_mat;
}

Scenario scenario_a(int p, int q, double w, std::uint64_t seed,
                    std::pair<int, int> n_bounds, NoiseKind noise) {
  if (q < 4) throw DomainError("scenario_a: need q >= 4");
  if (p < 2) throw DomainError("scenario_a: need p >= 2");
  if (!(w >= 0.0 && w <= 1.0)) throw DomainError("scenario_a: w in [0,1]");
  Rng rng(derive_seed(seed, 0xA));

  std::vector<SymMatrix> lambdas;
  for (int j = 0; j < 3; ++j) {
    Eigen::MatrixXd u = haar_orthogonal(p, rng);
    Eigen::VectorXd d(p);
    for (int r = 0; r < p; ++r) d[r] = rng.uniform();
    Eigen::MatrixXd lam = u.transpose() * d.asDiagonal() * u;
    lambdas.emplace_back(((lam + lam.transpose()) / 2.0).eval());
  }

  std::vector<int> labels(q);
  for (;;) {
    bool one = false, two = false;
    for (int j = 0; j < q; ++j) {
      labels[j] = 1 + static_cast<int>(rng.uniform_int(0, 1));
      if (j < q - 1) (labels[j] == 1 ? one : two) = true;
    }
    if (one && two) break;
  }

  Scenario s;
  s.kind = ScenarioKind::ExampleA;
  s.p = p;
  s.q = q;
  s.w = w;
  s.noise = noise;
  s.d0_true = 2;
  s.seed = seed;
  for (int j = 0; j < q - 1; ++j) s.sigma_list.push_back(lambdas[labels[j] - 1]);
  s.sigma_list.push_back(
      lambdas[labels[q - 1] - 1].scaled(1.0 - w) + lambdas[2].scaled(w));
  s.n_list.reserve(q);
  for (int j = 0; j < q; ++j)
    s.n_list.push_back(
        static_cast<int>(rng.uniform_int(n_bounds.first, n_bounds.second)));
  finish_scenario(s);
  return s;
}

Scenario scenario_b(int p, int q, double w, std::uint64_t seed,
                    std::pair<int, int> n_bounds, NoiseKind noise) {
  if (q < 4) throw DomainError("scenario_b: need q >= 4");
  if (p < 7) throw DomainError("scenario_b: need p >= 7");
  if (!(w >= 0.0 && w <= 1.0)) throw DomainError("scenario_b: w in [0,1]");
  const double a0 = 2.5;
  Rng rng(derive_seed(seed, 0xB));

  Scenario s;
  s.kind = ScenarioKind::ExampleB;
  s.p = p;
  s.q = q;
  s.w = w;
  s.noise = noise;
  s.d0_true = 3;
  s.seed = seed;

  const SymMatrix l0 = SymMatrix::identity(p);
  const SymMatrix l1 = SymMatrix::band_indicator(p, 1);
  const SymMatrix l2 = SymMatrix::band_indicator(p, 2);
  const SymMatrix l3 = SymMatrix::band_indicator(p, 3);
  for (int j = 0; j < q; ++j) {
    const double a = -2.0 + 4.0 * rng.uniform();
    const double b = -2.0 + 4.0 * rng.uniform();
    if (j < q - 1) {
      s.sigma_list.push_back(l0.scaled(1.0 + a * a + b * b) +
                             l1.scaled(a * (1.0 + b)) + l2.scaled(b));
    } else {
      s.sigma_list.push_back(
          l0.scaled(1.0 + a * a + b * b + w * w * a0 * a0) +
          l1.scaled(a + a * b + w * b * a0) + l2.scaled(b + w * a * a0) +
          l3.scaled(w * a0));
    }
  }
  s.n_list.reserve(q);
  for (int j = 0; j < q; ++j)
    s.n_list.push_back(
        static_cast<int>(rng.uniform_int(n_bounds.first, n_bounds.second)));
  finish_scenario(s);
  return s;
}

GroupSample draw_group(const SymMatrix& sqrt_sigma, int n, NoiseKind noise,
                       std::uint64_t stream_seed, int group_id) {
  if (n < 5) throw SampleTooSmallError("draw_group: need n >= 5");
  const int p = sqrt_sigma.dim_p();
  Rng rng(stream_seed);
  Eigen::MatrixXd z(p, n);
  if (noise == NoiseKind::Normal) {
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < p; ++r) z(r, c) = rng.normal();
  } else {
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < p; ++r) z(r, c) = rng.centered_gamma();
  }
  Eigen::MatrixXd x;
  x.noalias() = sqrt_sigma.mat() * z;
  return GroupSample(group_id, std::move(x));
}

McResult run_mc(const ScenarioFactory& factory,
                const std::vector<double>& w_grid, int reps, double alpha,
                int d0, std::uint64_t master_seed) {
  if (reps < 1) throw DomainError("run_mc: need reps >= 1");
  for (double w : w_grid)
    if (!(w >= 0.0 && w <= 1.0)) throw DomainError("run_mc: w in [0,1]");

  McResult out;
  out.w_grid = w_grid;
  out.reps = reps;
  out.alpha = alpha;
  out.seed = master_seed;
  out.rejection_rate.assign(w_grid.size(), 0.0);
  out.theoretical.assign(w_grid.size(), 0.0);
  out.excluded.assign(w_grid.size(), 0);

  for (std::size_t wi = 0; wi < w_grid.size(); ++wi) {
    int rejects = 0, valid = 0;
    double theo_sum = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
      const std::uint64_t seed = derive_seed(master_seed, wi, rep);
      Scenario sc = factory(w_grid[wi], seed);
      std::vector<GroupSample> groups;
      groups.reserve(sc.q);
      for (int j = 0; j < sc.q; ++j)
        groups.push_back(draw_group(sc.sqrt_list[j], sc.n_list[j], sc.noise,
                                    derive_seed(seed, kGroupStreamTag, j), j));
      theo_sum += theoretical_power(sc.to_alternative_spec(), alpha);
      try {
        TestReport r = dim_test(groups, d0, alpha);
        if (r.reject) ++rejects;
        ++valid;
      } catch (const DegenerateVarianceError&) {
        ++out.excluded[wi];
      }
    }
    out.rejection_rate[wi] = valid > 0 ? static_cast<double>(rejects) / valid : 0.0;
    out.theoretical[wi] = theo_sum / reps;
  }
  return out;
}

}  // namespace covdim
