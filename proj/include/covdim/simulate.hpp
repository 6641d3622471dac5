#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "covdim/power.hpp"
#include "covdim/rng.hpp"

namespace covdim {

enum class NoiseKind { Normal, CenteredGamma };

enum class ScenarioKind { ExampleA, ExampleB, Custom };

// Generative description of one simulation draw: the q covariance matrices,
// their cached PSD square roots, sample sizes, noise family and true span
// dimension.
struct Scenario {
  ScenarioKind kind = ScenarioKind::Custom;
  int p = 0;
  int q = 0;
  double w = 0.0;
  std::vector<SymMatrix> sigma_list;
  std::vector<SymMatrix> sqrt_list;
  std::vector<int> n_list;
  NoiseKind noise = NoiseKind::Normal;
  int d0_true = 0;
  std::uint64_t seed = 0;

  AlternativeSpec to_alternative_spec() const;
};

struct McResult {
  std::vector<double> w_grid;
  std::vector<double> rejection_rate;
  std::vector<double> theoretical;
  std::vector<int> excluded;  // degenerate-variance reps per w
  int reps = 0;
  double alpha = 0.05;
  std::uint64_t seed = 0;
};

// Example-1 family: two random rotated-diagonal matrices plus an outlier
// mixing in a third; d0_true = 2.
Scenario scenario_a(int p, int q, double w, std::uint64_t seed,
                    std::pair<int, int> n_bounds, NoiseKind noise);

// Example-2 family: banded matrices over the indicator basis {L0..L3} with
// random a_j, b_j in [-2,2] and A0 = 2.5; d0_true = 3.
Scenario scenario_b(int p, int q, double w, std::uint64_t seed,
                    std::pair<int, int> n_bounds, NoiseKind noise);

// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the R
// diagonal sign-normalized.
Eigen::MatrixXd haar_orthogonal(int p, Rng& rng);

GroupSample draw_group(const SymMatrix& sqrt_sigma, int n, NoiseKind noise,
                       std::uint64_t stream_seed, int group_id = 0);

using ScenarioFactory =
    std::function<Scenario(double w, std::uint64_t seed)>;

// Monte-Carlo size/power harness. Per (w, rep) a fresh scenario is built from
// a counter-derived seed, all groups are drawn, dim_test at d0 is run and the
// rejection recorded. Deterministic given master_seed.
McResult run_mc(const ScenarioFactory& factory,
                const std::vector<double>& w_grid, int reps, double alpha,
                int d0, std::uint64_t master_seed);

}  // namespace covdim
