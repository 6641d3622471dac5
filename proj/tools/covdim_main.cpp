#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "covdim/io.hpp"

namespace {

using covdim::ConfigError;
using ordered_json = nlohmann::ordered_json;

struct CommonOpts {
  double alpha = 0.05;
  std::uint64_t seed = 1;
  std::string out_path = "covdim_report";
  std::string config_file;
};

// Config file keys are applied only where no flag was given on the command
// line; unknown keys are rejected.
void apply_config_file(CLI::App* cmd, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  ordered_json j;
  try {
    j = ordered_json::parse(f);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config file parse error: ") + e.what());
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    CLI::Option* opt = cmd->get_option_no_throw("--" + it.key());
    if (opt == nullptr)
      throw ConfigError("unknown config key: " + it.key());
    if (opt->count() > 0) continue;  // flag overrides config value
    std::string v = it.value().is_string() ? it.value().get<std::string>()
                                           : it.value().dump();
    opt->add_result(v);
    opt->run_callback();
  }
}

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> grid;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      grid.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigError("w_grid: bad value '" + tok + "'");
    }
  }
  if (grid.empty()) throw ConfigError("w_grid: empty grid");
  return grid;
}

std::vector<int> parse_ranks(const std::string& s) {
  std::vector<int> ranks;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      ranks.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw ConfigError("ranks: bad value '" + tok + "'");
    }
  }
  if (ranks.empty()) throw ConfigError("ranks: empty list");
  return ranks;
}

covdim::NoiseKind parse_noise(const std::string& s) {
  if (s == "normal") return covdim::NoiseKind::Normal;
  if (s == "gamma") return covdim::NoiseKind::CenteredGamma;
  throw ConfigError("noise: expected 'normal' or 'gamma', got '" + s + "'");
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ConfigError("alpha: must be in (0,1)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Many-sample covariance span dimensionality test"};
  app.require_subcommand(1);

  CommonOpts common;

  // --- test ---
  auto* cmd_test = app.add_subcommand("test", "Run the dimensionality test");
  std::string data_dir;
  int d0 = 1;
  bool center = false;
  cmd_test->add_option("--data", data_dir, "Directory of group_<id>.csv files")
      ->required();
  cmd_test->add_option("--d0", d0, "Null span dimension");
  cmd_test->add_option("--alpha", common.alpha, "Significance level");
  cmd_test->add_flag("--center", center, "Subtract per-group means");
  cmd_test->add_option("--out", common.out_path, "Output path stem");
  cmd_test->add_option("--config", common.config_file, "JSON config file");

  // --- seq ---
  auto* cmd_seq = app.add_subcommand("seq", "Sequential dimension estimation");
  int d_max = -1;
  cmd_seq->add_option("--data", data_dir, "Directory of group_<id>.csv files")
      ->required();
  cmd_seq->add_option("--alpha", common.alpha, "Per-step significance level");
  cmd_seq->add_option("--d-max", d_max, "Largest d to test (default q-2)");
  cmd_seq->add_flag("--center", center, "Subtract per-group means");
  cmd_seq->add_option("--out", common.out_path, "Output path stem");
  cmd_seq->add_option("--config", common.config_file, "JSON config file");

  // --- simulate ---
  auto* cmd_sim = app.add_subcommand("simulate", "Monte-Carlo size/power study");
  std::string example = "b";
  int p = 200, q = 50, reps = 100;
  int n_min = 200, n_max = 600;
  std::string w_grid_str = "0,0.2,0.4,0.6,0.8,1.0";
  std::string noise_str = "normal";
  int sim_d0 = -1;
  cmd_sim->add_option("--example", example, "Scenario family: a or b");
  cmd_sim->add_option("--p", p, "Dimension p");
  cmd_sim->add_option("--q", q, "Number of groups q");
  cmd_sim->add_option("--reps", reps, "Replications per grid point");
  cmd_sim->add_option("--w-grid", w_grid_str, "Comma-separated w values");
  cmd_sim->add_option("--noise", noise_str, "Noise family: normal or gamma");
  cmd_sim->add_option("--n-min", n_min, "Smallest group sample size");
  cmd_sim->add_option("--n-max", n_max, "Largest group sample size");
  cmd_sim->add_option("--d0", sim_d0, "Tested d0 (default: family's true d0)");
  cmd_sim->add_option("--alpha", common.alpha, "Significance level");
  cmd_sim->add_option("--seed", common.seed, "Master seed");
  cmd_sim->add_option("--out", common.out_path, "Output path stem");
  cmd_sim->add_option("--config", common.config_file, "JSON config file");

  // --- power ---
  auto* cmd_pow = app.add_subcommand("power", "Theoretical power curve");
  cmd_pow->add_option("--example", example, "Scenario family: a or b");
  cmd_pow->add_option("--p", p, "Dimension p");
  cmd_pow->add_option("--q", q, "Number of groups q");
  cmd_pow->add_option("--w-grid", w_grid_str, "Comma-separated w values");
  cmd_pow->add_option("--noise", noise_str, "Noise family: normal or gamma");
  cmd_pow->add_option("--n-min", n_min, "Smallest group sample size");
  cmd_pow->add_option("--n-max", n_max, "Largest group sample size");
  cmd_pow->add_option("--alpha", common.alpha, "Significance level");
  cmd_pow->add_option("--seed", common.seed, "Seed for the scenario draw");
  cmd_pow->add_option("--out", common.out_path, "Output path stem");
  cmd_pow->add_option("--config", common.config_file, "JSON config file");

  // --- kron ---
  auto* cmd_kron = app.add_subcommand("kron", "Kronecker-sum RSS experiment");
  std::string obs_file;
  std::string ranks_str = "1,3";
  int splits = 1000;
  cmd_kron->add_option("--data", obs_file, "Long-format observations CSV")
      ->required();
  cmd_kron->add_option("--ranks", ranks_str, "Comma-separated ranks");
  cmd_kron->add_option("--splits", splits, "Number of random splits");
  cmd_kron->add_option("--seed", common.seed, "Split seed");
  cmd_kron->add_option("--out", common.out_path, "Output path stem");
  cmd_kron->add_option("--config", common.config_file, "JSON config file");

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
        return app.exit(e);
      throw ConfigError(e.what());
    }
    CLI::App* active = app.get_subcommands().front();
    if (!common.config_file.empty()) {
      apply_config_file(active, common.config_file);
    }
    check_alpha(common.alpha);

    ordered_json cfg;
    cfg["command"] = active->get_name();
    cfg["alpha"] = common.alpha;
    cfg["seed"] = common.seed;

    if (active == cmd_test) {
      if (d0 < 1) throw ConfigError("d0: must be >= 1");
      auto groups = covdim::load_groups(data_dir);
      covdim::TestOptions opts;
      opts.center = center;
      auto report = covdim::dim_test(groups, d0, common.alpha, opts);
      cfg["data"] = data_dir;
      cfg["d0"] = d0;
      cfg["center"] = center;
      covdim::emit_report(report, common.out_path, cfg.dump());
      std::cout << "statistic=" << report.statistic
                << " p_value=" << report.p_value
                << " reject=" << (report.reject ? "true" : "false") << "\n";
    } else if (active == cmd_seq) {
      auto groups = covdim::load_groups(data_dir);
      covdim::TestOptions opts;
      opts.center = center;
      auto report = covdim::sequential_dim(groups, common.alpha, d_max, opts);
      cfg["data"] = data_dir;
      cfg["d_max"] = d_max;
      cfg["center"] = center;
      covdim::emit_report(report, common.out_path, cfg.dump());
      if (report.estimated_d)
        std::cout << "estimated_d=" << *report.estimated_d << "\n";
      else
        std::cout << "estimated_d=not_found\n";
    } else if (active == cmd_sim || active == cmd_pow) {
      if (example != "a" && example != "b")
        throw ConfigError("example: must be 'a' or 'b'");
      if (p < 2 || q < 4) throw ConfigError("p/q: out of range");
      if (n_min < 5 || n_max < n_min) throw ConfigError("n-min/n-max: invalid");
      auto noise = parse_noise(noise_str);
      auto grid = parse_grid(w_grid_str);
      auto bounds = std::make_pair(n_min, n_max);
      covdim::ScenarioFactory factory =
          [&](double w, std::uint64_t s) {
            return example == "a"
                       ? covdim::scenario_a(p, q, w, s, bounds, noise)
                       : covdim::scenario_b(p, q, w, s, bounds, noise);
          };
      cfg["example"] = example;
      cfg["p"] = p;
      cfg["q"] = q;
      cfg["w_grid"] = grid;
      cfg["noise"] = noise_str;
      cfg["n_bounds"] = {n_min, n_max};
      if (active == cmd_sim) {
        if (reps < 1) throw ConfigError("reps: must be >= 1");
        const int true_d0 = example == "a" ? 2 : 3;
        const int used_d0 = sim_d0 > 0 ? sim_d0 : true_d0;
        cfg["reps"] = reps;
        cfg["d0"] = used_d0;
        auto result = covdim::run_mc(factory, grid, reps, common.alpha,
                                     used_d0, common.seed);
        covdim::emit_report(result, common.out_path, cfg.dump());
        for (std::size_t i = 0; i < grid.size(); ++i)
          std::cout << "w=" << grid[i]
                    << " rate=" << result.rejection_rate[i]
                    << " theoretical=" << result.theoretical[i] << "\n";
      } else {
        covdim::McResult result;
        result.w_grid = grid;
        result.reps = 0;
        result.alpha = common.alpha;
        result.seed = common.seed;
        result.excluded.assign(grid.size(), 0);
        result.rejection_rate.assign(grid.size(), 0.0);
        for (std::size_t i = 0; i < grid.size(); ++i) {
          covdim::Scenario sc =
              factory(grid[i], covdim::derive_seed(common.seed, i, 0));
          result.theoretical.push_back(covdim::theoretical_power(
              sc.to_alternative_spec(), common.alpha));
        }
        covdim::emit_report(result, common.out_path, cfg.dump());
        for (std::size_t i = 0; i < grid.size(); ++i)
          std::cout << "w=" << grid[i]
                    << " theoretical=" << result.theoretical[i] << "\n";
      }
    } else if (active == cmd_kron) {
      auto ranks = parse_ranks(ranks_str);
      if (splits < 1) throw ConfigError("splits: must be >= 1");
      auto obs = covdim::load_matrix_observations(obs_file);
      auto summary = covdim::rss_experiment(obs, ranks, splits, common.seed);
      cfg["data"] = obs_file;
      cfg["ranks"] = ranks;
      cfg["splits"] = splits;
      covdim::emit_report(summary, common.out_path, cfg.dump());
      std::cout << "frac_higher_rank_better=" << summary.frac_higher_rank_better
                << " diff_mean=" << summary.diff_mean
                << " diff_sd=" << summary.diff_sd << "\n";
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const covdim::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const covdim::EmptyInputError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const covdim::SampleTooSmallError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const covdim::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const covdim::Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  }
}
