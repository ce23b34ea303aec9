#include "jointsub/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "jointsub/errors.hpp"
#include "jointsub/estimators.hpp"
#include "jointsub/harness.hpp"
#include "jointsub/io.hpp"

namespace jointsub {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNumerical = 2;

void print_matrix(const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    std::printf("   ");
    for (Index j = 0; j < m.cols(); ++j) std::printf(" % .10f", m(i, j));
    std::printf("\n");
  }
}

void print_estimate(const EstimateResult& est, const DataSet& data) {
  std::printf("[%s]\n", std::string(method_name(est.method)).c_str());
  for (std::size_t k = 0; k < est.H_hat.size(); ++k) {
    std::printf("  H%zu =\n", k + 1);
    print_matrix(est.H_hat[k].matrix());
  }
  for (std::size_t k = 0; k + 1 < est.H_hat.size(); ++k) {
    std::printf("  angles_deg(H%zu,H%zu):", k + 1, k + 2);
    for (double a : principal_angles(est.H_hat[k], est.H_hat[k + 1]).degrees())
      std::printf(" %.4f", a);
    std::printf("\n");
  }
  if (!data.H_true.empty()) {
    std::printf("  msd:");
    for (std::size_t k = 0; k < est.H_hat.size(); ++k)
      std::printf(" %.6e", subspace_sq_distance(est.H_hat[k], data.H_true[k]));
    std::printf("\n");
  }
  if (est.method == Method::imap)
    std::printf("  iterations: %zu\n", est.log_posterior_trace.size());
  if (est.method == Method::gibbs) std::printf("  kept_samples: %zu\n", est.kept_samples);
  if (est.degenerate) std::printf("  warning: rank-deficient data, arbitrary completion used\n");
}

ScenarioConfig scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open scenario '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("scenario '" + path + "' is not valid JSON: " + e.what());
  }
  if (j.is_object() && j.contains("base")) return sweep_spec_from_json(j).base;
  return scenario_from_json(j);
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Joint Bayesian estimation of close subspaces"};
  app.require_subcommand(1);

  std::string spec_path, data_path, out_path;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;

  auto* sweep = app.add_subcommand("sweep", "Run a Monte Carlo sweep and write a CSV summary");
  sweep->add_option("--spec", spec_path, "Sweep spec JSON")->required();
  sweep->add_option("--seed", seed, "Override the master seed");
  sweep->add_option("--threads", threads, "Worker threads (0 = all cores)");
  sweep->add_option("--out", out_path, "Override the output CSV path");

  auto* estimate = app.add_subcommand("estimate", "Run all estimators on a stored data set");
  estimate->add_option("--data", data_path, "Data set descriptor JSON")->required();
  estimate->add_option("--seed", seed, "Seed of the Gibbs sampler");

  auto* generate = app.add_subcommand("generate", "Simulate one data set and store it");
  generate->add_option("--spec", spec_path, "Scenario JSON (or sweep spec, uses its base)")
      ->required();
  generate->add_option("--out", out_path, "Descriptor path to write")->required();
  generate->add_option("--seed", seed, "Override the scenario seed");

  auto* selftest = app.add_subcommand("selftest", "Check invariants at tiny dimensions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*sweep) {
      SweepSpec spec = read_sweep_spec(spec_path);
      if (seed) spec.base.seed = *seed;
      if (!out_path.empty()) spec.output_path = out_path;
      const SweepResult res = run_sweep(spec, threads);
      if (spec.output_path.empty()) {
        std::cout << format_summary_csv(res.rows);
      } else {
        std::cerr << "wrote " << res.rows.size() << " rows to " << spec.output_path.string()
                  << '\n';
      }
      if (res.failed_trials > 0) {
        std::cerr << res.failed_trials << " estimator runs failed\n";
        return kExitNumerical;
      }
    } else if (*estimate) {
      const DataSet data = read_dataset(data_path);
      RandomStream rng = make_stream(seed.value_or(data.config.seed), {1});
      print_estimate(svd_estimates(data), data);
      print_estimate(gibbs_estimate(data, rng), data);
      print_estimate(imap_estimate(data), data);
    } else if (*generate) {
      ScenarioConfig cfg = scenario_file(spec_path);
      if (seed) cfg.seed = *seed;
      const auto truth = sweep_truth(cfg);
      RandomStream rng = make_stream(trial_seed(cfg.seed, 0, 0), {0});
      write_dataset(out_path, generate_data(cfg, truth, rng));
    } else if (*selftest) {
      return run_selftest(std::cout) ? kExitOk : kExitNumerical;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace jointsub
