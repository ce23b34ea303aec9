#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "jointsub/estimators.hpp"
#include "jointsub/model.hpp"

namespace jointsub {

enum class SweepVariable { T, snr_db };

std::string_view sweep_variable_name(SweepVariable v) noexcept;

struct SweepSpec {
  ScenarioConfig base;
  SweepVariable variable = SweepVariable::T;
  std::vector<double> values;
  std::size_t n_trials = 100;
  /// Empty means "do not write a file".
  std::filesystem::path output_path;

  void validate() const;
};

/// Default grids used when a spec file omits sweep_values.
std::vector<double> default_sweep_values(SweepVariable v);

/// Keys: base (scenario object), sweep_variable ("T" | "snr_db"),
/// sweep_values (list, optional), n_trials, output_path (optional).
SweepSpec sweep_spec_from_json(const nlohmann::json& j);
SweepSpec read_sweep_spec(const std::filesystem::path& path);

struct TrialMetrics {
  std::size_t trial_id = 0;
  Method estimator = Method::svd;
  /// Squared subspace distance of each estimate to its truth, k = 1..K.
  std::vector<double> msd;
  /// Principal angles between the first two estimates, degrees, sorted.
  std::vector<double> theta_deg;
  bool failed = false;
  std::string error;
};

/// Ground truth shared by every trial of a sweep; depends on config.seed only.
std::vector<OrthonormalBasis> sweep_truth(const ScenarioConfig& config);

/// One Monte Carlo trial: fresh S_k and N_k from `trial_seed` on top of the
/// fixed truth, then svd, gibbs and imap. Estimator failures are returned as
/// rows with failed = true.
std::vector<TrialMetrics> run_trial(const ScenarioConfig& config, std::uint64_t trial_seed,
                                    std::size_t trial_id = 0);

/// Seed of trial `trial` at sweep point `point`.
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t point, std::size_t trial);

struct SummaryRow {
  std::string sweep_var;
  double sweep_value = 0.0;
  std::string estimator;
  std::vector<double> msd_mean;
  std::vector<double> theta_mean;
  std::vector<double> theta_std;
  std::size_t n_trials = 0;

  bool operator==(const SummaryRow&) const = default;
};

struct SweepResult {
  std::vector<SummaryRow> rows;
  /// trials[point] holds every TrialMetrics row of that sweep point, ordered
  /// by (trial_id, estimator).
  std::vector<std::vector<TrialMetrics>> trials;
  std::size_t failed_trials = 0;
};

/// Runs the sweep on `threads` worker threads (0 = hardware concurrency).
/// The result does not depend on the thread count. Writes the CSV when
/// spec.output_path is set.
SweepResult run_sweep(const SweepSpec& spec, unsigned threads = 1);

/// Aggregates trial rows of a single sweep point (mean of msd, mean and
/// sample standard deviation of each angle over non-failed trials).
std::vector<SummaryRow> summarize_point(std::span<const TrialMetrics> trials,
                                        std::string_view sweep_var, double sweep_value,
                                        std::size_t K, std::size_t R);

std::string csv_header(std::size_t K, std::size_t R);
std::string format_summary_csv(std::span<const SummaryRow> rows);
void write_summary_csv(const std::filesystem::path& path, std::span<const SummaryRow> rows);
std::vector<SummaryRow> read_summary_csv(const std::filesystem::path& path);

/// Spearman rank correlation (average ranks for ties).
double spearman_correlation(std::span<const double> x, std::span<const double> y);

}  // namespace jointsub
