#include "jointsub/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "jointsub/io.hpp"

namespace jointsub {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kTruthStream = 0x7275746855ULL;
constexpr std::uint64_t kDataStream = 0;
constexpr std::uint64_t kGibbsStream = 1;
constexpr Method kMethods[] = {Method::svd, Method::gibbs, Method::imap};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

TrialMetrics metrics_for(const EstimateResult& est, std::span<const OrthonormalBasis> truth,
                         std::size_t trial_id) {
  TrialMetrics m;
  m.trial_id = trial_id;
  m.estimator = est.method;
  for (std::size_t k = 0; k < truth.size(); ++k)
    m.msd.push_back(subspace_sq_distance(est.H_hat[k], truth[k]));
  m.theta_deg = principal_angles(est.H_hat[0], est.H_hat[1]).degrees();
  return m;
}

ScenarioConfig at_point(const ScenarioConfig& base, SweepVariable var, double value) {
  ScenarioConfig c = base;
  if (var == SweepVariable::T) {
    if (value < 1 || value != std::floor(value))
      throw std::invalid_argument("invalid sweep_values: T must be a positive integer");
    c.T = static_cast<Index>(value);
  } else {
    c.snr_db = value;
  }
  return c;
}

}  // namespace

std::string_view sweep_variable_name(SweepVariable v) noexcept {
  return v == SweepVariable::T ? "T" : "snr_db";
}

std::vector<double> default_sweep_values(SweepVariable v) {
  if (v == SweepVariable::T) return {3, 4, 6, 8, 12, 16, 24, 32};
  return {-10, -5, 0, 5, 10};
}

void SweepSpec::validate() const {
  base.validate();
  if (values.empty()) throw std::invalid_argument("invalid sweep_values: must not be empty");
  if (n_trials < 1) throw std::invalid_argument("invalid n_trials: must be >= 1");
  for (double v : values) at_point(base, variable, v).validate();
}

SweepSpec sweep_spec_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("sweep spec must be a JSON object");
  SweepSpec s;
  if (!j.contains("base")) throw std::invalid_argument("missing field 'base'");
  try {
    s.base = scenario_from_json(j.at("base"));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("in 'base': ") + e.what());
  }
  try {
    const std::string var = j.value("sweep_variable", std::string("T"));
    if (var == "T") {
      s.variable = SweepVariable::T;
    } else if (var == "snr_db" || var == "SNR" || var == "snr") {
      s.variable = SweepVariable::snr_db;
    } else {
      throw std::invalid_argument("invalid field 'sweep_variable': expected \"T\" or \"snr_db\"");
    }
    s.values = j.contains("sweep_values") ? j.at("sweep_values").get<std::vector<double>>()
                                          : default_sweep_values(s.variable);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("invalid field 'sweep_values' or 'sweep_variable': ") +
                                e.what());
  }
  if (j.contains("n_trials")) {
    const json& n = j.at("n_trials");
    if (!n.is_number_integer() || n.get<long long>() < 1)
      throw std::invalid_argument("invalid field 'n_trials': expected a positive integer");
    s.n_trials = n.get<std::size_t>();
  }
  if (j.contains("output_path")) {
    if (!j.at("output_path").is_string())
      throw std::invalid_argument("invalid field 'output_path': expected a string");
    s.output_path = j.at("output_path").get<std::string>();
  }
  s.validate();
  return s;
}

SweepSpec read_sweep_spec(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open sweep spec '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("sweep spec '" + path.string() + "' is not valid JSON: " +
                                e.what());
  }
  return sweep_spec_from_json(j);
}

std::vector<OrthonormalBasis> sweep_truth(const ScenarioConfig& config) {
  RandomStream rng = make_stream(config.seed, {kTruthStream});
  return make_truth(config, rng);
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t point, std::size_t trial) {
  return derive_seed(master_seed, {point, trial});
}

std::vector<TrialMetrics> run_trial(const ScenarioConfig& config, std::uint64_t seed,
                                    std::size_t trial_id) {
  const auto truth = sweep_truth(config);
  RandomStream data_rng = make_stream(seed, {kDataStream});
  const DataSet data = generate_data(config, truth, data_rng);

  std::vector<TrialMetrics> out;
  for (Method method : kMethods) {
    try {
      EstimateResult est;
      switch (method) {
        case Method::svd: est = svd_estimates(data); break;
        case Method::gibbs: {
          RandomStream rng = make_stream(seed, {kGibbsStream});
          est = gibbs_estimate(data, rng);
          break;
        }
        case Method::imap: est = imap_estimate(data); break;
      }
      out.push_back(metrics_for(est, truth, trial_id));
    } catch (const std::exception& e) {
      TrialMetrics failed;
      failed.trial_id = trial_id;
      failed.estimator = method;
      failed.failed = true;
      failed.error = e.what();
      out.push_back(std::move(failed));
    }
  }
  return out;
}

std::vector<SummaryRow> summarize_point(std::span<const TrialMetrics> trials,
                                        std::string_view sweep_var, double sweep_value,
                                        std::size_t K, std::size_t R) {
  std::vector<SummaryRow> rows;
  for (Method method : kMethods) {
    SummaryRow row;
    row.sweep_var = sweep_var;
    row.sweep_value = sweep_value;
    row.estimator = method_name(method);
    row.msd_mean.assign(K, 0.0);
    row.theta_mean.assign(R, 0.0);
    row.theta_std.assign(R, 0.0);

    std::vector<const TrialMetrics*> ok;
    for (const auto& t : trials)
      if (t.estimator == method && !t.failed) ok.push_back(&t);
    std::sort(ok.begin(), ok.end(),
              [](const TrialMetrics* a, const TrialMetrics* b) { return a->trial_id < b->trial_id; });
    row.n_trials = ok.size();
    const double n = static_cast<double>(ok.size());
    if (ok.empty()) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      std::fill(row.msd_mean.begin(), row.msd_mean.end(), nan);
      std::fill(row.theta_mean.begin(), row.theta_mean.end(), nan);
      std::fill(row.theta_std.begin(), row.theta_std.end(), nan);
      rows.push_back(std::move(row));
      continue;
    }
    for (const auto* t : ok) {
      for (std::size_t k = 0; k < K; ++k) row.msd_mean[k] += t->msd[k];
      for (std::size_t r = 0; r < R; ++r) row.theta_mean[r] += t->theta_deg[r];
    }
    for (auto& v : row.msd_mean) v /= n;
    for (auto& v : row.theta_mean) v /= n;
    if (ok.size() > 1) {
      for (const auto* t : ok)
        for (std::size_t r = 0; r < R; ++r) {
          const double d = t->theta_deg[r] - row.theta_mean[r];
          row.theta_std[r] += d * d;
        }
      for (auto& v : row.theta_std) v = std::sqrt(v / (n - 1.0));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

SweepResult run_sweep(const SweepSpec& spec, unsigned threads) {
  spec.validate();
  const std::size_t points = spec.values.size();
  const std::size_t total = points * spec.n_trials;
  std::vector<std::vector<TrialMetrics>> results(total);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t task = next++; task < total; task = next++) {
      const std::size_t point = task / spec.n_trials;
      const std::size_t trial = task % spec.n_trials;
      const ScenarioConfig cfg = at_point(spec.base, spec.variable, spec.values[point]);
      results[task] = run_trial(cfg, trial_seed(spec.base.seed, point, trial), trial);
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(total, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  SweepResult out;
  const auto K = static_cast<std::size_t>(spec.base.K);
  const auto R = static_cast<std::size_t>(spec.base.R);
  for (std::size_t point = 0; point < points; ++point) {
    std::vector<TrialMetrics> flat;
    for (std::size_t trial = 0; trial < spec.n_trials; ++trial)
      for (auto& m : results[point * spec.n_trials + trial]) {
        if (m.failed) ++out.failed_trials;
        flat.push_back(std::move(m));
      }
    auto rows = summarize_point(flat, sweep_variable_name(spec.variable), spec.values[point], K, R);
    out.rows.insert(out.rows.end(), rows.begin(), rows.end());
    out.trials.push_back(std::move(flat));
  }
  if (!spec.output_path.empty()) write_summary_csv(spec.output_path, out.rows);
  return out;
}

std::string csv_header(std::size_t K, std::size_t R) {
  std::string h = "sweep_var,sweep_value,estimator";
  for (std::size_t k = 1; k <= K; ++k) h += ",msd" + std::to_string(k);
  for (std::size_t r = 1; r <= R; ++r) {
    const std::string t = "theta" + std::to_string(r);
    h += "," + t + "_mean," + t + "_std";
  }
  return h + ",n_trials";
}

std::string format_summary_csv(std::span<const SummaryRow> rows) {
  const std::size_t K = rows.empty() ? 2 : rows.front().msd_mean.size();
  const std::size_t R = rows.empty() ? 2 : rows.front().theta_mean.size();
  std::ostringstream os;
  os << csv_header(K, R) << '\n';
  for (const auto& row : rows) {
    os << row.sweep_var << ',' << format_double(row.sweep_value) << ',' << row.estimator;
    for (double v : row.msd_mean) os << ',' << format_double(v);
    for (std::size_t r = 0; r < row.theta_mean.size(); ++r)
      os << ',' << format_double(row.theta_mean[r]) << ',' << format_double(row.theta_std[r]);
    os << ',' << row.n_trials << '\n';
  }
  return os.str();
}

void write_summary_csv(const fs::path& path, std::span<const SummaryRow> rows) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output '" + path.string() + "' for writing");
  out << format_summary_csv(rows);
  if (!out) throw std::invalid_argument("error writing '" + path.string() + "'");
}

std::vector<SummaryRow> read_summary_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open CSV '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("CSV '" + path.string() + "' is empty");
  std::size_t K = 0, R = 0;
  {
    std::istringstream hs(line);
    std::string col;
    while (std::getline(hs, col, ',')) {
      if (col.rfind("msd", 0) == 0) ++K;
      if (col.size() > 5 && col.rfind("theta", 0) == 0 && col.ends_with("_mean")) ++R;
    }
  }
  if (line != csv_header(K, R))
    throw std::invalid_argument("CSV '" + path.string() + "': unexpected header");

  std::vector<SummaryRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 4 + K + 2 * R)
      throw std::invalid_argument("CSV '" + path.string() + "': wrong field count");
    SummaryRow row;
    std::size_t i = 0;
    row.sweep_var = f[i++];
    row.sweep_value = std::stod(f[i++]);
    row.estimator = f[i++];
    for (std::size_t k = 0; k < K; ++k) row.msd_mean.push_back(std::stod(f[i++]));
    for (std::size_t r = 0; r < R; ++r) {
      row.theta_mean.push_back(std::stod(f[i++]));
      row.theta_std.push_back(std::stod(f[i++]));
    }
    row.n_trials = std::stoull(f[i++]);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[idx[t]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("spearman_correlation: need two equal-length series of size >= 2");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace jointsub
