#include "jointsub/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace jointsub {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename T>
T get_field(const json& j, const char* name, T fallback) {
  if (!j.contains(name)) return fallback;
  try {
    return j.at(name).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("invalid field '") + name + "': " + e.what());
  }
}

template <typename T>
T require_field(const json& j, const char* name) {
  if (!j.contains(name)) throw std::invalid_argument(std::string("missing field '") + name + "'");
  return get_field<T>(j, name, T{});
}

std::vector<double> number_or_list(const json& j, const char* name,
                                   std::vector<double> fallback) {
  if (!j.contains(name)) return fallback;
  const json& v = j.at(name);
  if (v.is_number()) return {v.get<double>()};
  if (v.is_array()) return get_field<std::vector<double>>(j, name, {});
  throw std::invalid_argument(std::string("invalid field '") + name +
                              "': expected a number or a list of numbers");
}

}  // namespace

void write_matrix_text(const fs::path& path, const Matrix& m) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::invalid_argument("cannot open '" + path.string() + "' for writing");
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) std::fprintf(f, j ? " %.17g" : "%.17g", m(i, j));
    std::fputc('\n', f);
  }
  if (std::fclose(f) != 0) throw std::invalid_argument("error writing '" + path.string() + "'");
}

Matrix read_matrix_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open matrix file '" + path.string() + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size())
        throw std::invalid_argument("matrix file '" + path.string() + "': bad number '" + tok + "'");
      row.push_back(v);
    }
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::invalid_argument("matrix file '" + path.string() + "': ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("matrix file '" + path.string() + "' is empty");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

ScenarioConfig scenario_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("scenario must be a JSON object");
  ScenarioConfig c;
  c.M = get_field<Index>(j, "M", c.M);
  c.R = get_field<Index>(j, "R", c.R);
  c.T = get_field<Index>(j, "T", c.T);
  c.K = get_field<Index>(j, "K", c.K);
  c.snr_db = get_field<double>(j, "snr_db", c.snr_db);
  c.kappa = number_or_list(j, "kappa", c.kappa);
  // A single kappa applies to every link of the chain.
  if (c.kappa.size() == 1 && c.K > 2) c.kappa.assign(static_cast<std::size_t>(c.K - 1), c.kappa[0]);
  c.true_angles_deg = get_field<std::vector<double>>(j, "true_angles", c.true_angles_deg);
  c.n_burn = get_field<std::size_t>(j, "n_burn", c.n_burn);
  c.n_keep = get_field<std::size_t>(j, "n_keep", c.n_keep);
  c.n_imap = get_field<std::size_t>(j, "n_imap", c.n_imap);
  c.inner_sweeps = get_field<std::size_t>(j, "inner_sweeps", c.inner_sweeps);
  c.seed = get_field<std::uint64_t>(j, "seed", c.seed);
  c.validate();
  return c;
}

json scenario_to_json(const ScenarioConfig& c) {
  return json{{"M", c.M},
              {"R", c.R},
              {"T", c.T},
              {"K", c.K},
              {"snr_db", c.snr_db},
              {"kappa", c.kappa},
              {"true_angles", c.true_angles_deg},
              {"n_burn", c.n_burn},
              {"n_keep", c.n_keep},
              {"n_imap", c.n_imap},
              {"inner_sweeps", c.inner_sweeps},
              {"seed", c.seed}};
}

void write_dataset(const fs::path& descriptor, const DataSet& data) {
  data.validate();
  const fs::path dir = descriptor.parent_path();
  if (!dir.empty()) fs::create_directories(dir);
  const std::string stem = descriptor.stem().string();
  json j = scenario_to_json(data.config);
  j["sigma2"] = data.sigma2;
  std::vector<std::string> xs, hs;
  for (std::size_t k = 0; k < data.X.size(); ++k) {
    const std::string name = stem + "_X" + std::to_string(k + 1) + ".txt";
    write_matrix_text(dir / name, data.X[k]);
    xs.push_back(name);
  }
  for (std::size_t k = 0; k < data.H_true.size(); ++k) {
    const std::string name = stem + "_H" + std::to_string(k + 1) + ".txt";
    write_matrix_text(dir / name, data.H_true[k].matrix());
    hs.push_back(name);
  }
  j["X"] = xs;
  if (!hs.empty()) j["H_true"] = hs;
  std::ofstream out(descriptor);
  if (!out) throw std::invalid_argument("cannot open '" + descriptor.string() + "' for writing");
  out << j.dump(2) << '\n';
}

DataSet read_dataset(const fs::path& descriptor) {
  std::ifstream in(descriptor);
  if (!in) throw std::invalid_argument("cannot open data descriptor '" + descriptor.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("data descriptor '" + descriptor.string() +
                                "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("data descriptor must be a JSON object");
  const fs::path dir = descriptor.parent_path();

  DataSet data;
  const auto files = require_field<std::vector<std::string>>(j, "X");
  if (files.empty()) throw std::invalid_argument("invalid field 'X': no matrix files listed");
  for (const auto& f : files) data.X.push_back(read_matrix_text(dir / f));
  json cfg = j;
  if (!cfg.contains("K")) cfg["K"] = files.size();
  if (!cfg.contains("M")) cfg["M"] = data.X.front().rows();
  if (!cfg.contains("T")) cfg["T"] = data.X.front().cols();
  // The noise level is given directly; true_angles are optional here.
  if (!cfg.contains("true_angles"))
    cfg["true_angles"] = std::vector<double>(get_field<std::size_t>(cfg, "R", 2), 0.0);
  data.config = scenario_from_json(cfg);
  data.sigma2 = require_field<double>(j, "sigma2");
  if (j.contains("H_true")) {
    for (const auto& f : get_field<std::vector<std::string>>(j, "H_true", {})) {
      try {
        data.H_true.emplace_back(read_matrix_text(dir / f));
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("invalid field 'H_true': ") + e.what());
      }
    }
  }
  data.validate();
  return data;
}

}  // namespace jointsub
