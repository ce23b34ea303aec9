#include "jointsub/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/QR>

namespace jointsub {

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw std::invalid_argument("invalid " + field + ": " + why);
}

std::string dims(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

void ScenarioConfig::validate() const {
  if (M < 1) bad_field("M", "must be positive");
  if (R < 1) bad_field("R", "must be positive");
  if (R > M) bad_field("R", "must not exceed M");
  if (T < 1) bad_field("T", "must be positive");
  if (K < 2) bad_field("K", "must be at least 2");
  if (!std::isfinite(snr_db)) bad_field("snr_db", "must be finite");
  if (kappa.size() != static_cast<std::size_t>(K - 1))
    bad_field("kappa", "expected " + std::to_string(K - 1) + " entries, got " +
                           std::to_string(kappa.size()));
  for (double k : kappa)
    if (!(k >= 0.0) || !std::isfinite(k)) bad_field("kappa", "entries must be finite and >= 0");
  if (true_angles_deg.size() != static_cast<std::size_t>(R))
    bad_field("true_angles", "expected " + std::to_string(R) + " entries, got " +
                                 std::to_string(true_angles_deg.size()));
  for (double a : true_angles_deg)
    if (!(a >= 0.0 && a <= 90.0)) bad_field("true_angles", "entries must lie in [0, 90] degrees");
  if (n_keep == 0) bad_field("n_keep", "must be positive");
  if (n_imap == 0) bad_field("n_imap", "must be positive");
  if (inner_sweeps == 0) bad_field("inner_sweeps", "must be positive");
}

void DataSet::validate() const {
  config.validate();
  if (X.size() != static_cast<std::size_t>(config.K))
    bad_field("X", "expected " + std::to_string(config.K) + " matrices, got " +
                       std::to_string(X.size()));
  for (const Matrix& x : X)
    if (x.rows() != config.M || x.cols() != config.T)
      bad_field("X", "matrix of shape " + dims(x) + ", expected " + std::to_string(config.M) +
                         "x" + std::to_string(config.T));
  if (!H_true.empty()) {
    if (H_true.size() != X.size()) bad_field("H_true", "count does not match X");
    for (const auto& h : H_true)
      if (h.ambient_dim() != config.M || h.rank() != config.R)
        bad_field("H_true", "basis shape does not match M x R");
  }
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) bad_field("sigma2", "must be positive");
}

double sigma2_from_snr(double snr_db, Index m, Index r) {
  return static_cast<double>(r) / (static_cast<double>(m) * std::pow(10.0, snr_db / 10.0));
}

OrthonormalBasis make_close_basis(const OrthonormalBasis& h1, std::span<const double> angles_deg,
                                  RandomStream& rng) {
  const Index m = h1.ambient_dim();
  const Index r = h1.rank();
  if (angles_deg.size() != static_cast<std::size_t>(r))
    throw std::invalid_argument("make_close_basis: expected " + std::to_string(r) +
                                " angles, got " + std::to_string(angles_deg.size()));
  bool any_nonzero = false;
  for (double a : angles_deg) {
    if (!(a >= 0.0 && a <= 90.0))
      throw std::invalid_argument("make_close_basis: angles must lie in [0, 90] degrees");
    any_nonzero = any_nonzero || a != 0.0;
  }
  if (!any_nonzero) return h1;
  if (m < 2 * r)
    throw std::invalid_argument("make_close_basis: nonzero angles need M >= 2R, got M=" +
                                std::to_string(m) + ", R=" + std::to_string(r));

  const Matrix& H = h1.matrix();
  Matrix g = standard_normal(m, r, rng);
  // Two projection passes keep the directions orthogonal to span(H) to
  // working precision.
  g -= H * (H.transpose() * g);
  g -= H * (H.transpose() * g);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix w = qr.householderQ() * Matrix::Identity(m, r);
  w -= H * (H.transpose() * w);
  for (Index j = 0; j < r; ++j) w.col(j).normalize();

  Matrix out(m, r);
  for (Index j = 0; j < r; ++j) {
    const double theta = angles_deg[static_cast<std::size_t>(j)] * std::numbers::pi / 180.0;
    out.col(j) = std::cos(theta) * H.col(j) + std::sin(theta) * w.col(j);
  }
  return OrthonormalBasis(std::move(out));
}

std::vector<OrthonormalBasis> make_truth(const ScenarioConfig& config, RandomStream& rng) {
  config.validate();
  std::vector<OrthonormalBasis> truth;
  truth.reserve(static_cast<std::size_t>(config.K));
  truth.push_back(uniform_stiefel(config.M, config.R, rng));
  for (Index k = 1; k < config.K; ++k)
    truth.push_back(make_close_basis(truth.back(), config.true_angles_deg, rng));
  return truth;
}

DataSet generate_data(const ScenarioConfig& config, std::span<const OrthonormalBasis> h_true,
                      RandomStream& rng) {
  config.validate();
  if (h_true.size() != static_cast<std::size_t>(config.K))
    throw std::invalid_argument("generate_data: expected " + std::to_string(config.K) +
                                " true bases, got " + std::to_string(h_true.size()));
  DataSet data;
  data.config = config;
  data.sigma2 = sigma2_from_snr(config.snr_db, config.M, config.R);
  const double sigma = std::sqrt(data.sigma2);
  for (const auto& h : h_true) {
    if (h.ambient_dim() != config.M || h.rank() != config.R)
      throw std::invalid_argument("generate_data: true basis shape does not match M x R");
    const Matrix s = standard_normal(config.R, config.T, rng);
    const Matrix noise = standard_normal(config.M, config.T, rng);
    data.X.push_back(h.matrix() * s + sigma * noise);
    data.H_true.push_back(h);
  }
  return data;
}

double log_joint_posterior(std::span<const OrthonormalBasis> h, const DataSet& data) {
  if (h.size() != data.X.size())
    throw std::invalid_argument("log_joint_posterior: expected " + std::to_string(data.X.size()) +
                                " bases, got " + std::to_string(h.size()));
  const double scale = 1.0 / (2.0 * data.sigma2);
  double total = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (h[k].ambient_dim() != data.X[k].rows())
      throw std::invalid_argument("log_joint_posterior: basis/data dimension mismatch");
    total += scale * (data.X[k].transpose() * h[k].matrix()).squaredNorm();
  }
  for (std::size_t k = 1; k < h.size(); ++k) {
    if (h[k].rank() != h[k - 1].rank())
      throw std::invalid_argument("log_joint_posterior: bases have different ranks");
    total += data.config.kappa[k - 1] * (h[k - 1].matrix().transpose() * h[k].matrix()).squaredNorm();
  }
  return total;
}

BinghamParams conditional_bingham_params(const DataSet& data, std::size_t k,
                                         std::span<const OrthonormalBasis> h) {
  const std::size_t K = data.X.size();
  if (k >= K)
    throw std::invalid_argument("conditional_bingham_params: index " + std::to_string(k) +
                                " out of range for K=" + std::to_string(K));
  if (h.size() != K)
    throw std::invalid_argument("conditional_bingham_params: expected " + std::to_string(K) +
                                " bases, got " + std::to_string(h.size()));
  const Matrix& x = data.X[k];
  Matrix a = (x * x.transpose()) / (2.0 * data.sigma2);
  auto add_neighbor = [&](std::size_t j, double kappa) {
    if (h[j].ambient_dim() != x.rows())
      throw std::invalid_argument("conditional_bingham_params: neighbour dimension mismatch");
    if (kappa != 0.0) a.noalias() += kappa * h[j].projector();
  };
  if (k > 0) add_neighbor(k - 1, data.config.kappa[k - 1]);
  if (k + 1 < K) add_neighbor(k + 1, data.config.kappa[k]);
  return BinghamParams(0.5 * (a + a.transpose()));
}

double regularized_mle_criterion(const OrthonormalBasis& h1, const OrthonormalBasis& h2,
                                 const DataSet& data, double mu) {
  if (data.X.size() != 2)
    throw std::invalid_argument("regularized_mle_criterion: needs exactly two data sets");
  const double scale = 1.0 / (2.0 * data.sigma2);
  const Matrix& X1 = data.X[0];
  const Matrix& X2 = data.X[1];
  const Matrix& H1 = h1.matrix();
  const Matrix& H2 = h2.matrix();
  const double t1 = (X1.transpose() * H1 * H1.transpose() * X1).trace();
  const double t2 = (X2.transpose() * H2 * H2.transpose() * X2).trace();
  const double t3 = (2.0 * mu * H2.transpose() * H1 * H1.transpose() * H2).trace();
  return scale * t1 + scale * t2 + t3;
}

}  // namespace jointsub
