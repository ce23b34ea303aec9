#include "jointsub/estimators.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/SVD>

namespace jointsub {

std::string_view method_name(Method m) noexcept {
  switch (m) {
    case Method::svd: return "svd";
    case Method::gibbs: return "gibbs";
    case Method::imap: return "imap";
  }
  return "unknown";
}

SvdEstimate svd_estimate_detail(const Matrix& x, Index r) {
  const Index m = x.rows();
  if (r < 1 || r > m)
    throw std::invalid_argument("svd_estimate: need 1 <= R <= M, got R=" + std::to_string(r) +
                                ", M=" + std::to_string(m));
  if (x.cols() < 1) throw std::invalid_argument("svd_estimate: data matrix has no columns");
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeFullU);
  const Vector& s = svd.singularValues();
  const double tol = static_cast<double>(std::max(x.rows(), x.cols())) *
                     std::numeric_limits<double>::epsilon() * (s.size() ? s(0) : 0.0);
  Index rank = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > tol) ++rank;
  Matrix u = svd.matrixU().leftCols(r);
  return {OrthonormalBasis::trusted(std::move(u)), rank, rank < r};
}

OrthonormalBasis svd_estimate(const Matrix& x, Index r) { return svd_estimate_detail(x, r).basis; }

EstimateResult svd_estimates(const DataSet& data) {
  EstimateResult out;
  out.method = Method::svd;
  for (const Matrix& x : data.X) {
    auto est = svd_estimate_detail(x, data.config.R);
    out.degenerate = out.degenerate || est.degenerate;
    out.H_hat.push_back(std::move(est.basis));
  }
  return out;
}

OrthonormalBasis mmsd_aggregate(std::span<const OrthonormalBasis> samples, Index r) {
  if (samples.empty()) throw std::invalid_argument("mmsd_aggregate: no samples");
  const Index m = samples.front().ambient_dim();
  Matrix avg = Matrix::Zero(m, m);
  for (const auto& s : samples) {
    if (s.ambient_dim() != m)
      throw std::invalid_argument("mmsd_aggregate: inconsistent sample dimensions");
    avg.noalias() += s.matrix() * s.matrix().transpose();
  }
  avg /= static_cast<double>(samples.size());
  return principal_subspace(avg, r);
}

namespace {

std::vector<OrthonormalBasis> svd_start(const DataSet& data) {
  data.validate();
  return svd_estimates(data).H_hat;
}

}  // namespace

EstimateResult gibbs_estimate(const DataSet& data, RandomStream& rng) {
  const ScenarioConfig& cfg = data.config;
  std::vector<OrthonormalBasis> h = svd_start(data);
  const std::size_t K = h.size();
  const Index m = cfg.M;

  std::vector<Matrix> projector_sum(K, Matrix::Zero(m, m));
  const std::size_t total = cfg.n_burn + cfg.n_keep;
  for (std::size_t n = 0; n < total; ++n) {
    for (std::size_t k = K; k-- > 0;) {
      const BinghamParams params = conditional_bingham_params(data, k, h);
      h[k] = sample_bingham(params, cfg.R, h[k], cfg.inner_sweeps, rng);
    }
    if (n >= cfg.n_burn)
      for (std::size_t k = 0; k < K; ++k) projector_sum[k].noalias() += h[k].projector();
  }

  EstimateResult out;
  out.method = Method::gibbs;
  out.kept_samples = cfg.n_keep;
  for (std::size_t k = 0; k < K; ++k)
    out.H_hat.push_back(
        principal_subspace(projector_sum[k] / static_cast<double>(cfg.n_keep), cfg.R));
  return out;
}

EstimateResult imap_estimate(const DataSet& data) {
  const ScenarioConfig& cfg = data.config;
  std::vector<OrthonormalBasis> h = svd_start(data);
  const std::size_t K = h.size();

  EstimateResult out;
  out.method = Method::imap;
  double previous = log_joint_posterior(h, data);
  int stalled = 0;
  for (std::size_t n = 0; n < cfg.n_imap; ++n) {
    for (std::size_t k = K; k-- > 0;)
      h[k] = principal_subspace(conditional_bingham_params(data, k, h).matrix(), cfg.R);
    const double value = log_joint_posterior(h, data);
    out.log_posterior_trace.push_back(value);
    const double gain = value - previous;
    previous = value;
    stalled = gain < kImapTolerance * std::max(1.0, std::abs(value)) ? stalled + 1 : 0;
    if (stalled >= kImapPatience) break;
  }
  out.H_hat = std::move(h);
  return out;
}

}  // namespace jointsub
