#include "jointsub/bingham.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "jointsub/errors.hpp"

namespace jointsub {

namespace {

// Solves sum_i 1/(b + 2 a_i) = 1 for b in (0, q], where a_i >= 0 and
// min a_i = 0. The left side is decreasing in b, so bisection is safe.
double envelope_scale(const Vector& a) {
  const double q = static_cast<double>(a.size());
  auto excess = [&](double b) { return (1.0 / (b + 2.0 * a.array())).sum() - 1.0; };
  if (excess(q) >= 0.0) return q;
  double lo = 0.0;
  double hi = q;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace

BinghamParams::BinghamParams(const Matrix& a) {
  require_symmetric(a, "BinghamParams");
  a_ = 0.5 * (a + a.transpose());
}

double log_density_unnorm(const OrthonormalBasis& h, const BinghamParams& params) {
  if (h.ambient_dim() != params.dim())
    throw std::invalid_argument("log_density_unnorm: basis has M=" +
                                std::to_string(h.ambient_dim()) + ", parameters have M=" +
                                std::to_string(params.dim()));
  const Matrix& H = h.matrix();
  return (H.transpose() * params.matrix() * H).trace();
}

Vector sample_vector_bingham_diag(const Vector& lambda, RandomStream& rng,
                                  std::size_t max_proposals) {
  const Index q = lambda.size();
  if (q < 1) throw std::invalid_argument("sample_vector_bingham: empty parameter");
  if (!lambda.allFinite())
    throw std::invalid_argument("sample_vector_bingham: non-finite eigenvalues");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (q == 1) {
    Vector x(1);
    x(0) = unif(rng) < 0.5 ? -1.0 : 1.0;
    return x;
  }

  // Rewrite exp(x^T L x) as exp(-x^T A x) with A = max(L) - L >= 0, which
  // leaves the density on the sphere unchanged.
  const Vector a = (lambda.maxCoeff() - lambda.array()).matrix();
  const double b = envelope_scale(a);
  const double qd = static_cast<double>(q);
  const Vector omega = (1.0 + 2.0 * a.array() / b).matrix();
  const Vector stddev = omega.cwiseInverse().cwiseSqrt();
  // log sup f/g, attained at x^T A x = (q - b)/2.
  const double log_bound = -0.5 * (qd - b) + 0.5 * qd * std::log(qd / b);

  std::normal_distribution<double> normal(0.0, 1.0);
  Vector x(q);
  for (std::size_t n = 0; n < max_proposals; ++n) {
    for (Index i = 0; i < q; ++i) x(i) = stddev(i) * normal(rng);
    const double norm = x.norm();
    if (!(norm > 0.0)) continue;
    x /= norm;
    const double quad = x.dot(a.cwiseProduct(x));
    const double log_ratio = -quad + 0.5 * qd * std::log1p(2.0 * quad / b) - log_bound;
    if (std::log(unif(rng)) < log_ratio) return x;
  }
  throw SamplerStall("sample_vector_bingham: no acceptance after " +
                     std::to_string(max_proposals) + " proposals");
}

Vector sample_vector_bingham(const Matrix& b, RandomStream& rng) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (b + b.transpose()));
  if (eig.info() != Eigen::Success) throw NumericalError("sample_vector_bingham: eigensolver failed");
  const Vector z = sample_vector_bingham_diag(eig.eigenvalues(), rng);
  return eig.eigenvectors() * z;
}

OrthonormalBasis sample_bingham(const BinghamParams& params, Index r, const OrthonormalBasis& init,
                                std::size_t inner_sweeps, RandomStream& rng) {
  const Index m = params.dim();
  if (r < 1 || r > m)
    throw std::invalid_argument("sample_bingham: need 1 <= R <= M, got R=" + std::to_string(r) +
                                ", M=" + std::to_string(m));
  if (init.ambient_dim() != m || init.rank() != r)
    throw std::invalid_argument("sample_bingham: initial basis has shape " +
                                std::to_string(init.ambient_dim()) + "x" +
                                std::to_string(init.rank()) + ", expected " + std::to_string(m) +
                                "x" + std::to_string(r));
  if (inner_sweeps == 0) throw std::invalid_argument("sample_bingham: inner_sweeps must be >= 1");

  const Matrix& A = params.matrix();
  Matrix h = init.matrix();
  Matrix others(m, r - 1);
  for (std::size_t sweep = 0; sweep < inner_sweeps; ++sweep) {
    for (Index j = 0; j < r; ++j) {
      for (Index c = 0, k = 0; c < r; ++c)
        if (c != j) others.col(k++) = h.col(c);
      const Matrix basis = orthogonal_complement(others, m);  // M x (M-R+1)
      const Matrix restricted = basis.transpose() * A * basis;
      const Vector y = sample_vector_bingham(restricted, rng);
      h.col(j) = basis * y;
      h.col(j).normalize();
    }
  }
  return OrthonormalBasis::trusted(std::move(h));
}

ChainDiagnostics chain_diagnostics(std::span<const OrthonormalBasis> samples, const Matrix& probe,
                                   std::size_t max_lag) {
  if (samples.empty()) throw std::invalid_argument("chain_diagnostics: empty sample sequence");
  const Index m = samples.front().ambient_dim();
  const Index r = samples.front().rank();
  require_symmetric(probe, "chain_diagnostics");
  if (probe.rows() != m) throw std::invalid_argument("chain_diagnostics: probe dimension mismatch");

  ChainDiagnostics out;
  const std::size_t n = samples.size();
  out.statistic.reserve(n);
  out.running_mean_projector.reserve(n);
  Matrix sum = Matrix::Zero(m, m);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = samples[i];
    if (s.ambient_dim() != m || s.rank() != r)
      throw std::invalid_argument("chain_diagnostics: inconsistent sample shapes");
    const Matrix& H = s.matrix();
    out.statistic.push_back((H.transpose() * probe * H).trace());
    sum += s.projector();
    out.running_mean_projector.push_back(sum / static_cast<double>(i + 1));
  }

  double mean = 0.0;
  for (double v : out.statistic) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : out.statistic) var += (v - mean) * (v - mean);
  const double scale = std::max(1.0, std::abs(mean));
  if (var <= 1e-24 * scale * scale * static_cast<double>(n)) {
    out.zero_variance = true;
    return out;
  }
  const std::size_t lags = std::min(max_lag, n - 1);
  for (std::size_t lag = 1; lag <= lags; ++lag) {
    double acc = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i)
      acc += (out.statistic[i] - mean) * (out.statistic[i + lag] - mean);
    out.autocorrelation.push_back(acc / var);
  }
  return out;
}

}  // namespace jointsub
