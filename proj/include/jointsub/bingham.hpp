#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "jointsub/random.hpp"
#include "jointsub/stiefel.hpp"

namespace jointsub {

/// Parameter matrix A of a matrix Bingham distribution with density
/// proportional to etr{H^T A H} on the Stiefel manifold.
class BinghamParams {
 public:
  /// Throws std::invalid_argument unless A is symmetric (kSymmetryTol,
  /// relative). The stored matrix is the exact symmetrization.
  explicit BinghamParams(const Matrix& a);

  const Matrix& matrix() const noexcept { return a_; }
  Index dim() const noexcept { return a_.rows(); }

 private:
  Matrix a_;
};

/// tr(H^T A H)
double log_density_unnorm(const OrthonormalBasis& h, const BinghamParams& params);

/// Cap on rejection proposals for a single column draw.
inline constexpr std::size_t kMaxProposals = 1'000'000;

/// Exact draw from the vector Bingham density proportional to
/// exp(x^T diag(lambda) x) on the unit sphere in R^q. Rejection from an
/// angular central Gaussian envelope whose squared coordinates follow a
/// scaled Dirichlet(1/2, ..., 1/2) law. Throws SamplerStall after
/// `max_proposals` rejections.
Vector sample_vector_bingham_diag(const Vector& lambda, RandomStream& rng,
                                  std::size_t max_proposals = kMaxProposals);

/// Same for a general symmetric matrix B (via its eigenbasis).
Vector sample_vector_bingham(const Matrix& b, RandomStream& rng);

/// One MCMC transition for the matrix Bingham distribution: `inner_sweeps`
/// passes of column-wise Gibbs starting from `init`. Each column is drawn
/// exactly from its full conditional, a vector Bingham on the unit sphere of
/// the orthogonal complement of the remaining columns, so the kernel leaves
/// etr{H^T A H} invariant.
OrthonormalBasis sample_bingham(const BinghamParams& params, Index r, const OrthonormalBasis& init,
                                std::size_t inner_sweeps, RandomStream& rng);

struct ChainDiagnostics {
  /// autocorrelation[l] for lag l = 1..max_lag of the statistic tr(H^T S H);
  /// empty when the statistic has zero variance.
  std::vector<double> autocorrelation;
  bool zero_variance = false;
  /// running_mean_projector[n] = mean of H H^T over the first n+1 samples.
  std::vector<Matrix> running_mean_projector;
  std::vector<double> statistic;

  std::optional<double> lag1() const {
    if (autocorrelation.empty()) return std::nullopt;
    return autocorrelation.front();
  }
};

/// Mixing diagnostics for a chain of bases. `probe` is the symmetric matrix
/// S of the scalar statistic tr(H^T S H); usually the Bingham parameter
/// matrix, but any fixed probe works (and is needed when A = 0).
ChainDiagnostics chain_diagnostics(std::span<const OrthonormalBasis> samples, const Matrix& probe,
                                   std::size_t max_lag = 10);

}  // namespace jointsub
