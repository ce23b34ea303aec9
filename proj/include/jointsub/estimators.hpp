#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "jointsub/model.hpp"

namespace jointsub {

enum class Method { svd, gibbs, imap };

std::string_view method_name(Method m) noexcept;

struct EstimateResult {
  std::vector<OrthonormalBasis> H_hat;
  Method method = Method::svd;
  /// imap: log-posterior after each executed iteration.
  std::vector<double> log_posterior_trace;
  /// gibbs: number of samples that entered the MMSD average.
  std::size_t kept_samples = 0;
  /// svd: some data matrix had numerical rank below R.
  bool degenerate = false;
};

struct SvdEstimate {
  OrthonormalBasis basis;
  Index numerical_rank;
  /// rank < R; the missing directions are an arbitrary orthonormal extension.
  bool degenerate;
};

/// R dominant left singular vectors of X.
SvdEstimate svd_estimate_detail(const Matrix& x, Index r);
OrthonormalBasis svd_estimate(const Matrix& x, Index r);

/// Per-subspace SVD estimates for a whole data set.
EstimateResult svd_estimates(const DataSet& data);

/// P_R of the average projector of the samples.
OrthonormalBasis mmsd_aggregate(std::span<const OrthonormalBasis> samples, Index r);

/// Gibbs sampler over the chain of subspaces. Starts every H_k at its SVD
/// estimate, sweeps k = K-1, ..., 0 drawing each H_k from its Bingham full
/// conditional, discards config.n_burn iterations and returns the MMSD
/// aggregate of the next config.n_keep.
EstimateResult gibbs_estimate(const DataSet& data, RandomStream& rng);

/// Same chain, but every draw is replaced by the conditional mode P_R(A).
inline constexpr double kImapTolerance = 1e-10;
inline constexpr int kImapPatience = 3;
EstimateResult imap_estimate(const DataSet& data);

}  // namespace jointsub
