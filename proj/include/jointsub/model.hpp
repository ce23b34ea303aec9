#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "jointsub/bingham.hpp"
#include "jointsub/random.hpp"
#include "jointsub/stiefel.hpp"

namespace jointsub {

/// Full description of one experiment scenario.
struct ScenarioConfig {
  Index M = 8;
  Index R = 2;
  Index T = 6;
  Index K = 2;
  double snr_db = 0.0;
  /// kappa[i] couples H_{i} and H_{i+1} (0-based), so K-1 entries.
  std::vector<double> kappa{40.0};
  /// True principal angles between consecutive subspaces, in degrees.
  std::vector<double> true_angles_deg{10.0, 25.0};
  std::size_t n_burn = 10;
  std::size_t n_keep = 200;
  std::size_t n_imap = 50;
  std::size_t inner_sweeps = 1;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct DataSet {
  std::vector<Matrix> X;
  /// Empty when the data did not come with ground truth.
  std::vector<OrthonormalBasis> H_true;
  double sigma2 = 1.0;
  ScenarioConfig config;

  Index num_sets() const noexcept { return static_cast<Index>(X.size()); }
  void validate() const;
};

/// sigma^2 = R / (M 10^{snr_db/10}).
double sigma2_from_snr(double snr_db, Index m, Index r);

/// Basis whose principal angles to `h1` are exactly the requested ones:
/// column r of h1 is rotated by angle r towards a random unit direction in
/// the orthogonal complement of span(h1).
OrthonormalBasis make_close_basis(const OrthonormalBasis& h1, std::span<const double> angles_deg,
                                  RandomStream& rng);

/// Chain of K ground-truth bases: H_1 uniform, each next one at the
/// configured angles from its predecessor.
std::vector<OrthonormalBasis> make_truth(const ScenarioConfig& config, RandomStream& rng);

/// X_k = H_k S_k + N_k with S_k ~ N(0,1) entries (R x T) and N_k ~ N(0, sigma^2).
DataSet generate_data(const ScenarioConfig& config, std::span<const OrthonormalBasis> h_true,
                      RandomStream& rng);

/// sum_k ||X_k^T H_k||_F^2 / (2 sigma^2) + sum_k kappa_k ||H_{k-1}^T H_k||_F^2,
/// the joint log-posterior up to an additive constant.
double log_joint_posterior(std::span<const OrthonormalBasis> h, const DataSet& data);

/// Parameter matrix of the full conditional of H_k (0-based k) given the
/// other bases in `h`: X_k X_k^T / (2 sigma^2) plus kappa * H_j H_j^T for each
/// chain neighbour j of k. Entries of `h` at position k are ignored.
BinghamParams conditional_bingham_params(const DataSet& data, std::size_t k,
                                         std::span<const OrthonormalBasis> h);

/// Concentrated regularized maximum-likelihood criterion for K = 2:
/// tr(X_1^T H_1 H_1^T X_1)/(2 sigma^2) + tr(X_2^T H_2 H_2^T X_2)/(2 sigma^2)
/// + tr(2 mu H_2^T H_1 H_1^T H_2). Evaluated with explicit traces.
double regularized_mle_criterion(const OrthonormalBasis& h1, const OrthonormalBasis& h2,
                                 const DataSet& data, double mu);

}  // namespace jointsub
