#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "jointsub/random.hpp"

namespace jointsub {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kOrthonormalTol = 1e-10;
inline constexpr double kSymmetryTol = 1e-10;

/// An M x R matrix with orthonormal columns, i.e. a point on the Stiefel
/// manifold. Construction checks H^T H = I_R to kOrthonormalTol (max abs
/// entry) and throws std::invalid_argument otherwise.
class OrthonormalBasis {
 public:
  explicit OrthonormalBasis(Matrix entries);

  /// Skips the orthonormality check. Only for callers that produced the
  /// columns with an orthogonal factorization themselves.
  static OrthonormalBasis trusted(Matrix entries);

  const Matrix& matrix() const noexcept { return entries_; }
  Index ambient_dim() const noexcept { return entries_.rows(); }
  Index rank() const noexcept { return entries_.cols(); }

  /// H H^T
  Matrix projector() const { return entries_ * entries_.transpose(); }

  /// max |H^T H - I|
  double orthonormality_error() const;

 private:
  struct TrustedTag {};
  OrthonormalBasis(Matrix entries, TrustedTag) : entries_(std::move(entries)) {}
  Matrix entries_;
};

/// Principal angles in radians, sorted non-decreasing, each in [0, pi/2].
struct PrincipalAngles {
  std::vector<double> radians;

  std::size_t size() const noexcept { return radians.size(); }
  double operator[](std::size_t i) const { return radians[i]; }
  std::vector<double> degrees() const;
};

PrincipalAngles principal_angles(const OrthonormalBasis& u, const OrthonormalBasis& v);

/// R - ||U^T V||_F^2, i.e. the sum of sin^2 of the principal angles.
double subspace_sq_distance(const OrthonormalBasis& u, const OrthonormalBasis& v);

struct PrincipalSubspace {
  OrthonormalBasis basis;
  /// lambda_R - lambda_{R+1} of the symmetrized input (infinity when R == M).
  double eigengap;
  /// True when the split between the R-th and (R+1)-th eigenvalue is a tie,
  /// in which case any basis of the tied invariant subspace is returned.
  bool degenerate;
};

/// Eigenvectors of (A + A^T)/2 belonging to the R algebraically largest
/// eigenvalues, in decreasing eigenvalue order.
PrincipalSubspace principal_subspace_detail(const Matrix& a, Index r);
OrthonormalBasis principal_subspace(const Matrix& a, Index r);

/// Uniformly distributed point on the Stiefel manifold: QR of a Gaussian
/// matrix with the triangular factor's diagonal made positive.
OrthonormalBasis uniform_stiefel(Index m, Index r, RandomStream& rng);

/// Orthonormal basis of the orthogonal complement of span(cols). The input
/// columns need to be orthonormal.
Matrix orthogonal_complement(const Matrix& cols, Index m);

/// Throws std::invalid_argument unless A is square and symmetric within
/// kSymmetryTol relative to max(1, max|A|).
void require_symmetric(const Matrix& a, const char* what);

}  // namespace jointsub
