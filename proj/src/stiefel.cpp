#include "jointsub/stiefel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace jointsub {

namespace {

void require_same_shape(const OrthonormalBasis& u, const OrthonormalBasis& v, const char* what) {
  if (u.ambient_dim() != v.ambient_dim() || u.rank() != v.rank())
    throw std::invalid_argument(std::string(what) + ": bases have shapes " +
                                std::to_string(u.ambient_dim()) + "x" + std::to_string(u.rank()) +
                                " and " + std::to_string(v.ambient_dim()) + "x" +
                                std::to_string(v.rank()));
}

// Singular values sorted descending.
Vector singular_values(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues();
}

}  // namespace

OrthonormalBasis::OrthonormalBasis(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.cols() < 1 || entries_.rows() < entries_.cols())
    throw std::invalid_argument("OrthonormalBasis: need M >= R >= 1, got " +
                                std::to_string(entries_.rows()) + "x" +
                                std::to_string(entries_.cols()));
  const double err = orthonormality_error();
  if (!(err <= kOrthonormalTol))
    throw std::invalid_argument("OrthonormalBasis: columns not orthonormal (max |H^T H - I| = " +
                                std::to_string(err) + ")");
}

OrthonormalBasis OrthonormalBasis::trusted(Matrix entries) {
  return OrthonormalBasis(std::move(entries), TrustedTag{});
}

double OrthonormalBasis::orthonormality_error() const {
  const Index r = entries_.cols();
  return (entries_.transpose() * entries_ - Matrix::Identity(r, r)).cwiseAbs().maxCoeff();
}

std::vector<double> PrincipalAngles::degrees() const {
  std::vector<double> out(radians.size());
  std::transform(radians.begin(), radians.end(), out.begin(),
                 [](double a) { return a * 180.0 / std::numbers::pi; });
  return out;
}

PrincipalAngles principal_angles(const OrthonormalBasis& u, const OrthonormalBasis& v) {
  require_same_shape(u, v, "principal_angles");
  const Matrix& U = u.matrix();
  const Matrix& V = v.matrix();
  const Index r = U.cols();

  // Cosines lose all precision for tiny angles, so those are taken from the
  // sines, i.e. the singular values of (I - U U^T) V.
  const Matrix cross = U.transpose() * V;
  const Vector cosines = singular_values(cross);
  const Vector sines = singular_values(V - U * cross);

  PrincipalAngles out;
  out.radians.resize(static_cast<std::size_t>(r));
  for (Index i = 0; i < r; ++i) {
    const double c = std::clamp(cosines(i), 0.0, 1.0);
    // i-th largest cosine pairs with the i-th smallest sine.
    const double s = std::clamp(sines(r - 1 - i), 0.0, 1.0);
    out.radians[static_cast<std::size_t>(i)] =
        (c * c > 0.5) ? std::asin(s) : std::acos(c);
  }
  std::sort(out.radians.begin(), out.radians.end());
  return out;
}

double subspace_sq_distance(const OrthonormalBasis& u, const OrthonormalBasis& v) {
  require_same_shape(u, v, "subspace_sq_distance");
  const double r = static_cast<double>(u.rank());
  const double d = r - (u.matrix().transpose() * v.matrix()).squaredNorm();
  return std::clamp(d, 0.0, r);
}

void require_symmetric(const Matrix& a, const char* what) {
  if (a.rows() != a.cols())
    throw std::invalid_argument(std::string(what) + ": matrix is not square");
  if (a.size() == 0) return;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= kSymmetryTol * scale))
    throw std::invalid_argument(std::string(what) + ": matrix is not symmetric (max |A - A^T| = " +
                                std::to_string(asym) + ")");
}

PrincipalSubspace principal_subspace_detail(const Matrix& a, Index r) {
  require_symmetric(a, "principal_subspace");
  const Index m = a.rows();
  if (r < 1 || r > m)
    throw std::invalid_argument("principal_subspace: need 1 <= R <= M, got R=" +
                                std::to_string(r) + ", M=" + std::to_string(m));
  const Matrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success)
    throw std::invalid_argument("principal_subspace: eigendecomposition failed");

  // Eigenvalues come back ascending.
  const Vector& lambda = eig.eigenvalues();
  Matrix top(m, r);
  for (Index j = 0; j < r; ++j) top.col(j) = eig.eigenvectors().col(m - 1 - j);

  double gap = std::numeric_limits<double>::infinity();
  bool degenerate = false;
  if (r < m) {
    gap = lambda(m - r) - lambda(m - r - 1);
    const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
    degenerate = gap <= 64.0 * std::numeric_limits<double>::epsilon() * scale;
  }
  return {OrthonormalBasis::trusted(std::move(top)), gap, degenerate};
}

OrthonormalBasis principal_subspace(const Matrix& a, Index r) {
  return principal_subspace_detail(a, r).basis;
}

OrthonormalBasis uniform_stiefel(Index m, Index r, RandomStream& rng) {
  if (r < 1 || r > m)
    throw std::invalid_argument("uniform_stiefel: need 1 <= R <= M, got R=" + std::to_string(r) +
                                ", M=" + std::to_string(m));
  const Matrix g = standard_normal(m, r, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(m, r);
  const auto diag = qr.matrixQR().diagonal();
  for (Index j = 0; j < r; ++j)
    if (diag(j) < 0.0) q.col(j) = -q.col(j);
  return OrthonormalBasis::trusted(std::move(q));
}

Matrix orthogonal_complement(const Matrix& cols, Index m) {
  const Index c = cols.cols();
  if (c == 0) return Matrix::Identity(m, m);
  Eigen::HouseholderQR<Matrix> qr(cols);
  Matrix q = qr.householderQ();
  return q.rightCols(m - c);
}

}  // namespace jointsub
