#pragma once

// Reference computations used only by the tests. None of these go through
// the library's own numerical paths.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
/// (eigenvalues, eigenvectors) sorted by decreasing eigenvalue.
inline std::pair<Vector, Matrix> jacobi_eigen(Matrix a) {
  const Eigen::Index n = a.rows();
  Matrix v = Matrix::Identity(n, n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30 * std::max(1.0, a.squaredNorm())) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return a(i, i) > a(j, j); });
  Vector vals(n);
  Matrix vecs(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    vals(i) = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
    vecs.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return {vals, vecs};
}

/// Composite Simpson rule on [a, b] with n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// Tabulated CDF of the axial angle phi in [0, pi) for the density
/// exp(x^T A x), x = (cos phi, sin phi), A 2x2 symmetric.
class CircleBinghamCdf {
 public:
  explicit CircleBinghamCdf(const Matrix& a, int cells = 20000) : cells_(cells), cdf_(cells + 1) {
    auto dens = [&](double phi) {
      const double c = std::cos(phi), s = std::sin(phi);
      return std::exp(a(0, 0) * c * c + 2.0 * a(0, 1) * c * s + a(1, 1) * s * s);
    };
    const double h = std::numbers::pi / cells;
    cdf_[0] = 0.0;
    for (int i = 0; i < cells; ++i) cdf_[i + 1] = cdf_[i] + simpson(dens, i * h, (i + 1) * h, 4);
    const double z = cdf_.back();
    for (double& c : cdf_) c /= z;
  }

  double operator()(double phi) const {
    const double pos = std::clamp(phi / std::numbers::pi, 0.0, 1.0) * cells_;
    const int i = std::min(static_cast<int>(pos), cells_ - 1);
    const double w = pos - i;
    return (1.0 - w) * cdf_[i] + w * cdf_[i + 1];
  }

 private:
  int cells_;
  std::vector<double> cdf_;
};

/// sup |F_n - F| for a continuous reference CDF.
inline double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, std::abs(f - i / n), std::abs((i + 1) / n - f)});
  }
  return d;
}

/// Projector distance between the spans of two orthonormal column sets.
inline double projector_gap(const Matrix& u, const Matrix& v) {
  return (u * u.transpose() - v * v.transpose()).squaredNorm() / 2.0;
}

}  // namespace oracle
