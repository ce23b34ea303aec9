#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/QR>

#include "jointsub/cli.hpp"
#include "jointsub/estimators.hpp"
#include "jointsub/model.hpp"

namespace jointsub {

namespace {

Matrix random_orthogonal(Index r, RandomStream& rng) { return uniform_stiefel(r, r, rng).matrix(); }

DataSet random_dataset(Index m, Index r, Index t, double kappa, RandomStream& rng) {
  ScenarioConfig c;
  c.M = m;
  c.R = r;
  c.T = t;
  c.kappa = {kappa};
  c.true_angles_deg.assign(static_cast<std::size_t>(r), 0.0);
  c.snr_db = 3.0;
  c.n_imap = 30;
  std::vector<OrthonormalBasis> truth{uniform_stiefel(m, r, rng), uniform_stiefel(m, r, rng)};
  return generate_data(c, truth, rng);
}

}  // namespace

bool run_selftest(std::ostream& log) {
  RandomStream rng = make_stream(20240917);
  bool all_ok = true;
  auto check = [&](const std::string& name, const std::function<bool()>& fn) {
    bool ok = false;
    try {
      ok = fn();
    } catch (const std::exception& e) {
      log << "  exception: " << e.what() << '\n';
    }
    log << (ok ? "PASS " : "FAIL ") << name << '\n';
    all_ok = all_ok && ok;
  };

  check("uniform_stiefel orthonormal", [&] {
    for (int i = 0; i < 50; ++i)
      if (uniform_stiefel(5, 3, rng).orthonormality_error() > kOrthonormalTol) return false;
    return true;
  });

  check("planted principal angles", [&] {
    const auto h1 = uniform_stiefel(6, 2, rng);
    const std::vector<double> deg{10.0, 25.0};
    const auto h2 = make_close_basis(h1, deg, rng);
    const auto got = principal_angles(h1, h2).degrees();
    return std::abs(got[0] - 10.0) < 1e-6 && std::abs(got[1] - 25.0) < 1e-6;
  });

  check("distance equals sum of sin^2 and is symmetric", [&] {
    for (int i = 0; i < 20; ++i) {
      const auto u = uniform_stiefel(5, 2, rng);
      const auto v = uniform_stiefel(5, 2, rng);
      double s = 0.0;
      for (double a : principal_angles(u, v).radians) s += std::sin(a) * std::sin(a);
      if (std::abs(subspace_sq_distance(u, v) - s) > 1e-9) return false;
      if (std::abs(subspace_sq_distance(u, v) - subspace_sq_distance(v, u)) > 1e-12) return false;
    }
    return true;
  });

  check("principal_subspace shift invariance", [&] {
    const Matrix g = standard_normal(5, 5, rng);
    const Matrix a = g + g.transpose();
    const auto p = principal_subspace(a, 2);
    const auto q = principal_subspace(a + 7.5 * Matrix::Identity(5, 5), 2);
    return subspace_sq_distance(p, q) < 1e-8;
  });

  check("Bingham kernel right invariance", [&] {
    const Matrix g = standard_normal(4, 4, rng);
    const BinghamParams params(g + g.transpose());
    const auto h = uniform_stiefel(4, 2, rng);
    const OrthonormalBasis hq(h.matrix() * random_orthogonal(2, rng));
    return std::abs(log_density_unnorm(h, params) - log_density_unnorm(hq, params)) < 1e-9;
  });

  check("sampler output orthonormal", [&] {
    const Matrix g = standard_normal(4, 4, rng);
    const BinghamParams params(3.0 * (g + g.transpose()));
    auto h = uniform_stiefel(4, 2, rng);
    for (int i = 0; i < 200; ++i) h = sample_bingham(params, 2, h, 1, rng);
    return h.orthonormality_error() < kOrthonormalTol;
  });

  check("conditional density matches joint posterior", [&] {
    const DataSet data = random_dataset(5, 2, 4, 10.0, rng);
    for (std::size_t k = 0; k < 2; ++k) {
      std::vector<OrthonormalBasis> hu{uniform_stiefel(5, 2, rng), uniform_stiefel(5, 2, rng)};
      std::vector<OrthonormalBasis> hv = hu;
      hv[k] = uniform_stiefel(5, 2, rng);
      const auto params = conditional_bingham_params(data, k, hu);
      const double joint = log_joint_posterior(hu, data) - log_joint_posterior(hv, data);
      const double cond = log_density_unnorm(hu[k], params) - log_density_unnorm(hv[k], params);
      if (std::abs(joint - cond) > 1e-9 * std::max(1.0, std::abs(joint))) return false;
    }
    return true;
  });

  check("regularized criterion identity", [&] {
    const DataSet data = random_dataset(5, 2, 4, 10.0, rng);
    double first = 0.0;
    for (int i = 0; i < 20; ++i) {
      std::vector<OrthonormalBasis> h{uniform_stiefel(5, 2, rng), uniform_stiefel(5, 2, rng)};
      const double d = log_joint_posterior(h, data) - regularized_mle_criterion(h[0], h[1], data, 5.0);
      if (i == 0) first = d;
      if (std::abs(d - first) > 1e-8) return false;
    }
    return true;
  });

  check("imap trace non-decreasing", [&] {
    const DataSet data = random_dataset(6, 2, 5, 40.0, rng);
    const auto est = imap_estimate(data);
    for (std::size_t i = 1; i < est.log_posterior_trace.size(); ++i)
      if (est.log_posterior_trace[i] < est.log_posterior_trace[i - 1] - 1e-9) return false;
    return !est.log_posterior_trace.empty();
  });

  check("noise-free recovery", [&] {
    ScenarioConfig c;
    c.M = 6;
    c.T = 4;
    c.snr_db = 300.0;
    c.n_burn = 2;
    c.n_keep = 10;
    c.n_imap = 5;
    const auto truth = make_truth(c, rng);
    const DataSet data = generate_data(c, truth, rng);
    std::vector<EstimateResult> ests{svd_estimates(data), gibbs_estimate(data, rng),
                                     imap_estimate(data)};
    for (const auto& e : ests)
      for (std::size_t k = 0; k < 2; ++k)
        if (subspace_sq_distance(e.H_hat[k], truth[k]) > 1e-6) return false;
    return true;
  });

  return all_ok;
}

}  // namespace jointsub
