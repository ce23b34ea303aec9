#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "jointsub/estimators.hpp"
#include "oracles.hpp"

using namespace jointsub;

namespace {

Matrix unit_cols(Index m, std::initializer_list<Index> idx) {
  Matrix h = Matrix::Zero(m, static_cast<Index>(idx.size()));
  Index j = 0;
  for (Index i : idx) h(i, j++) = 1.0;
  return h;
}

ScenarioConfig reference_scenario() {
  ScenarioConfig c;  // M=8, R=2, T=6, kappa=40, angles 10/25, 10/200/50
  c.snr_db = 0.0;
  return c;
}

DataSet simulate(const ScenarioConfig& c, std::uint64_t seed) {
  RandomStream truth_rng(1000);
  const auto truth = make_truth(c, truth_rng);
  RandomStream rng(seed);
  return generate_data(c, truth, rng);
}

double angle_error(const EstimateResult& e, const ScenarioConfig& c) {
  const auto got = principal_angles(e.H_hat[0], e.H_hat[1]).degrees();
  double err = 0.0;
  for (std::size_t r = 0; r < got.size(); ++r) err += std::abs(got[r] - c.true_angles_deg[r]);
  return err;
}

}  // namespace

TEST(SvdEstimate, NoiseFreeRecovery) {
  RandomStream rng(1);
  for (int i = 0; i < 20; ++i) {
    const auto h = uniform_stiefel(7, 3, rng);
    const Matrix x = h.matrix() * standard_normal(3, 5, rng);
    const auto est = svd_estimate_detail(x, 3);
    EXPECT_LT(subspace_sq_distance(est.basis, h), 1e-9);
    EXPECT_FALSE(est.degenerate);
  }
}

TEST(SvdEstimate, RankDeficientDataIsCompleted) {
  RandomStream rng(2);
  const Matrix x = standard_normal(6, 1, rng);
  const auto est = svd_estimate_detail(x, 3);
  EXPECT_TRUE(est.degenerate);
  EXPECT_EQ(est.numerical_rank, 1);
  EXPECT_LE(est.basis.orthonormality_error(), 1e-12);
  // The one observed direction is inside the estimate.
  const Vector dir = x.col(0).normalized();
  EXPECT_NEAR((est.basis.matrix().transpose() * dir).norm(), 1.0, 1e-12);
  EXPECT_THROW(svd_estimate(x, 7), std::invalid_argument);
}

TEST(SvdEstimate, AgreesWithGramOracle) {
  RandomStream rng(3);
  for (int i = 0; i < 50; ++i) {
    const Matrix x = standard_normal(8, 6, rng);
    const auto est = svd_estimate(x, 2);
    EXPECT_LT(subspace_sq_distance(est, principal_subspace(x * x.transpose(), 2)), 1e-9);
    const auto [vals, vecs] = oracle::jacobi_eigen(x * x.transpose());
    EXPECT_LT(oracle::projector_gap(est.matrix(), vecs.leftCols(2)), 1e-9);
  }
}

TEST(MmsdAggregate, CommonSubspace) {
  RandomStream rng(4);
  const auto h = uniform_stiefel(6, 2, rng);
  std::vector<OrthonormalBasis> samples;
  for (int i = 0; i < 10; ++i)
    samples.emplace_back(h.matrix() * uniform_stiefel(2, 2, rng).matrix());
  EXPECT_LT(subspace_sq_distance(mmsd_aggregate(samples, 2), h), 1e-9);
  EXPECT_THROW(mmsd_aggregate(std::vector<OrthonormalBasis>{}, 2), std::invalid_argument);
}

TEST(MmsdAggregate, HandComputedProjectorAverage) {
  const OrthonormalBasis e12(unit_cols(3, {0, 1}));
  const OrthonormalBasis e13(unit_cols(3, {0, 2}));
  const std::vector<OrthonormalBasis> samples{e12, e12, e12, e13};
  // Average projector diag(1, 0.75, 0.25).
  EXPECT_LT(subspace_sq_distance(mmsd_aggregate(samples, 2), e12), 1e-12);
}

TEST(MmsdAggregate, SymmetricTieIsFlagged) {
  const OrthonormalBasis e1(unit_cols(2, {0}));
  const OrthonormalBasis e2(unit_cols(2, {1}));
  const std::vector<OrthonormalBasis> samples{e1, e2};
  const auto h = mmsd_aggregate(samples, 1);
  EXPECT_NEAR(h.matrix().col(0).norm(), 1.0, 1e-14);
  const Matrix avg = (e1.projector() + e2.projector()) / 2.0;
  EXPECT_TRUE(principal_subspace_detail(avg, 1).degenerate);
}

TEST(GibbsEstimate, DecoupledNoiseFreeMatchesSvd) {
  ScenarioConfig c = reference_scenario();
  c.kappa = {0.0};
  c.snr_db = 300.0;
  const DataSet d = simulate(c, 5);
  RandomStream rng(6);
  const auto gs = gibbs_estimate(d, rng);
  const auto svd = svd_estimates(d);
  EXPECT_EQ(gs.kept_samples, 200u);
  for (std::size_t k = 0; k < 2; ++k) EXPECT_LT(subspace_sq_distance(gs.H_hat[k], svd.H_hat[k]), 1e-4);
}

TEST(GibbsEstimate, DeterministicGivenSeed) {
  const DataSet d = simulate(reference_scenario(), 7);
  RandomStream a(8), b(8);
  const auto ga = gibbs_estimate(d, a);
  const auto gb = gibbs_estimate(d, b);
  for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(ga.H_hat[k].matrix(), gb.H_hat[k].matrix());
}

TEST(GibbsEstimate, SingleDrawPipeline) {
  ScenarioConfig c = reference_scenario();
  c.n_burn = 0;
  c.n_keep = 1;
  const DataSet d = simulate(c, 9);
  RandomStream rng(10);
  const auto gs = gibbs_estimate(d, rng);
  ASSERT_EQ(gs.H_hat.size(), 2u);
  for (const auto& h : gs.H_hat) EXPECT_LE(h.orthonormality_error(), 1e-10);
}

TEST(GibbsEstimate, LongerChainsOfSubspaces) {
  ScenarioConfig c = reference_scenario();
  c.K = 4;
  c.kappa = {40.0, 40.0, 40.0};
  c.n_keep = 50;
  const DataSet d = simulate(c, 11);
  RandomStream rng(12);
  const auto gs = gibbs_estimate(d, rng);
  const auto mp = imap_estimate(d);
  ASSERT_EQ(gs.H_hat.size(), 4u);
  ASSERT_EQ(mp.H_hat.size(), 4u);
  for (std::size_t i = 1; i < mp.log_posterior_trace.size(); ++i)
    EXPECT_GE(mp.log_posterior_trace[i], mp.log_posterior_trace[i - 1] - 1e-9);
}

TEST(GibbsEstimate, BeatsSvdOnReferenceScenario) {
  const ScenarioConfig c = reference_scenario();
  double gs_msd[2] = {0, 0}, svd_msd[2] = {0, 0};
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    const DataSet d = simulate(c, 100 + t);
    RandomStream rng(5000 + t);
    const auto gs = gibbs_estimate(d, rng);
    const auto svd = svd_estimates(d);
    for (std::size_t k = 0; k < 2; ++k) {
      gs_msd[k] += subspace_sq_distance(gs.H_hat[k], d.H_true[k]);
      svd_msd[k] += subspace_sq_distance(svd.H_hat[k], d.H_true[k]);
    }
  }
  EXPECT_LE(gs_msd[0], svd_msd[0]);
  EXPECT_LE(gs_msd[1], svd_msd[1]);
}

TEST(ImapEstimate, DecoupledConvergesToSvdImmediately) {
  ScenarioConfig c = reference_scenario();
  c.kappa = {0.0};
  const DataSet d = simulate(c, 13);
  const auto mp = imap_estimate(d);
  const auto svd = svd_estimates(d);
  for (std::size_t k = 0; k < 2; ++k) EXPECT_LT(subspace_sq_distance(mp.H_hat[k], svd.H_hat[k]), 1e-9);
  ASSERT_GE(mp.log_posterior_trace.size(), 1u);
  // Nothing changes after the first iteration, so the early exit triggers.
  EXPECT_LE(mp.log_posterior_trace.size(), 1u + kImapPatience);
  EXPECT_NEAR(mp.log_posterior_trace.back(), mp.log_posterior_trace.front(),
              1e-10 * std::abs(mp.log_posterior_trace.front()));
}

TEST(ImapEstimate, TraceIsMonotone) {
  RandomStream rng(14);
  for (int i = 0; i < 50; ++i) {
    ScenarioConfig c = reference_scenario();
    c.kappa = {static_cast<double>(i % 5) * 25.0};
    c.snr_db = -10.0 + (i % 7) * 4.0;
    c.T = 2 + i % 8;
    const DataSet d = simulate(c, 200 + i);
    const auto mp = imap_estimate(d);
    ASSERT_FALSE(mp.log_posterior_trace.empty());
    EXPECT_LE(mp.log_posterior_trace.size(), c.n_imap);
    for (std::size_t j = 1; j < mp.log_posterior_trace.size(); ++j)
      EXPECT_GE(mp.log_posterior_trace[j], mp.log_posterior_trace[j - 1] - 1e-9);
  }
}

TEST(ImapEstimate, EachUpdateMaximizesItsConditional) {
  RandomStream rng(15);
  const DataSet d = simulate(reference_scenario(), 16);
  std::vector<OrthonormalBasis> h{uniform_stiefel(8, 2, rng), uniform_stiefel(8, 2, rng)};
  for (std::size_t k = 0; k < 2; ++k) {
    const auto params = conditional_bingham_params(d, k, h);
    const auto best = principal_subspace(params.matrix(), 2);
    const double top = log_density_unnorm(best, params);
    for (int i = 0; i < 100; ++i)
      EXPECT_GE(top, log_density_unnorm(uniform_stiefel(8, 2, rng), params));
  }
}

TEST(ImapEstimate, BeatsSvdOnAngles) {
  const ScenarioConfig c = reference_scenario();
  double imap_err = 0.0, svd_err = 0.0;
  for (int t = 0; t < 100; ++t) {
    const DataSet d = simulate(c, 300 + t);
    imap_err += angle_error(imap_estimate(d), c);
    svd_err += angle_error(svd_estimates(d), c);
  }
  EXPECT_LT(imap_err, svd_err);
}

TEST(Estimators, EquivariantUnderCommonRotation) {
  RandomStream rng(17);
  for (int i = 0; i < 20; ++i) {
    DataSet d = simulate(reference_scenario(), 400 + i);
    const Matrix q = uniform_stiefel(8, 8, rng).matrix();
    DataSet dq = d;
    for (auto& x : dq.X) x = q * x;
    for (auto& h : dq.H_true) h = OrthonormalBasis(q * h.matrix());
    const auto a = imap_estimate(d);
    const auto b = imap_estimate(dq);
    const auto sa = svd_estimates(d);
    const auto sb = svd_estimates(dq);
    for (std::size_t k = 0; k < 2; ++k) {
      EXPECT_NEAR(subspace_sq_distance(a.H_hat[k], d.H_true[k]),
                  subspace_sq_distance(b.H_hat[k], dq.H_true[k]), 1e-8);
      EXPECT_NEAR(subspace_sq_distance(sa.H_hat[k], d.H_true[k]),
                  subspace_sq_distance(sb.H_hat[k], dq.H_true[k]), 1e-8);
    }
  }
}
