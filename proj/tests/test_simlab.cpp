#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "l1dom/decomp.hpp"
#include "l1dom/errors.hpp"
#include "l1dom/simlab.hpp"
#include "oracles.hpp"

using namespace l1dom;
using namespace l1dom::testing;

namespace {

ComplexVector cvec(std::initializer_list<Complex> v) {
  ComplexVector out(v.size());
  Eigen::Index i = 0;
  for (const Complex& x : v) out(i++) = x;
  return out;
}

Complex node(double damping, double freq) {
  return std::exp(Complex(-damping, 2.0 * std::numbers::pi * freq));
}

ExponentialModel experiment_model(Eigen::Index n) {
  ExponentialModel m;
  m.nodes = cvec({node(0.3, -0.35), node(0.1, -0.3), node(0.05, -0.28), node(0.0001, 0.2),
                  node(0.0001, 0.21)});
  m.amplitudes = cvec({20.0, 6.0, 3.0, 2.0, 1.0});
  m.delta = 1.0;
  m.n = n;
  return m;
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.model = experiment_model(12);
  cfg.sigma2 = 1.0;
  cfg.replications = 6;
  cfg.seed = 99;
  cfg.histogram_bins = 4;
  return cfg;
}

}  // namespace

TEST(GenSignal, ConstantNode) {
  ExponentialModel m;
  m.nodes = cvec({1.0});
  m.amplitudes = cvec({5.0});
  m.n = 4;
  const ComplexVector f = gen_signal(m);
  for (Eigen::Index k = 0; k < 4; ++k) EXPECT_NEAR(std::abs(f(k) - 5.0), 0.0, 1e-15);
}

TEST(GenSignal, QuarterRotations) {
  ExponentialModel m;
  m.nodes = cvec({Complex(0.0, 1.0)});
  m.amplitudes = cvec({1.0});
  m.n = 4;
  const ComplexVector f = gen_signal(m);
  const ComplexVector ref = cvec({1.0, Complex(0, 1), -1.0, Complex(0, -1)});
  EXPECT_LT((f - ref).norm(), 1e-14);
}

TEST(GenSignal, FirstSampleIsAmplitudeSum) {
  const ComplexVector f = gen_signal(experiment_model(40));
  EXPECT_NEAR(std::abs(f(0) - Complex(32.0, 0.0)), 0.0, 1e-12);
  EXPECT_EQ(f.size(), 40);
}

TEST(GenSignal, NonIntegerStepSamplesContinuousSignal) {
  ExponentialModel m;
  m.nodes = cvec({node(0.2, 0.1)});
  m.amplitudes = cvec({Complex(1.0, -2.0)});
  m.delta = 0.5;
  m.n = 6;
  const ComplexVector f = gen_signal(m);
  for (Eigen::Index k = 0; k < 6; ++k) {
    const Complex ref = Complex(1.0, -2.0) * std::exp(Complex(-0.2, 2 * std::numbers::pi * 0.1) *
                                                     (0.5 * static_cast<double>(k)));
    EXPECT_LT(std::abs(f(k) - ref), 1e-12);
  }
}

TEST(GenSignal, Errors) {
  ExponentialModel m;
  m.nodes = cvec({-2.0});
  m.amplitudes = cvec({1.0});
  m.delta = 0.5;
  m.n = 4;
  EXPECT_THROW(gen_signal(m), DomainError);
  m.delta = 1.0;
  m.n = 1;
  EXPECT_THROW(gen_signal(m), DimensionError);
  m.n = 4;
  m.amplitudes = cvec({1.0, 2.0});
  EXPECT_THROW(gen_signal(m), DimensionError);
  m.amplitudes = cvec({1.0});
  m.delta = 0.0;
  EXPECT_THROW(gen_signal(m), DomainError);
  m.delta = 2.0;
  m.nodes = cvec({node(0.0, 0.3)});
  EXPECT_THROW(gen_signal(m), DomainError);
}

TEST(AddNoise, VarianceAndMean) {
  const ComplexVector zero = ComplexVector::Zero(100000);
  const ComplexVector d = add_noise(zero, 4.0, 2024);
  double re = 0.0, im = 0.0, re2 = 0.0, im2 = 0.0;
  for (Eigen::Index k = 0; k < d.size(); ++k) {
    re += d(k).real();
    im += d(k).imag();
    re2 += d(k).real() * d(k).real();
    im2 += d(k).imag() * d(k).imag();
  }
  const double n = static_cast<double>(d.size());
  EXPECT_NEAR(re2 / n, 2.0, 0.04);
  EXPECT_NEAR(im2 / n, 2.0, 0.04);
  EXPECT_NEAR((re2 + im2) / n, 4.0, 0.08);
  EXPECT_NEAR(re / n, 0.0, 0.03);
  EXPECT_NEAR(im / n, 0.0, 0.03);
}

TEST(AddNoise, DeterministicAndZeroVariance) {
  const ComplexVector s = ComplexVector::Constant(5, Complex(1.0, 2.0));
  EXPECT_EQ(add_noise(s, 3.0, 7), add_noise(s, 3.0, 7));
  EXPECT_NE(add_noise(s, 3.0, 7), add_noise(s, 3.0, 8));
  EXPECT_EQ(add_noise(s, 0.0, 7), s);
  EXPECT_THROW(add_noise(s, -1.0, 7), DomainError);
}

TEST(Snr, Examples) {
  EXPECT_NEAR(snr(cvec({20.0, 6.0, 3.0, 2.0, 1.0}), 100.0), 0.02, 1e-15);
  EXPECT_NEAR(snr(cvec({1.0}), 2.0), 1.0, 1e-15);
  const ComplexVector xi = cvec({Complex(1, 1), 3.0});
  EXPECT_NEAR(snr(3.0 * xi, 9.0 * 5.0), snr(xi, 5.0), 1e-15);
  EXPECT_THROW(snr(xi, 0.0), DomainError);
}

TEST(RelativeError, Examples) {
  const ComplexVector t = cvec({3.0, 4.0});
  EXPECT_EQ(relative_error(t, t), 0.0);
  EXPECT_NEAR(relative_error(t, ComplexVector::Zero(2)), 1.0, 1e-15);
  EXPECT_NEAR(relative_error(t, cvec({3.0, Complex(4.0, 5.0)})), 1.0, 1e-15);
  EXPECT_THROW(relative_error(ComplexVector::Zero(2), t), DomainError);
  EXPECT_THROW(relative_error(t, ComplexVector::Zero(3)), DimensionError);
}

TEST(Histogram, CountsAndEdges) {
  const std::vector<double> v = {0.0, 0.1, 0.5, 0.9, 1.0};
  const Histogram h = histogram(v, 2);
  ASSERT_EQ(h.edges.size(), 3u);
  EXPECT_DOUBLE_EQ(h.edges[0], 0.0);
  EXPECT_DOUBLE_EQ(h.edges[1], 0.5);
  EXPECT_DOUBLE_EQ(h.edges[2], 1.0);
  EXPECT_EQ(h.counts[0], 2u);
  EXPECT_EQ(h.counts[1], 3u);
}

TEST(Histogram, ConstantSampleAndFixedRange) {
  const std::vector<double> c = {2.0, 2.0, 2.0};
  const Histogram h = histogram(c, 3);
  EXPECT_DOUBLE_EQ(h.edges.front(), 1.5);
  EXPECT_DOUBLE_EQ(h.edges.back(), 2.5);
  EXPECT_EQ(h.counts[1], 3u);
  const std::vector<double> v = {-5.0, 0.25, 9.0};
  const Histogram f = histogram(v, 2, 0.0, 1.0);
  EXPECT_EQ(f.counts[0], 2u);
  EXPECT_EQ(f.counts[1], 1u);
  EXPECT_THROW(histogram(v, 0), DomainError);
  EXPECT_THROW(histogram(std::vector<double>{}, 2), DimensionError);
}

TEST(SampleStats, Basic) {
  const std::vector<double> v = {1.0, 2.0, 3.0, 10.0};
  const SampleStats s = sample_stats(v);
  EXPECT_DOUBLE_EQ(s.mean, 4.0);
  EXPECT_DOUBLE_EQ(s.median, 2.5);
  EXPECT_DOUBLE_EQ(s.min, 1.0);
  EXPECT_DOUBLE_EQ(s.max, 10.0);
  EXPECT_NEAR(s.stddev, std::sqrt(((9.0 + 4.0 + 1.0 + 36.0) / 3.0)), 1e-12);
  EXPECT_EQ(s.count, 4u);
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<int> hits(37, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
}

TEST(RunExperiment, ReproducibleAndThreadIndependent) {
  ExperimentConfig cfg = small_config();
  const ExperimentResult a = run_experiment(cfg);
  cfg.threads = 3;
  const ExperimentResult b = run_experiment(cfg);
  ASSERT_EQ(a.records.size(), 6u);
  for (std::size_t r = 0; r < a.records.size(); ++r) {
    EXPECT_EQ(a.records[r].index, r);
    EXPECT_EQ(a.records[r].e_d, b.records[r].e_d);
    EXPECT_EQ(a.records[r].e_ls, b.records[r].e_ls);
    EXPECT_EQ(a.records[r].seed_used, b.records[r].seed_used);
    EXPECT_FALSE(a.records[r].failed);
  }
  cfg.seed = 100;
  const ExperimentResult c = run_experiment(cfg);
  EXPECT_NE(a.records[0].e_ls, c.records[0].e_ls);
}

TEST(RunExperiment, SummaryIsConsistent) {
  const ExperimentResult res = run_experiment(small_config());
  EXPECT_EQ(res.summary.e_d.count, 6u);
  EXPECT_EQ(res.summary.failures, 0u);
  EXPECT_NEAR(res.summary.snr, 2.0, 1e-12);
  EXPECT_GT(res.summary.condition_number, 1.0);
  std::size_t total = 0;
  for (auto c : res.summary.hist_d.counts) total += c;
  EXPECT_EQ(total, 6u);
  EXPECT_EQ(res.summary.hist_d.edges, res.summary.hist_ls.edges);
}

TEST(RunExperiment, SmallNoiseGivesSmallErrors) {
  ExperimentConfig cfg = small_config();
  cfg.sigma2 = 1e-8;
  cfg.replications = 2;
  const ExperimentResult res = run_experiment(cfg);
  for (const auto& r : res.records) {
    EXPECT_LT(r.e_ls, 1e-3);
    EXPECT_LT(r.e_d, 1e-2);
  }
}

TEST(RunExperiment, ConfigErrors) {
  ExperimentConfig cfg = small_config();
  cfg.replications = 0;
  EXPECT_THROW(run_experiment(cfg), DomainError);
  cfg = small_config();
  cfg.m = cfg.model.n + cfg.model.p() - 1;
  EXPECT_THROW(run_experiment(cfg), DimensionError);
  cfg = small_config();
  cfg.sigma2 = 0.0;
  EXPECT_THROW(run_experiment(cfg), DomainError);
}

TEST(MseStudy, MonteCarloMatchesClosedForm) {
  // Least squares here is the ordinary one, whose MSE equals the GSVD
  // expression for a designed noise basis.
  std::mt19937_64 rng(31);
  DesignedPair dp;
  dp.v = random_matrix(rng, 4, 2);
  RealVector ratios(2);
  ratios << 0.6, 1.4;
  dp.ve = design_noise_basis(dp.v, ratios);
  RealVector xi(2);
  xi << 1.0, -0.5;
  MseStudyOptions opt;
  opt.replications = 20000;
  opt.seed = 5;
  const MseStudyResult res = run_mse_study(dp.v, dp.ve, xi, 0.8, opt);
  const double ref_d = mse_d_closed(dp.v, dp.ve, xi, 0.8);
  const double ref_ls = mse_ls_gsvd(dp.v, dp.ve, 0.8);
  EXPECT_NEAR(res.mse_d, ref_d, 0.02 * ref_d);
  EXPECT_NEAR(res.mse_ls, ref_ls, 0.02 * ref_ls);
}

TEST(MseStudy, SolverAndClosedFormAgreePerReplication) {
  std::mt19937_64 rng(32);
  const DesignedPair dp = designed_pair(rng, 5, 3, 6);
  const RealVector xi = random_vector(rng, 3);
  MseStudyOptions opt;
  opt.replications = 200;
  opt.seed = 6;
  const MseStudyResult a = run_mse_study(dp.v, dp.ve, xi, 1.0, opt);
  opt.closed_form = true;
  const MseStudyResult b = run_mse_study(dp.v, dp.ve, xi, 1.0, opt);
  EXPECT_NEAR(a.mse_d, b.mse_d, 1e-8);
  EXPECT_EQ(a.mse_ls, b.mse_ls);
}
