#pragma once

// Monte Carlo laboratory: complex exponential signals, noise, replication
// engine and summary statistics.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "l1dom/estimator.hpp"
#include "l1dom/rng.hpp"
#include "l1dom/types.hpp"

namespace l1dom {

/// f(t) = sum_j xi_j z_j^t sampled at t = k * delta, k = 0..n-1.
struct ExponentialModel {
  ComplexVector nodes;
  ComplexVector amplitudes;
  double delta = 1.0;
  Eigen::Index n = 0;

  Eigen::Index p() const { return nodes.size(); }
  /// Requires |arg z_j| * delta <= pi, n >= 2p, delta > 0, equal lengths.
  void validate() const;
  /// z_j^delta on the principal branch; exact integer powers when delta is
  /// an integer. The design matrix of the sampled model is
  /// vandermonde(effective_nodes(), n).
  ComplexVector effective_nodes() const;
};

/// Noise-free samples. Throws DomainError for a negative real node with
/// non-integer delta (branch cut).
ComplexVector gen_signal(const ExponentialModel& model);

/// Adds i.i.d. complex Gaussian noise with variance sigma2/2 on the real and
/// imaginary part of each sample.
ComplexVector add_noise(const ComplexVector& signal, double sigma2, Rng& rng);
ComplexVector add_noise(const ComplexVector& signal, double sigma2,
                        std::uint64_t seed);

/// 2 * min_j |xi_j|^2 / sigma2.
double snr(const ComplexVector& xi, double sigma2);

/// ||truth - estimate||_2 / ||truth||_2. Throws DomainError on a zero truth.
double relative_error(const ComplexVector& truth, const ComplexVector& estimate);
double relative_error(const RealVector& truth, const RealVector& estimate);

struct Histogram {
  std::vector<double> edges;          // bins + 1 entries
  std::vector<std::size_t> counts;    // bins entries
};

/// Equal-width bins over [min, max] of the data (last bin closed). A
/// constant sample gets the range [v - 0.5, v + 0.5].
Histogram histogram(std::span<const double> values, int bins);
/// Fixed range version; values outside [lo, hi] are clamped to the end bins.
Histogram histogram(std::span<const double> values, int bins, double lo, double hi);

enum class ExperimentEstimator {
  dominating,           // compare xi_D with xi
  sorted_whole_vector,  // p largest entries of [xi_D; eta_hat]
};

struct ExperimentConfig {
  ExponentialModel model;
  double sigma2 = 100.0;
  int replications = 1000;
  Eigen::Index m = 0;         // extended dimension; 0 selects 2n
  double tau = 0.0;           // 0 selects sqrt(sigma2) / 100
  std::uint64_t seed = 0;
  ExperimentEstimator estimator = ExperimentEstimator::dominating;
  BarrierSettings barrier;    // tau is taken from the field above
  int histogram_bins = 30;
  int threads = 1;

  Eigen::Index resolved_m() const { return m > 0 ? m : 2 * model.n; }
  double resolved_tau() const;
  void validate() const;
};

struct ReplicationRecord {
  std::size_t index = 0;
  double e_d = 0.0;
  double e_ls = 0.0;
  SolveStatus status = SolveStatus::optimal;
  std::uint64_t seed_used = 0;
  bool failed = false;
  std::string error;
};

struct SampleStats {
  double mean = 0.0;
  double median = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

SampleStats sample_stats(std::span<const double> values);

struct ExperimentSummary {
  SampleStats e_d;
  SampleStats e_ls;
  Histogram hist_d;
  Histogram hist_ls;          // same edges as hist_d
  std::size_t failures = 0;
  double snr = 0.0;
  double condition_number = 0.0;   // of the Vandermonde design
  std::size_t non_optimal = 0;     // records with solver status != optimal
};

struct ExperimentResult {
  std::vector<ReplicationRecord> records;   // in replication order
  ExperimentSummary summary;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Runs fn(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& fn);

// Squared-error study for real models d = V xi + Ve eta, eta ~ N(0, sigma2 I).
struct MseStudyOptions {
  int replications = 20000;
  std::uint64_t seed = 0;
  bool randomize_ties = true;
  /// Use the closed-form GSVD rule instead of the l1 solver.
  bool closed_form = false;
  int threads = 1;
};

struct MseStudyResult {
  double mse_d = 0.0;
  double mse_ls = 0.0;    // ordinary least squares
  double se_d = 0.0;      // standard errors of the two means
  double se_ls = 0.0;
  double se_diff = 0.0;   // standard error of mean(err_d - err_ls)
  int replications = 0;
};

MseStudyResult run_mse_study(const RealMatrix& v, const RealMatrix& ve,
                             const RealVector& xi, double sigma2,
                             const MseStudyOptions& options);

}  // namespace l1dom
