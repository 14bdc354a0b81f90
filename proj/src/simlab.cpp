#include "l1dom/simlab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <thread>

#include "l1dom/decomp.hpp"
#include "l1dom/errors.hpp"
#include "l1dom/realiso.hpp"

namespace l1dom {

namespace {

bool is_integer(double v) { return std::floor(v) == v; }

Complex node_power(Complex z, double exponent) {
  if (is_integer(exponent) && std::abs(exponent) < 1e9) {
    return std::pow(z, static_cast<int>(exponent));
  }
  if (z.imag() == 0.0 && z.real() < 0.0) {
    throw DomainError("node on the negative real axis with non-integer exponent");
  }
  return std::exp(exponent * std::log(z));
}

}  // namespace

void ExponentialModel::validate() const {
  if (nodes.size() != amplitudes.size() || nodes.size() < 1) {
    throw DimensionError("exponential model: need equal, nonzero numbers of nodes and amplitudes");
  }
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw DomainError("exponential model: delta must be positive");
  }
  if (n < 2 * nodes.size()) {
    throw DimensionError("exponential model: need n >= 2p");
  }
  if (!all_finite(ComplexMatrix(nodes)) || !all_finite(ComplexMatrix(amplitudes))) {
    throw DomainError("exponential model: non-finite parameter");
  }
  for (Eigen::Index j = 0; j < nodes.size(); ++j) {
    if (std::abs(std::arg(nodes(j))) * delta > std::numbers::pi + 1e-12) {
      throw DomainError("exponential model: node " + std::to_string(j) +
                        " violates |arg z| * delta <= pi");
    }
  }
}

ComplexVector ExponentialModel::effective_nodes() const {
  ComplexVector out(nodes.size());
  for (Eigen::Index j = 0; j < nodes.size(); ++j) out(j) = node_power(nodes(j), delta);
  return out;
}

ComplexVector gen_signal(const ExponentialModel& model) {
  model.validate();
  const ComplexVector z = model.effective_nodes();
  return vandermonde(z, model.n) * model.amplitudes;
}

ComplexVector add_noise(const ComplexVector& signal, double sigma2, Rng& rng) {
  if (!(sigma2 >= 0.0)) throw DomainError("add_noise: sigma2 must be >= 0");
  std::normal_distribution<double> normal(0.0, std::sqrt(sigma2 / 2.0));
  ComplexVector out = signal;
  for (Eigen::Index k = 0; k < out.size(); ++k) {
    const double re = normal(rng);
    const double im = normal(rng);
    out(k) += Complex(re, im);
  }
  return out;
}

ComplexVector add_noise(const ComplexVector& signal, double sigma2,
                        std::uint64_t seed) {
  Rng rng(seed);
  return add_noise(signal, sigma2, rng);
}

double snr(const ComplexVector& xi, double sigma2) {
  if (!(sigma2 > 0.0)) throw DomainError("snr: sigma2 must be positive");
  if (xi.size() == 0) throw DimensionError("snr: empty parameter vector");
  return 2.0 * xi.cwiseAbs2().minCoeff() / sigma2;
}

double relative_error(const ComplexVector& truth, const ComplexVector& estimate) {
  if (truth.size() != estimate.size()) {
    throw DimensionError("relative_error: length mismatch");
  }
  const double norm = truth.norm();
  if (norm == 0.0) throw DomainError("relative_error: zero reference vector");
  return (truth - estimate).norm() / norm;
}

double relative_error(const RealVector& truth, const RealVector& estimate) {
  return relative_error(ComplexVector(truth.cast<Complex>()),
                        ComplexVector(estimate.cast<Complex>()));
}

Histogram histogram(std::span<const double> values, int bins, double lo, double hi) {
  if (bins < 1) throw DomainError("histogram: bins must be >= 1");
  if (values.empty()) throw DimensionError("histogram: empty input");
  if (!(hi > lo)) throw DomainError("histogram: empty range");
  Histogram h;
  h.edges.resize(bins + 1);
  h.counts.assign(bins, 0);
  const double width = (hi - lo) / bins;
  for (int k = 0; k <= bins; ++k) h.edges[k] = lo + k * width;
  h.edges[bins] = hi;
  for (double v : values) {
    int k = static_cast<int>(std::floor((v - lo) / width));
    k = std::clamp(k, 0, bins - 1);
    ++h.counts[k];
  }
  return h;
}

Histogram histogram(std::span<const double> values, int bins) {
  if (values.empty()) throw DimensionError("histogram: empty input");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it;
  double hi = *hi_it;
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  return histogram(values, bins, lo, hi);
}

SampleStats sample_stats(std::span<const double> values) {
  SampleStats s;
  s.count = values.size();
  if (values.empty()) return s;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  double sum = 0.0;
  for (double v : sorted) sum += v;
  s.mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double v : sorted) ss += (v - s.mean) * (v - s.mean);
  s.stddev = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  s.median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  s.min = sorted.front();
  s.max = sorted.back();
  return s;
}

double ExperimentConfig::resolved_tau() const {
  return tau > 0.0 ? tau : std::sqrt(sigma2) / 100.0;
}

void ExperimentConfig::validate() const {
  model.validate();
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw DomainError("experiment: sigma2 must be positive");
  }
  if (replications < 1) throw DomainError("experiment: replications must be >= 1");
  if (resolved_m() - model.p() < model.n) {
    throw DimensionError("experiment: need m - p >= n");
  }
  if (tau < 0.0) throw DomainError("experiment: tau must be positive");
  if (histogram_bins < 1) throw DomainError("experiment: histogram_bins must be >= 1");
  BarrierSettings b = barrier;
  b.tau = resolved_tau();
  b.validate();
}

void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const ExponentialModel& em = cfg.model;
  const Eigen::Index p = em.p();
  const Eigen::Index n = em.n;

  LinearModel lm;
  lm.v = vandermonde(em.effective_nodes(), n);
  lm.ve = fourier_basis(n, cfg.resolved_m() - p);
  lm.sigma2 = cfg.sigma2;
  lm.validate();

  EstimateOptions opts;
  opts.mode = EstimationMode::residual;
  opts.barrier = cfg.barrier;
  opts.barrier.tau = cfg.resolved_tau();

  const ComplexVector signal = gen_signal(em);
  const Eigen::ColPivHouseholderQR<ComplexMatrix> ls_qr(lm.v);

  ExperimentResult result;
  result.records.resize(cfg.replications);
  parallel_for(result.records.size(), cfg.threads, [&](std::size_t r) {
    ReplicationRecord& rec = result.records[r];
    rec.index = r;
    rec.seed_used = stream_seed(cfg.seed, r);
    Rng rng(rec.seed_used);
    const ComplexVector d = add_noise(signal, cfg.sigma2, rng);
    rec.e_ls = relative_error(em.amplitudes, ComplexVector(ls_qr.solve(d)));
    try {
      const DominatingEstimate est = dominating_estimate(lm, d, opts);
      rec.status = est.solver_status;
      const ComplexVector xi_hat =
          cfg.estimator == ExperimentEstimator::dominating
              ? est.xi_d
              : sorted_whole_vector_estimate(est, p);
      rec.e_d = relative_error(em.amplitudes, xi_hat);
    } catch (const std::exception& e) {
      rec.failed = true;
      rec.status = SolveStatus::infeasible;
      rec.error = e.what();
      rec.e_d = std::numeric_limits<double>::quiet_NaN();
    }
  });

  std::vector<double> ed;
  std::vector<double> els;
  ExperimentSummary& s = result.summary;
  for (const auto& rec : result.records) {
    if (rec.failed) {
      ++s.failures;
      continue;
    }
    if (rec.status != SolveStatus::optimal) ++s.non_optimal;
    ed.push_back(rec.e_d);
    els.push_back(rec.e_ls);
  }
  s.e_d = sample_stats(ed);
  s.e_ls = sample_stats(els);
  s.snr = snr(em.amplitudes, cfg.sigma2);
  s.condition_number = condition_number(lm.v);
  if (!ed.empty()) {
    double lo = std::min(s.e_d.min, s.e_ls.min);
    double hi = std::max(s.e_d.max, s.e_ls.max);
    if (lo == hi) {
      lo -= 0.5;
      hi += 0.5;
    }
    s.hist_d = histogram(ed, cfg.histogram_bins, lo, hi);
    s.hist_ls = histogram(els, cfg.histogram_bins, lo, hi);
  }
  return result;
}

MseStudyResult run_mse_study(const RealMatrix& v, const RealMatrix& ve,
                             const RealVector& xi, double sigma2,
                             const MseStudyOptions& options) {
  if (options.replications < 2) {
    throw DomainError("mse study: need at least two replications");
  }
  if (xi.size() != v.cols() || ve.rows() != v.rows()) {
    throw DimensionError("mse study: inconsistent dimensions");
  }
  const RealVector signal = v * xi;
  const Eigen::ColPivHouseholderQR<RealMatrix> ls_qr(v);
  const std::size_t reps = static_cast<std::size_t>(options.replications);
  std::vector<double> err_d(reps);
  std::vector<double> err_ls(reps);
  const double sd = std::sqrt(sigma2);

  parallel_for(reps, options.threads, [&](std::size_t r) {
    Rng rng = make_rng(options.seed, r);
    std::normal_distribution<double> normal(0.0, sd);
    RealVector eta(ve.cols());
    for (Eigen::Index k = 0; k < eta.size(); ++k) eta(k) = normal(rng);
    const RealVector d = signal + ve * eta;
    err_ls[r] = (xi - ls_qr.solve(d)).squaredNorm();
    RealVector xi_d;
    if (options.closed_form) {
      xi_d = closed_form_estimate(v, ve, d);
    } else {
      EstimateOptions eo;
      eo.tie = options.randomize_ties ? TiePolicy::randomize(rng())
                                      : TiePolicy::first_basis();
      xi_d = dominating_estimate(v, ve, d, eo).xi_d;
    }
    err_d[r] = (xi - xi_d).squaredNorm();
  });

  std::vector<double> diff(reps);
  for (std::size_t r = 0; r < reps; ++r) diff[r] = err_d[r] - err_ls[r];
  const SampleStats sd_stats = sample_stats(err_d);
  const SampleStats sl_stats = sample_stats(err_ls);
  const SampleStats diff_stats = sample_stats(diff);
  const double root = std::sqrt(static_cast<double>(reps));
  MseStudyResult out;
  out.replications = options.replications;
  out.mse_d = sd_stats.mean;
  out.mse_ls = sl_stats.mean;
  out.se_d = sd_stats.stddev / root;
  out.se_ls = sl_stats.stddev / root;
  out.se_diff = diff_stats.stddev / root;
  return out;
}

}  // namespace l1dom
