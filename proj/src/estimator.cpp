#include "l1dom/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "l1dom/errors.hpp"
#include "l1dom/realiso.hpp"

namespace l1dom {

namespace {

template <typename Matrix>
void require_full_column_rank(const Matrix& v, const char* who) {
  if (v.rows() < v.cols()) {
    throw DimensionError(std::string(who) + ": design has n < p");
  }
  Eigen::JacobiSVD<Matrix> svd(v);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || !(s(s.size() - 1) > kRankTolerance * s(0))) {
    throw RankDeficiency(std::string(who) + ": rank deficiency in V");
  }
}

void require_variance(double sigma2, const char* who) {
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) {
    throw DomainError(std::string(who) + ": sigma2 must be finite and >= 0");
  }
}

template <typename Matrix>
double mse_ls_impl(const Matrix& v, double sigma2) {
  require_variance(sigma2, "mse_ls");
  require_full_column_rank(v, "mse_ls");
  Eigen::JacobiSVD<Matrix> svd(v);
  return sigma2 * svd.singularValues().cwiseAbs2().cwiseInverse().sum();
}

template <typename Matrix, typename Vector>
Vector least_squares_impl(const Matrix& v, const Vector& d) {
  if (v.rows() != d.size()) {
    throw DimensionError("least_squares: V has " + std::to_string(v.rows()) +
                         " rows but d has length " + std::to_string(d.size()));
  }
  require_full_column_rank(v, "least_squares");
  return v.colPivHouseholderQr().solve(d);
}

}  // namespace

void LinearModel::validate() const {
  if (v.rows() != ve.rows()) {
    throw DimensionError("model: V and Ve must have the same number of rows");
  }
  if (v.cols() < 1 || ve.cols() < 1) {
    throw DimensionError("model: V and Ve need at least one column");
  }
  if (!all_finite(v) || !all_finite(ve)) throw DomainError("model: non-finite entry");
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) {
    throw DomainError("model: sigma2 must be a finite nonnegative number");
  }
  require_full_column_rank(v, "model");
}

ComplexVector least_squares(const ComplexMatrix& v, const ComplexVector& d) {
  return least_squares_impl(v, d);
}

RealVector least_squares(const RealMatrix& v, const RealVector& d) {
  return least_squares_impl(v, d);
}

double mse_ls(const ComplexMatrix& v, double sigma2) { return mse_ls_impl(v, sigma2); }
double mse_ls(const RealMatrix& v, double sigma2) { return mse_ls_impl(v, sigma2); }

RealEstimate dominating_estimate(const RealMatrix& v, const RealMatrix& ve,
                                 const RealVector& d,
                                 const EstimateOptions& options) {
  const Eigen::Index n = v.rows();
  const Eigen::Index p = v.cols();
  const Eigen::Index w = ve.cols();
  if (ve.rows() != n || d.size() != n) {
    throw DimensionError("dominating_estimate: V, Ve and d disagree on n");
  }
  require_full_column_rank(v, "dominating_estimate");

  RealEstimate out;
  if (options.mode == EstimationMode::equality) {
    if (w == n) {
      Eigen::FullPivLU<RealMatrix> lu(ve);
      lu.setThreshold(kRankTolerance);
      if (!lu.isInvertible()) {
        throw RankDeficiency("dominating_estimate: square Ve is singular");
      }
      RealVector b(p + n);
      b.head(p).setZero();
      b.tail(n) = lu.solve(d);
      RealMatrix bm(p + n, p);
      bm.topRows(p) = -RealMatrix::Identity(p, p);
      bm.bottomRows(n) = lu.solve(v);
      const L1Solution fit = l1_fit(b, bm, options.tie);
      out.xi_d = fit.x;
      out.eta_hat = lu.solve(d - v * fit.x);
      out.solver_status = fit.status;
    } else {
      RealMatrix a(n, p + w);
      a << v, ve;
      const MinNormSolution sol = l1_min_equality(a, d, options.tie);
      out.xi_d = sol.x.head(p);
      out.eta_hat = sol.x.tail(w);
      out.solver_status = sol.status;
    }
  } else {
    RealMatrix a(n, p + w);
    a << v, ve;
    auto [scaled, scale] = column_scale(a);
    const BarrierResult res = l1_min_residual(scaled, d, options.barrier);
    const RealVector x = scale.cwiseProduct(res.x);
    out.xi_d = x.head(p);
    out.eta_hat = x.tail(w);
    out.solver_status = res.status;
  }
  out.objective = out.xi_d.lpNorm<1>() + out.eta_hat.lpNorm<1>();
  return out;
}

DominatingEstimate dominating_estimate(const LinearModel& model,
                                       const ComplexVector& d,
                                       const EstimateOptions& options) {
  model.validate();
  if (d.size() != model.n()) {
    throw DimensionError("dominating_estimate: d has length " +
                         std::to_string(d.size()) + ", expected " +
                         std::to_string(model.n()));
  }
  const RealEstimate re = dominating_estimate(
      matrix_to_real(model.v), matrix_to_real(model.ve), vector_to_real(d), options);
  DominatingEstimate out;
  out.xi_d = real_to_vector(re.xi_d);
  out.eta_hat = real_to_vector(re.eta_hat);
  out.objective = re.objective;
  out.solver_status = re.solver_status;
  return out;
}

RealVector closed_form_gsvd(const GsvdFactors& factors, const RealVector& d_tilde) {
  const Eigen::Index n = factors.n();
  const Eigen::Index p = factors.p();
  if (d_tilde.size() != n) {
    throw DimensionError("closed_form_gsvd: d_tilde must have length n");
  }
  RealVector out = RealVector::Zero(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (alpha_exceeds_beta(factors.alphas(j), factors.betas(j))) {
      out(j) = d_tilde(n - p + j) / factors.alphas(j);
    }
  }
  return out;
}

RealVector closed_form_estimate(const RealMatrix& v, const RealMatrix& ve,
                                const RealVector& d) {
  const GsvdFactors f = gsvd(v, ve);
  const RealVector d_tilde = f.x.partialPivLu().solve(d);
  return f.u1.transpose() * closed_form_gsvd(f, d_tilde);
}

ThresholdReport domination_threshold(const RealMatrix& v, const RealMatrix& ve,
                                     const RealVector& xi) {
  if (xi.size() != v.cols()) {
    throw DimensionError("domination_threshold: xi must have length p");
  }
  const GsvdFactors f = gsvd(v, ve);
  const RealVector r2 = f.ratios().cwiseAbs2();
  ThresholdReport rep;
  rep.p = static_cast<int>(f.p());
  rep.q = f.q;
  rep.xi_tilde = f.u1 * xi;
  const Eigen::Index shrunk = rep.p - rep.q;
  rep.bias2 = rep.xi_tilde.head(shrunk).squaredNorm();
  rep.variance_sum = r2.head(shrunk).sum();
  rep.kept_variance_sum = r2.tail(rep.q).sum();
  rep.always_dominated = shrunk == 0;
  rep.sigma2_threshold = rep.always_dominated ? 0.0 : rep.bias2 / rep.variance_sum;
  return rep;
}

ThresholdReport domination_threshold(const ComplexMatrix& v,
                                     const ComplexMatrix& ve,
                                     const ComplexVector& xi) {
  // The isomorph doubles every generalized value and carries sigma2/2 per
  // real component; halving the sums restores the complex convention.
  ThresholdReport rep = domination_threshold(matrix_to_real(v), matrix_to_real(ve),
                                             vector_to_real(xi));
  rep.p /= 2;
  rep.q /= 2;
  rep.variance_sum /= 2.0;
  rep.kept_variance_sum /= 2.0;
  rep.sigma2_threshold = rep.always_dominated ? 0.0 : rep.bias2 / rep.variance_sum;
  return rep;
}

double mse_d_closed(const RealMatrix& v, const RealMatrix& ve,
                    const RealVector& xi, double sigma2, TieTreatment ties) {
  require_variance(sigma2, "mse_d_closed");
  if (xi.size() != v.cols()) {
    throw DimensionError("mse_d_closed: xi must have length p");
  }
  const GsvdFactors f = gsvd(v, ve);
  const RealVector xt = f.u1 * xi;
  const RealVector r = f.ratios();
  double mse = 0.0;
  for (Eigen::Index j = 0; j < f.p(); ++j) {
    const double bias = xt(j) * xt(j);
    const double var = sigma2 * r(j) * r(j);
    if (alpha_exceeds_beta(f.alphas(j), f.betas(j))) {
      mse += var;
    } else if (ties == TieTreatment::uniform &&
               !alpha_exceeds_beta(f.betas(j), f.alphas(j))) {
      mse += 0.5 * (bias + var);
    } else {
      mse += bias;
    }
  }
  return mse;
}

double mse_d_closed(const ComplexMatrix& v, const ComplexMatrix& ve,
                    const ComplexVector& xi, double sigma2, TieTreatment ties) {
  return mse_d_closed(matrix_to_real(v), matrix_to_real(ve), vector_to_real(xi),
                      sigma2 / 2.0, ties);
}

double mse_ls_gsvd(const RealMatrix& v, const RealMatrix& ve, double sigma2) {
  require_variance(sigma2, "mse_ls_gsvd");
  return sigma2 * gsvd(v, ve).ratios().squaredNorm();
}

ConvenienceReport convenience_check(const RealMatrix& v, const RealMatrix& ve,
                                    double tau_b, double sigma2) {
  if (!(tau_b >= 0.0)) throw DomainError("convenience_check: tau_b must be >= 0");
  const GsvdFactors f = gsvd(v, ve);
  ConvenienceReport rep;
  rep.p = static_cast<int>(f.p());
  rep.q = f.q;
  rep.variance_sum = f.ratios().head(rep.p - rep.q).squaredNorm();
  if (rep.q == rep.p) {
    rep.convenient = true;
    rep.margin = 0.0;
    return rep;
  }
  rep.margin = sigma2 * rep.variance_sum - tau_b;
  rep.convenient = rep.margin >= 0.0;
  return rep;
}

ConvenienceReport convenience_check(const ComplexMatrix& v,
                                    const ComplexMatrix& ve, double tau_b,
                                    double sigma2) {
  // Real image with sigma2/2 per component: sigma2/2 * (2 * sum) = sigma2 * sum.
  ConvenienceReport rep =
      convenience_check(matrix_to_real(v), matrix_to_real(ve), tau_b, sigma2 / 2.0);
  rep.p /= 2;
  rep.q /= 2;
  rep.variance_sum /= 2.0;
  return rep;
}

ComplexVector sorted_whole_vector_estimate(const DominatingEstimate& est,
                                           Eigen::Index p) {
  ComplexVector whole(est.xi_d.size() + est.eta_hat.size());
  whole << est.xi_d, est.eta_hat;
  if (p < 0 || p > whole.size()) {
    throw DimensionError("sorted_whole_vector_estimate: p exceeds m");
  }
  std::vector<Eigen::Index> order(whole.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(whole(a)) > std::abs(whole(b));
  });
  ComplexVector out(p);
  for (Eigen::Index k = 0; k < p; ++k) out(k) = whole(order[k]);
  return out;
}

}  // namespace l1dom
