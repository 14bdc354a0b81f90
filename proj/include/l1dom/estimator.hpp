#pragma once

// Least squares and the l1 dominating estimator, with the analytic MSE and
// threshold formulas of the GSVD analysis.
//
// Complex problems are mapped to their real isomorph before any solver call.
// The analytic functions take real matrices with noise variance sigma2 per
// real component; the complex overloads convert and report values in the
// complex convention (total variance sigma2 per sample, sigma2/2 per real
// part), so their thresholds compare directly with the complex sigma2.

#include <optional>

#include "l1dom/decomp.hpp"
#include "l1dom/l1solve.hpp"
#include "l1dom/types.hpp"

namespace l1dom {

struct LinearModel {
  ComplexMatrix v;    // n x p design
  ComplexMatrix ve;   // n x (m - p) noise basis
  double sigma2 = 1.0;

  Eigen::Index n() const { return v.rows(); }
  Eigen::Index p() const { return v.cols(); }
  Eigen::Index m() const { return v.cols() + ve.cols(); }

  /// Throws DimensionError / RankDeficiency / DomainError.
  void validate() const;
};

enum class EstimationMode { equality, residual };

struct EstimateOptions {
  EstimationMode mode = EstimationMode::equality;
  BarrierSettings barrier;    // residual mode only
  TiePolicy tie = TiePolicy::first_basis();
};

struct DominatingEstimate {
  ComplexVector xi_d;
  ComplexVector eta_hat;
  double objective = 0.0;   // l1 norm of the real image of [xi_d; eta_hat]
  SolveStatus solver_status = SolveStatus::optimal;
};

struct RealEstimate {
  RealVector xi_d;
  RealVector eta_hat;
  double objective = 0.0;
  SolveStatus solver_status = SolveStatus::optimal;
};

ComplexVector least_squares(const ComplexMatrix& v, const ComplexVector& d);
RealVector least_squares(const RealMatrix& v, const RealVector& d);

/// sigma2 * sum_j c_j^{-2} = sigma2 * tr((V'V)^{-1}).
double mse_ls(const ComplexMatrix& v, double sigma2);
double mse_ls(const RealMatrix& v, double sigma2);

/// x = [xi_D; eta] minimizing ||x||_1 over d = [V | Ve] x (equality mode) or
/// over ||d - [V | Ve] D y||_2 <= tau with unit-norm columns and x = D y
/// (residual mode). Equality mode with square Ve uses the explicit
/// reduction b = [0; Ve^{-1} d], B = [-I; Ve^{-1} V].
DominatingEstimate dominating_estimate(const LinearModel& model,
                                       const ComplexVector& d,
                                       const EstimateOptions& options = {});
RealEstimate dominating_estimate(const RealMatrix& v, const RealMatrix& ve,
                                 const RealVector& d,
                                 const EstimateOptions& options = {});

/// Componentwise selection rule in GSVD coordinates: entry j is 0 when
/// alpha_j <= beta_j and d_tilde(n - p + j) / alpha_j otherwise.
RealVector closed_form_gsvd(const GsvdFactors& factors, const RealVector& d_tilde);

/// closed_form_gsvd mapped back to the original parameters:
/// xi_D = U1' * closed_form_gsvd(gsvd(V, Ve), X^{-1} d).
RealVector closed_form_estimate(const RealMatrix& v, const RealMatrix& ve,
                                const RealVector& d);

struct ThresholdReport {
  double sigma2_threshold = 0.0;
  int q = 0;
  int p = 0;
  double bias2 = 0.0;          // sum_{j <= p-q} xi_tilde_j^2
  double variance_sum = 0.0;   // sum_{j <= p-q} beta_j^2 / alpha_j^2
  double kept_variance_sum = 0.0;  // sum_{j > p-q} beta_j^2 / alpha_j^2
  RealVector xi_tilde;         // U1 * xi
  /// q == p: nothing is shrunk, MSE_D == MSE_LS for every sigma2.
  bool always_dominated = false;
};

/// Throws RankDeficiency in the beta_p = 0 regime and DimensionError when
/// m - p < n.
ThresholdReport domination_threshold(const RealMatrix& v, const RealMatrix& ve,
                                     const RealVector& xi);
ThresholdReport domination_threshold(const ComplexMatrix& v,
                                     const ComplexMatrix& ve,
                                     const ComplexVector& xi);

/// How mse_d_closed treats tied pairs (alpha_j == beta_j).
///   shrink   the selection rule sets the entry to 0 (bias xi_tilde_j^2);
///            then MSE_D = bias2 + sigma2 * kept_variance_sum.
///   uniform  the solver picks 0 or d_tilde/alpha with probability 1/2 each,
///            as under TiePolicy::randomize; a tied pair contributes
///            (xi_tilde_j^2 + sigma2 * beta_j^2 / alpha_j^2) / 2. For the
///            identity design this gives (xi'xi + p sigma2) / 2.
enum class TieTreatment { shrink, uniform };

double mse_d_closed(const RealMatrix& v, const RealMatrix& ve,
                    const RealVector& xi, double sigma2,
                    TieTreatment ties = TieTreatment::shrink);
double mse_d_closed(const ComplexMatrix& v, const ComplexMatrix& ve,
                    const ComplexVector& xi, double sigma2,
                    TieTreatment ties = TieTreatment::shrink);

/// sigma2 * sum_j beta_j^2 / alpha_j^2: the least-squares MSE when the noise
/// is Ve * eta with white eta. Equals mse_ls for orthonormal Ve and for
/// design_noise_basis output.
double mse_ls_gsvd(const RealMatrix& v, const RealMatrix& ve, double sigma2);

struct ConvenienceReport {
  bool convenient = false;
  double margin = 0.0;         // sigma2 * variance_sum - tau_b
  double variance_sum = 0.0;
  int q = 0;
  int p = 0;
};

/// convenient when sigma2 * variance_sum >= tau_b, where tau_b >= ||xi||^2
/// bounds the squared bias. With q == p nothing is shrunk and the verdict is
/// convenient with zero margin.
ConvenienceReport convenience_check(const RealMatrix& v, const RealMatrix& ve,
                                    double tau_b, double sigma2);
ConvenienceReport convenience_check(const ComplexMatrix& v,
                                    const ComplexMatrix& ve, double tau_b,
                                    double sigma2);

/// The p entries of [xi_D; eta_hat] with the largest modulus, in decreasing
/// order; equal moduli keep the lower index first.
ComplexVector sorted_whole_vector_estimate(const DominatingEstimate& est,
                                           Eigen::Index p);

}  // namespace l1dom
