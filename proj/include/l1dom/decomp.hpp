#pragma once

// Factorizations and structured design matrices.

#include <utility>

#include "l1dom/types.hpp"

namespace l1dom {

/// V = u1 * D * u2 with D the n x p matrix [diag(singular_values); 0].
/// Note u2 holds the right singular vectors as rows (u2 = W').
struct SvdFactors {
  RealMatrix u1;                // n x n, orthogonal
  RealVector singular_values;   // c_1 >= ... >= c_p >= 0
  RealMatrix u2;                // p x p, orthogonal

  RealMatrix d_matrix() const;
};

SvdFactors svd(const RealMatrix& v);

/// Ratio of extreme singular values; infinity when the smallest is zero.
double condition_number(const RealMatrix& v);
double condition_number(const ComplexMatrix& v);

/// True when the smallest singular value exceeds kRankTolerance times the
/// largest (full column rank for tall input, full row rank for wide input).
bool has_full_rank(const RealMatrix& m);

// Generalized SVD of a pair (V, Ve), V n x p of rank p, Ve n x w with
// w >= n and full row rank:
//
//   V  = X * A * U1        A = [0_{(n-p) x p}; diag(alpha)]
//   Ve = X * B * U2        B = [I_{n-p} 0 0; 0 diag(beta) 0]
//
// with A'A + B'B = I on the paired rows, alpha nondecreasing and beta
// nonincreasing. The unpaired block sits on top, as in the GSVD display;
// the orthonormal-basis SVD form puts the zero block of D at the bottom and
// orders c_j decreasingly, so index j here corresponds to index p+1-j there.
//
// Construction: Ve = P S W' (thin), G = P S, and the SVD of G^{-1} V = Y T Z'
// gives the generalized singular values t_k = alpha_k / beta_k. Columns of X
// are G*Y rescaled by sqrt(1 + t_k^2) on the paired directions.
struct GsvdFactors {
  RealMatrix x;        // n x n, invertible
  RealVector alphas;   // p, nondecreasing, in [0, 1]
  RealVector betas;    // p, nonincreasing, in [0, 1]
  RealMatrix u1;       // p x p, orthogonal (parameter side)
  RealMatrix u2;       // w x w, orthogonal (noise side)
  int q = 0;           // number of j with alpha_j > beta_j

  Eigen::Index n() const { return x.rows(); }
  Eigen::Index p() const { return alphas.size(); }
  Eigen::Index w() const { return u2.rows(); }

  RealMatrix a_matrix() const;   // n x p
  RealMatrix b_matrix() const;   // n x w
  /// beta_j / alpha_j, nonincreasing in j.
  RealVector ratios() const;
};

/// Relative tolerance below which alpha_j and beta_j count as equal. Equal
/// pairs are a tie of the l1 problem and are not counted in q.
inline constexpr double kGsvdTieTolerance = 1e-9;

/// True when alpha clearly exceeds beta (see kGsvdTieTolerance).
bool alpha_exceeds_beta(double alpha, double beta);

/// Throws DimensionError if w < n or n < p, RankDeficiency("rank
/// deficiency") if V has deficient column rank and RankDeficiency("beta_p = 0
/// regime ...") if Ve lacks full row rank.
GsvdFactors gsvd(const RealMatrix& v, const RealMatrix& ve);

/// V(k, h) = z_h^k for k = 0..n-1.
ComplexMatrix vandermonde(const ComplexVector& z, Eigen::Index n);

/// Ve(k, h) = exp(2 pi i k h / w), k < n, h < w. Requires w >= n.
ComplexMatrix fourier_basis(Eigen::Index n, Eigen::Index w);

/// Scales every column to unit l2 norm; returns (A * D, diag(D)).
std::pair<ComplexMatrix, RealVector> column_scale(const ComplexMatrix& a);
std::pair<RealMatrix, RealVector> column_scale(const RealMatrix& a);

/// Square noise basis whose GSVD with V has beta/alpha equal to
/// target_ratios(h) on the direction of column h of V:
///
///   Ve = [r_1 v_1, ..., r_p v_p, N]
///
/// with N an orthonormal basis of range(V)^perp. Then Ve^{-1} V = [diag(1/r); 0]
/// and the parameter-side factor of the GSVD is a permutation, so the l1
/// problem decouples exactly as in the closed-form analysis.
RealMatrix design_noise_basis(const RealMatrix& v,
                              const RealVector& target_ratios);
ComplexMatrix design_noise_basis(const ComplexMatrix& v,
                                 const RealVector& target_ratios);

}  // namespace l1dom
