#include "l1dom/decomp.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "l1dom/errors.hpp"
#include "l1dom/realiso.hpp"

namespace l1dom {

namespace {

std::string shape(const RealMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

template <typename Matrix>
bool full_rank_impl(const Matrix& m) {
  if (m.size() == 0) return false;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  return s(s.size() - 1) > kRankTolerance * s(0);
}

template <typename Matrix>
double condition_impl(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / s(s.size() - 1);
}

template <typename Matrix>
std::pair<Matrix, RealVector> column_scale_impl(const Matrix& a) {
  RealVector scale(a.cols());
  Matrix scaled = a;
  for (Eigen::Index h = 0; h < a.cols(); ++h) {
    const double norm = a.col(h).norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw DomainError("column_scale: column " + std::to_string(h) +
                        " is zero or non-finite");
    }
    scale(h) = 1.0 / norm;
    scaled.col(h) *= scale(h);
  }
  return {std::move(scaled), std::move(scale)};
}

template <typename Matrix>
Matrix design_impl(const Matrix& v, const RealVector& ratios) {
  const Eigen::Index n = v.rows();
  const Eigen::Index p = v.cols();
  if (ratios.size() != p) {
    throw DimensionError("design_noise_basis: expected " + std::to_string(p) +
                         " ratios, got " + std::to_string(ratios.size()));
  }
  if (n < p) throw DimensionError("design_noise_basis: n < p");
  for (Eigen::Index h = 0; h < p; ++h) {
    if (!std::isfinite(ratios(h)) || ratios(h) <= 0.0) {
      throw DomainError(
          "design_noise_basis: ratios beta/alpha must be finite and positive "
          "(alpha_j and beta_j lie in (0, 1], so beta_j/alpha_j > 0); entry " +
          std::to_string(h) + " is " + std::to_string(ratios(h)));
    }
  }
  if (!full_rank_impl(v)) {
    throw RankDeficiency("design_noise_basis: rank deficiency in V");
  }
  Eigen::HouseholderQR<Matrix> qr(v);
  const Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  Matrix ve(n, n);
  for (Eigen::Index h = 0; h < p; ++h) ve.col(h) = ratios(h) * v.col(h);
  ve.rightCols(n - p) = q.rightCols(n - p);
  return ve;
}

}  // namespace

RealMatrix SvdFactors::d_matrix() const {
  const Eigen::Index n = u1.rows();
  const Eigen::Index p = singular_values.size();
  RealMatrix d = RealMatrix::Zero(n, p);
  d.topLeftCorner(p, p) = singular_values.asDiagonal();
  return d;
}

SvdFactors svd(const RealMatrix& v) {
  if (v.rows() < v.cols()) {
    throw DimensionError("svd: expected n >= p, got " + shape(v));
  }
  if (!v.allFinite()) throw DomainError("svd: non-finite entry");
  Eigen::JacobiSVD<RealMatrix> dec(v, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return SvdFactors{dec.matrixU(), dec.singularValues(),
                    dec.matrixV().transpose()};
}

double condition_number(const RealMatrix& v) { return condition_impl(v); }
double condition_number(const ComplexMatrix& v) { return condition_impl(v); }

bool has_full_rank(const RealMatrix& m) { return full_rank_impl(m); }

bool alpha_exceeds_beta(double alpha, double beta) {
  return alpha > beta * (1.0 + kGsvdTieTolerance);
}

RealMatrix GsvdFactors::a_matrix() const {
  const Eigen::Index nn = n();
  const Eigen::Index pp = p();
  RealMatrix a = RealMatrix::Zero(nn, pp);
  a.bottomRows(pp) = alphas.asDiagonal();
  return a;
}

RealMatrix GsvdFactors::b_matrix() const {
  const Eigen::Index nn = n();
  const Eigen::Index pp = p();
  RealMatrix b = RealMatrix::Zero(nn, w());
  b.topLeftCorner(nn - pp, nn - pp).setIdentity();
  b.block(nn - pp, nn - pp, pp, pp) = betas.asDiagonal();
  return b;
}

RealVector GsvdFactors::ratios() const { return betas.cwiseQuotient(alphas); }

GsvdFactors gsvd(const RealMatrix& v, const RealMatrix& ve) {
  const Eigen::Index n = v.rows();
  const Eigen::Index p = v.cols();
  const Eigen::Index w = ve.cols();
  if (ve.rows() != n) {
    throw DimensionError("gsvd: V is " + shape(v) + " but Ve is " + shape(ve));
  }
  if (n < p || p < 1) throw DimensionError("gsvd: need n >= p >= 1");
  if (w < n) {
    throw DimensionError("gsvd: noise basis needs at least n columns (m-p >= n)");
  }
  if (!v.allFinite() || !ve.allFinite()) {
    throw DomainError("gsvd: non-finite entry");
  }
  if (!full_rank_impl(v)) throw RankDeficiency("gsvd: rank deficiency in V");

  Eigen::JacobiSVD<RealMatrix> ve_svd(ve, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& sigma = ve_svd.singularValues();
  if (!(sigma(n - 1) > kRankTolerance * sigma(0))) {
    throw RankDeficiency(
        "gsvd: beta_p = 0 regime (Ve is not of full row rank)");
  }
  const RealMatrix& p_left = ve_svd.matrixU();
  const RealMatrix w_right = ve_svd.matrixV();

  // G = P * diag(sigma); M = G^{-1} V.
  const RealMatrix g = p_left * sigma.asDiagonal();
  const RealMatrix m = sigma.cwiseInverse().asDiagonal() * (p_left.transpose() * v);

  Eigen::JacobiSVD<RealMatrix> m_svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& t = m_svd.singularValues();  // decreasing
  const RealMatrix& y = m_svd.matrixU();
  const RealMatrix& z = m_svd.matrixV();

  GsvdFactors out;
  out.x.resize(n, n);
  out.alphas.resize(p);
  out.betas.resize(p);
  out.u1.resize(p, p);
  out.u2.resize(w, w);

  const RealMatrix gy = g * y;
  const RealMatrix wy = w_right.leftCols(n) * y;  // rows of U2 are columns here

  for (Eigen::Index i = 0; i < n - p; ++i) {
    out.x.col(i) = gy.col(p + i);
    out.u2.row(i) = wy.col(p + i).transpose();
  }
  for (Eigen::Index j = 0; j < p; ++j) {
    const Eigen::Index k = p - 1 - j;  // ascending generalized values
    const double scale = std::hypot(1.0, t(k));
    out.alphas(j) = t(k) / scale;
    out.betas(j) = 1.0 / scale;
    out.x.col(n - p + j) = gy.col(k) * scale;
    out.u1.row(j) = z.col(k).transpose();
    out.u2.row(n - p + j) = wy.col(k).transpose();
  }
  for (Eigen::Index i = n; i < w; ++i) {
    out.u2.row(i) = w_right.col(i).transpose();
  }
  out.q = 0;
  for (Eigen::Index j = 0; j < p; ++j) {
    if (alpha_exceeds_beta(out.alphas(j), out.betas(j))) ++out.q;
  }
  return out;
}

ComplexMatrix vandermonde(const ComplexVector& z, Eigen::Index n) {
  if (n < 1 || z.size() < 1) {
    throw DimensionError("vandermonde: need n >= 1 and at least one node");
  }
  ComplexMatrix v(n, z.size());
  for (Eigen::Index h = 0; h < z.size(); ++h) {
    Complex power(1.0, 0.0);
    for (Eigen::Index k = 0; k < n; ++k) {
      v(k, h) = power;
      power *= z(h);
    }
  }
  return v;
}

ComplexMatrix fourier_basis(Eigen::Index n, Eigen::Index w) {
  if (n < 1) throw DimensionError("fourier_basis: n < 1");
  if (w < n) {
    throw DimensionError(
        "fourier_basis: w = " + std::to_string(w) + " < n = " +
        std::to_string(n) +
        "; the dominating estimator needs m - p >= n noise columns");
  }
  ComplexMatrix f(n, w);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index h = 0; h < w; ++h) {
      // Reduce k*h mod w before scaling so large indices keep full accuracy.
      const double frac = static_cast<double>((k * h) % w) / static_cast<double>(w);
      f(k, h) = std::polar(1.0, 2.0 * std::numbers::pi * frac);
    }
  }
  return f;
}

std::pair<ComplexMatrix, RealVector> column_scale(const ComplexMatrix& a) {
  return column_scale_impl(a);
}

std::pair<RealMatrix, RealVector> column_scale(const RealMatrix& a) {
  return column_scale_impl(a);
}

RealMatrix design_noise_basis(const RealMatrix& v, const RealVector& target_ratios) {
  return design_impl(v, target_ratios);
}

ComplexMatrix design_noise_basis(const ComplexMatrix& v,
                                 const RealVector& target_ratios) {
  return design_impl(v, target_ratios);
}

}  // namespace l1dom
