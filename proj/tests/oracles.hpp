#pragma once

// Independent reference computations used only by the tests.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "l1dom/types.hpp"

namespace l1dom::testing {

inline RealMatrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> normal;
  RealMatrix m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = normal(rng);
  return m;
}

inline RealVector random_vector(std::mt19937_64& rng, Eigen::Index r) {
  return random_matrix(rng, r, 1);
}

inline ComplexMatrix random_complex(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  ComplexMatrix m(r, c);
  m.real() = random_matrix(rng, r, c);
  m.imag() = random_matrix(rng, r, c);
  return m;
}

inline RealMatrix random_orthogonal(std::mt19937_64& rng, Eigen::Index n) {
  Eigen::HouseholderQR<RealMatrix> qr(random_matrix(rng, n, n));
  return qr.householderQ() * RealMatrix::Identity(n, n);
}

// Cyclic Jacobi eigenvalues of a symmetric matrix, sorted decreasingly.
inline std::vector<double> jacobi_eigenvalues(RealMatrix a) {
  const Eigen::Index n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off < 1e-30) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
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
      }
    }
  }
  std::vector<double> ev(n);
  for (Eigen::Index i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

// min over a uniform grid of sum |b - B y| for a single parameter.
inline std::pair<double, double> grid_scan_l1(const RealVector& b, const RealVector& col,
                                              double lo, double hi, int steps) {
  double best_y = lo;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= steps; ++k) {
    const double y = lo + (hi - lo) * k / steps;
    const double f = (b - col * y).lpNorm<1>();
    if (f < best) {
      best = f;
      best_y = y;
    }
  }
  return {best_y, best};
}

// Optimum of the sign-constrained LP built from a partition: rows in `plus`
// must keep b - Bx >= 0, the others b - Bx <= 0, objective sum of |b - Bx|.
// Solved by enumerating vertices (p tight rows) and keeping feasible ones.
inline double sign_constrained_optimum(const RealVector& b, const RealMatrix& bm,
                                       const std::vector<bool>& plus) {
  const Eigen::Index rows = bm.rows();
  const Eigen::Index p = bm.cols();
  std::vector<Eigen::Index> idx(p);
  for (Eigen::Index k = 0; k < p; ++k) idx[k] = k;
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    RealMatrix bs(p, p);
    RealVector rhs(p);
    for (Eigen::Index k = 0; k < p; ++k) {
      bs.row(k) = bm.row(idx[k]);
      rhs(k) = b(idx[k]);
    }
    Eigen::FullPivLU<RealMatrix> lu(bs);
    if (lu.isInvertible()) {
      const RealVector x = lu.solve(rhs);
      const RealVector r = b - bm * x;
      bool feasible = true;
      double obj = 0.0;
      for (Eigen::Index i = 0; i < rows; ++i) {
        const double signed_r = plus[i] ? r(i) : -r(i);
        if (signed_r < -1e-9) feasible = false;
        obj += signed_r;
      }
      if (feasible) best = std::min(best, obj);
    }
    Eigen::Index k = p - 1;
    while (k >= 0 && idx[k] == rows - p + k) --k;
    if (k < 0) break;
    ++idx[k];
    for (Eigen::Index j = k + 1; j < p; ++j) idx[j] = idx[j - 1] + 1;
  }
  return best;
}

// V = X A P1, Ve = X B P2 with chosen alpha/beta, random invertible X and
// signed permutations P1, P2: the l1 problem is then separable in GSVD
// coordinates. Ratios are drawn away from 1 so every pair is strict.
struct DesignedPair {
  RealMatrix v;
  RealMatrix ve;
  RealVector alphas;
  RealVector betas;
};

inline RealMatrix signed_permutation(std::mt19937_64& rng, Eigen::Index n) {
  std::vector<Eigen::Index> perm(n);
  for (Eigen::Index i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::bernoulli_distribution coin(0.5);
  RealMatrix m = RealMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, perm[i]) = coin(rng) ? 1.0 : -1.0;
  return m;
}

inline DesignedPair designed_pair(std::mt19937_64& rng, Eigen::Index n, Eigen::Index p,
                                  Eigen::Index w) {
  std::uniform_real_distribution<double> ratio_dist(0.2, 3.0);
  std::vector<double> t(p);
  for (auto& v : t) {
    do {
      v = ratio_dist(rng);
    } while (std::abs(v - 1.0) < 0.1);
  }
  std::sort(t.begin(), t.end());
  DesignedPair out;
  out.alphas.resize(p);
  out.betas.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    out.alphas(j) = t[j] / std::hypot(1.0, t[j]);
    out.betas(j) = 1.0 / std::hypot(1.0, t[j]);
  }
  RealMatrix x = random_matrix(rng, n, n) + 3.0 * RealMatrix::Identity(n, n);
  RealMatrix a = RealMatrix::Zero(n, p);
  a.bottomRows(p) = out.alphas.asDiagonal();
  RealMatrix b = RealMatrix::Zero(n, w);
  b.topLeftCorner(n - p, n - p).setIdentity();
  b.block(n - p, n - p, p, p) = out.betas.asDiagonal();
  out.v = x * a * signed_permutation(rng, p);
  out.ve = x * b * signed_permutation(rng, w);
  return out;
}

}  // namespace l1dom::testing
