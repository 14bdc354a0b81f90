// Log-barrier method for
//
//   min sum(u)  s.t.  x - u <= 0,  -x - u <= 0,  (||Ax - d||^2 - tau^2) / 2 <= 0
//
// Each stage minimizes t*sum(u) - sum log(u - x) - sum log(u + x) - log(f),
// f = (tau^2 - ||Ax - d||^2) / 2, by Newton's method with the u block
// eliminated, then multiplies t by barrier_mu. With 2m + 1 inequality
// constraints the duality gap after centering is (2m + 1) / t.

#include <algorithm>
#include <cmath>
#include <string>

#include "l1dom/errors.hpp"
#include "l1dom/l1solve.hpp"

namespace l1dom {

void BarrierSettings::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw DomainError("barrier: tau must be positive and finite");
  }
  if (!(barrier_mu > 1.0)) throw DomainError("barrier: barrier_mu must exceed 1");
  if (!(inner_tol > 0.0) || !(outer_tol > 0.0)) {
    throw DomainError("barrier: tolerances must be positive");
  }
  if (max_newton < 1 || max_outer < 1) {
    throw DomainError("barrier: iteration limits must be positive");
  }
}

namespace {

constexpr double kArmijo = 0.01;
constexpr double kBacktrack = 0.5;
constexpr int kMaxBacktracks = 60;

struct State {
  RealVector x;
  RealVector u;
  RealVector r;  // A x - d
};

double barrier_value(const State& s, double t, double tau) {
  const double f = 0.5 * (tau * tau - s.r.squaredNorm());
  if (!(f > 0.0)) return std::numeric_limits<double>::infinity();
  const RealVector a = s.u - s.x;
  const RealVector b = s.u + s.x;
  if ((a.array() <= 0.0).any() || (b.array() <= 0.0).any()) {
    return std::numeric_limits<double>::infinity();
  }
  return t * s.u.sum() - a.array().log().sum() - b.array().log().sum() -
         std::log(f);
}

}  // namespace

BarrierResult l1_min_residual(const RealMatrix& a, const RealVector& d,
                              const BarrierSettings& settings) {
  settings.validate();
  if (a.rows() != d.size()) {
    throw DimensionError("l1_min_residual: A has " + std::to_string(a.rows()) +
                         " rows but d has length " + std::to_string(d.size()));
  }
  if (!a.allFinite() || !d.allFinite()) {
    throw DomainError("l1_min_residual: non-finite input");
  }
  if (a.squaredNorm() == 0.0) throw DomainError("l1_min_residual: A is zero");

  const double tau = settings.tau;
  const Eigen::Index m = a.cols();
  BarrierResult out;

  if (d.norm() <= tau) {
    out.x = RealVector::Zero(m);
    out.residual_norm = d.norm();
    out.max_residual_ratio = out.residual_norm / tau;
    return out;
  }

  State s;
  s.x = a.completeOrthogonalDecomposition().solve(d);
  s.r = a * s.x - d;
  if (s.r.norm() >= tau) {
    throw SolverError("l1_min_residual: infeasible tau (" + std::to_string(tau) +
                      " below the distance " + std::to_string(s.r.norm()) +
                      " from d to range(A))");
  }
  const double xmax = s.x.cwiseAbs().maxCoeff();
  s.u = 0.95 * s.x.cwiseAbs() + RealVector::Constant(m, 0.10 * xmax);
  out.max_residual_ratio = s.r.norm() / tau;

  const RealMatrix ata = a.transpose() * a;
  const double constraints = 2.0 * static_cast<double>(m) + 1.0;
  double t = std::max(constraints / std::max(s.x.lpNorm<1>(), 1e-300), 1.0);
  const double gap_target = settings.outer_tol * static_cast<double>(m);

  Eigen::LLT<RealMatrix> llt;
  Eigen::LDLT<RealMatrix> ldlt;
  bool converged = false;
  for (int outer = 0; outer < settings.max_outer; ++outer) {
    ++out.outer_iterations;
    for (int k = 0; k < settings.max_newton; ++k) {
      const RealVector lo = s.u - s.x;
      const RealVector hi = s.u + s.x;
      const double f = 0.5 * (tau * tau - s.r.squaredNorm());
      const RealVector atr = a.transpose() * s.r;
      const RealVector inv_lo = lo.cwiseInverse();
      const RealVector inv_hi = hi.cwiseInverse();

      const RealVector gx = inv_lo - inv_hi + atr / f;
      const RealVector gu = RealVector::Constant(m, t) - inv_lo - inv_hi;
      const RealVector s11 = inv_lo.cwiseAbs2() + inv_hi.cwiseAbs2();
      const RealVector s12 = inv_hi.cwiseAbs2() - inv_lo.cwiseAbs2();
      const RealVector ratio = s12.cwiseQuotient(s11);

      RealMatrix h = ata / f + (atr * atr.transpose()) / (f * f);
      h.diagonal() += s11 - s12.cwiseProduct(ratio);
      const RealVector rhs = -gx + ratio.cwiseProduct(gu);

      RealVector dx;
      llt.compute(h);
      if (llt.info() == Eigen::Success) {
        dx = llt.solve(rhs);
      } else {
        ldlt.compute(h);
        dx = ldlt.solve(rhs);
      }
      const RealVector du = (-gu - s12.cwiseProduct(dx)).cwiseQuotient(s11);
      const double slope = gx.dot(dx) + gu.dot(du);
      ++out.newton_steps;
      if (!(slope < 0.0) || -slope / 2.0 < settings.inner_tol) break;

      // Largest step keeping every constraint strictly satisfied.
      double smax = 1.0;
      const RealVector dlo = du - dx;
      const RealVector dhi = du + dx;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (dlo(i) < 0.0) smax = std::min(smax, -lo(i) / dlo(i));
        if (dhi(i) < 0.0) smax = std::min(smax, -hi(i) / dhi(i));
      }
      const RealVector adx = a * dx;
      const double qa = adx.squaredNorm();
      if (qa > 0.0) {
        const double qb = 2.0 * s.r.dot(adx);
        const double qc = s.r.squaredNorm() - tau * tau;
        const double root = (-qb + std::sqrt(qb * qb - 4.0 * qa * qc)) / (2.0 * qa);
        smax = std::min(smax, root);
      }
      double step = 0.99 * smax;

      const double phi = barrier_value(s, t, tau);
      State trial;
      int backtracks = 0;
      while (true) {
        trial.x = s.x + step * dx;
        trial.u = s.u + step * du;
        trial.r = s.r + step * adx;
        if (barrier_value(trial, t, tau) <= phi + kArmijo * step * slope) break;
        step *= kBacktrack;
        if (++backtracks > kMaxBacktracks) break;
      }
      if (backtracks > kMaxBacktracks) break;
      s = std::move(trial);
      // Refresh the residual to avoid drift from the incremental update.
      s.r = a * s.x - d;
      out.max_residual_ratio = std::max(out.max_residual_ratio, s.r.norm() / tau);
    }
    if (constraints / t <= gap_target) {
      converged = true;
      break;
    }
    t *= settings.barrier_mu;
  }

  out.x = s.x;
  out.l1_norm = s.x.lpNorm<1>();
  out.residual_norm = s.r.norm();
  out.duality_gap = constraints / t;
  out.status = converged ? SolveStatus::optimal : SolveStatus::max_iter;
  return out;
}

}  // namespace l1dom
