#include <string>

#include "l1dom/errors.hpp"
#include "l1dom/l1solve.hpp"

namespace l1dom {

MinNormSolution l1_min_equality(const RealMatrix& a, const RealVector& d,
                                TiePolicy policy) {
  if (a.rows() != d.size()) {
    throw DimensionError("l1_min_equality: A has " + std::to_string(a.rows()) +
                         " rows but d has length " + std::to_string(d.size()));
  }
  if (a.cols() < a.rows()) {
    throw DimensionError("l1_min_equality: expected an underdetermined system (m >= n)");
  }
  if (!a.allFinite() || !d.allFinite()) {
    throw DomainError("l1_min_equality: non-finite input");
  }

  // Keep a maximal set of independent rows; the rest must be implied.
  Eigen::ColPivHouseholderQR<RealMatrix> row_qr(a.transpose());
  row_qr.setThreshold(kRankTolerance);
  const Eigen::Index rank = row_qr.rank();
  if (rank == 0) throw RankDeficiency("l1_min_equality: A is zero");
  RealMatrix ar = a;
  RealVector dr = d;
  if (rank < a.rows()) {
    const RealVector probe = a.colPivHouseholderQr().solve(d);
    if ((a * probe - d).norm() > 1e-8 * (1.0 + d.norm())) {
      throw SolverError("l1_min_equality: inconsistent system");
    }
    const auto& perm = row_qr.colsPermutation().indices();
    ar.resize(rank, a.cols());
    dr.resize(rank);
    for (Eigen::Index k = 0; k < rank; ++k) {
      ar.row(k) = a.row(perm(k));
      dr(k) = d(perm(k));
    }
  }

  const Eigen::Index n = ar.rows();
  const Eigen::Index m = ar.cols();
  Eigen::ColPivHouseholderQR<RealMatrix> col_qr(ar);
  const auto& cperm = col_qr.colsPermutation().indices();
  RealMatrix as(n, n);
  RealMatrix arest(n, m - n);
  for (Eigen::Index k = 0; k < n; ++k) as.col(k) = ar.col(cperm(k));
  for (Eigen::Index k = n; k < m; ++k) arest.col(k - n) = ar.col(cperm(k));

  const Eigen::PartialPivLU<RealMatrix> lu(as);
  const RealVector base = lu.solve(dr);
  const RealMatrix coupling = lu.solve(arest);

  RealVector b(m);
  b.head(m - n).setZero();
  b.tail(n) = base;
  RealMatrix bm(m, m - n);
  bm.topRows(m - n) = -RealMatrix::Identity(m - n, m - n);
  bm.bottomRows(n) = coupling;

  const L1Solution fit = l1_fit(b, bm, policy);

  MinNormSolution out;
  out.x.resize(m);
  const RealVector basic_part = base - coupling * fit.x;
  for (Eigen::Index k = 0; k < n; ++k) out.x(cperm(k)) = basic_part(k);
  for (Eigen::Index k = n; k < m; ++k) out.x(cperm(k)) = fit.x(k - n);
  out.l1_norm = out.x.lpNorm<1>();
  out.status = fit.status;
  return out;
}

}  // namespace l1dom
