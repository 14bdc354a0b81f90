#pragma once

// l1 solvers:
//   l1_fit           min_x sum_i |b - Bx|_i, exact, by dense simplex; the
//                    result is always a basic solution x = B_S^{-1} b_S.
//   l1_min_equality  min ||x||_1 subject to Ax = d, reduced to l1_fit.
//   l1_min_residual  min ||x||_1 subject to ||d - Ax||_2 <= tau, log-barrier.
//   brute_force_l1   enumeration oracle for l1_fit on small problems.

#include <cstdint>
#include <string_view>
#include <vector>

#include "l1dom/types.hpp"

namespace l1dom {

enum class SolveStatus { optimal, degenerate_tie, infeasible, max_iter };

std::string_view to_string(SolveStatus status);

/// How l1_fit picks among several optimal basic solutions.
///
/// first_basis is deterministic (Bland's rule path, first vertex reached).
/// randomize explores the optimal face by zero-reduced-cost pivots and picks
/// one of the distinct optimal active sets uniformly at random. The search is
/// exhaustive whenever the optimal face has at most kMaxFaceBases bases
/// (the identity-design case always qualifies); beyond that the choice is
/// uniform over the bases visited so far only.
struct TiePolicy {
  enum class Kind { first_basis, randomize };
  Kind kind = Kind::first_basis;
  std::uint64_t seed = 0;

  static TiePolicy first_basis() { return {}; }
  static TiePolicy randomize(std::uint64_t seed) {
    return {Kind::randomize, seed};
  }
};

inline constexpr std::size_t kMaxFaceBases = 4096;

struct L1Solution {
  RealVector x;
  double objective = 0.0;
  /// Rows of B where the residual is pinned to zero by the basis, sorted.
  std::vector<Eigen::Index> active_set;
  SolveStatus status = SolveStatus::optimal;
  /// Distinct optimal active sets found (1 unless the optimum is tied).
  std::size_t optimal_active_sets = 1;
  int pivots = 0;
};

/// Throws RankDeficiency if rank(B) < B.cols(), DimensionError on size
/// mismatch. Returns status max_iter if the pivot budget runs out.
L1Solution l1_fit(const RealVector& b, const RealMatrix& B,
                  TiePolicy policy = TiePolicy::first_basis());

/// Largest number of subsets brute_force_l1 will enumerate.
inline constexpr double kBruteForceLimit = 1e6;

/// Exhaustive search over p-row subsets with nonsingular B_S. Subsets with
/// |det B_S| < 1e-12 * ||B_S||_F^p are skipped. Throws DomainError if more
/// than kBruteForceLimit subsets would be needed.
L1Solution brute_force_l1(const RealVector& b, const RealMatrix& B);

struct MinNormSolution {
  RealVector x;
  double l1_norm = 0.0;
  SolveStatus status = SolveStatus::optimal;
};

/// min ||x||_1 s.t. Ax = d. Eliminates n basic columns of A (column-pivoted
/// QR), so that with A = [A_R | A_S]:
///   b = [0; A_S^{-1} d],  B = [-I; A_S^{-1} A_R],  x_R = argmin |b - By|_1.
/// Row-rank deficient A is accepted when d is consistent; otherwise throws
/// SolverError("inconsistent system").
MinNormSolution l1_min_equality(const RealMatrix& a, const RealVector& d,
                                TiePolicy policy = TiePolicy::first_basis());

struct BarrierSettings {
  double tau = 1.0;
  double barrier_mu = 10.0;
  double inner_tol = 1e-8;   // Newton decrement^2 / 2
  double outer_tol = 1e-6;   // duality gap target, per variable
  int max_newton = 50;       // per barrier stage
  int max_outer = 60;

  /// Throws DomainError unless tau > 0, barrier_mu > 1 and tolerances > 0.
  void validate() const;
};

struct BarrierResult {
  RealVector x;
  double l1_norm = 0.0;
  double residual_norm = 0.0;
  /// Bound (2m + 1) / t on ||x||_1 - optimum at exit.
  double duality_gap = 0.0;
  SolveStatus status = SolveStatus::optimal;
  int outer_iterations = 0;
  int newton_steps = 0;
  /// max ||d - A x_k||_2 / tau over every accepted iterate; < 1 on success.
  double max_residual_ratio = 0.0;
};

/// min ||x||_1 s.t. ||d - Ax||_2 <= tau by the log-barrier method on
/// (x, u) with -u <= x <= u. Starts from the minimum-norm solution of Ax = d;
/// throws SolverError if that point is not strictly feasible.
BarrierResult l1_min_residual(const RealMatrix& a, const RealVector& d,
                              const BarrierSettings& settings);

}  // namespace l1dom
