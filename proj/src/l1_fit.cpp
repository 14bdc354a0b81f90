// Dense simplex for the least absolute deviations problem
//
//   min sum_i |b - Bx|_i   <=>   min 1'u + 1'v  s.t.  Bx + u - v = b,  u, v >= 0
//
// with x free. Free columns are pivoted into the basis first and never leave,
// so every final basis has the form {x_1..x_p} + one slack per non-active
// row, and the p rows whose slacks are both nonbasic carry a zero residual.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <deque>

#include "l1dom/decomp.hpp"
#include "l1dom/errors.hpp"
#include "l1dom/l1solve.hpp"

namespace l1dom {

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::degenerate_tie: return "degenerate_tie";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::max_iter: return "max_iter";
  }
  return "unknown";
}

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-10;
constexpr double kRatioTieTol = 1e-12;

class Tableau {
 public:
  Tableau(const RealVector& b, const RealMatrix& bm)
      : rows_(bm.rows()), p_(bm.cols()), cols_(p_ + 2 * rows_) {
    body_ = RealMatrix::Zero(rows_, cols_);
    rhs_ = b;
    basis_.resize(rows_);
    body_.leftCols(p_) = bm;
    for (Eigen::Index i = 0; i < rows_; ++i) {
      body_(i, p_ + i) = 1.0;
      body_(i, p_ + rows_ + i) = -1.0;
      if (b(i) >= 0.0) {
        basis_[i] = p_ + i;
      } else {
        body_.row(i) *= -1.0;
        rhs_(i) = -rhs_(i);
        basis_[i] = p_ + rows_ + i;
      }
    }
    // Reduced costs: c_j - sum_i c_B(i) * T(i, j); every basic cost is 1.
    cost_ = RealVector::Zero(cols_);
    cost_.tail(2 * rows_).setOnes();
    reduced_ = cost_.transpose() - body_.colwise().sum();
  }

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  Eigen::Index params() const { return p_; }
  bool is_free(Eigen::Index var) const { return var < p_; }
  double reduced(Eigen::Index j) const { return reduced_(j); }
  double at(Eigen::Index i, Eigen::Index j) const { return body_(i, j); }
  double rhs(Eigen::Index i) const { return rhs_(i); }
  Eigen::Index basic(Eigen::Index i) const { return basis_[i]; }

  bool is_basic(Eigen::Index var) const {
    return std::find(basis_.begin(), basis_.end(), var) != basis_.end();
  }

  // Rows attaining the minimum ratio when `var` increases along `dir`.
  std::vector<Eigen::Index> ratio_rows(Eigen::Index var, double dir) const {
    std::vector<Eigen::Index> best;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (is_free(basis_[i])) continue;
      const double a = dir * body_(i, var);
      if (a <= kPivotTol) continue;
      const double ratio = std::max(rhs_(i), 0.0) / a;
      if (ratio < best_ratio - kRatioTieTol) {
        best_ratio = ratio;
        best.assign(1, i);
      } else if (ratio <= best_ratio + kRatioTieTol) {
        best.push_back(i);
      }
    }
    return best;
  }

  // Bland: among tied rows leave the smallest variable index.
  Eigen::Index bland_row(const std::vector<Eigen::Index>& rows) const {
    return *std::min_element(rows.begin(), rows.end(),
                             [&](Eigen::Index a, Eigen::Index b) {
                               return basis_[a] < basis_[b];
                             });
  }

  double step_length(Eigen::Index row, Eigen::Index var) const {
    return std::abs(rhs_(row) / body_(row, var));
  }

  void pivot(Eigen::Index row, Eigen::Index var) {
    const double piv = body_(row, var);
    body_.row(row) /= piv;
    rhs_(row) /= piv;
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (i == row) continue;
      const double f = body_(i, var);
      if (f == 0.0) continue;
      body_.row(i) -= f * body_.row(row);
      rhs_(i) -= f * rhs_(row);
    }
    const double f = reduced_(var);
    if (f != 0.0) reduced_ -= f * body_.row(row).transpose();
    basis_[row] = var;
  }

  // Rows whose two slacks are both nonbasic.
  std::vector<Eigen::Index> active_rows() const {
    std::vector<bool> has_slack(rows_, false);
    for (Eigen::Index var : basis_) {
      if (var >= p_) has_slack[(var - p_) % rows_] = true;
    }
    std::vector<Eigen::Index> out;
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (!has_slack[i]) out.push_back(i);
    }
    return out;
  }

  std::vector<Eigen::Index> sorted_basis() const {
    std::vector<Eigen::Index> s = basis_;
    std::sort(s.begin(), s.end());
    return s;
  }

 private:
  Eigen::Index rows_;
  Eigen::Index p_;
  Eigen::Index cols_;
  RealMatrix body_;
  RealVector rhs_;
  RealVector cost_;
  RealVector reduced_;
  std::vector<Eigen::Index> basis_;
};

// Brings every free column into the basis. Returns false on failure.
bool enter_free_columns(Tableau& t, int& pivots) {
  for (Eigen::Index j = 0; j < t.params(); ++j) {
    if (t.is_basic(j)) continue;
    const double rc = t.reduced(j);
    double dir = rc > 0.0 ? -1.0 : 1.0;
    auto rows = t.ratio_rows(j, dir);
    if (rows.empty() && std::abs(rc) <= kCostTol) {
      dir = -dir;
      rows = t.ratio_rows(j, dir);
    }
    if (rows.empty()) return false;
    t.pivot(t.bland_row(rows), j);
    ++pivots;
  }
  return true;
}

// Bland's rule on the slack columns. Returns false if the budget runs out.
bool optimize(Tableau& t, int& pivots, int budget) {
  while (pivots < budget) {
    Eigen::Index entering = -1;
    for (Eigen::Index j = t.params(); j < t.cols(); ++j) {
      if (t.reduced(j) < -kCostTol && !t.is_basic(j)) {
        entering = j;
        break;
      }
    }
    if (entering < 0) return true;
    const auto rows = t.ratio_rows(entering, 1.0);
    if (rows.empty()) {
      throw SolverError("l1_fit: unbounded direction (numerical breakdown)");
    }
    t.pivot(t.bland_row(rows), entering);
    ++pivots;
  }
  return false;
}

struct FaceSearch {
  std::vector<std::vector<Eigen::Index>> active_sets;
  bool exhausted = true;
};

// Walks the optimal face through zero-reduced-cost pivots. Such pivots leave
// every other reduced cost unchanged, so all visited bases stay optimal.
// With stop_at_second set, returns as soon as a second active set appears.
FaceSearch explore_optimal_face(const Tableau& start, bool stop_at_second) {
  FaceSearch out;
  std::set<std::vector<Eigen::Index>> seen_bases;
  std::set<std::vector<Eigen::Index>> seen_active;
  std::deque<Tableau> queue;
  queue.push_back(start);
  seen_bases.insert(start.sorted_basis());
  while (!queue.empty()) {
    Tableau t = std::move(queue.front());
    queue.pop_front();
    auto active = t.active_rows();
    if (seen_active.insert(active).second) {
      out.active_sets.push_back(std::move(active));
      if (stop_at_second && out.active_sets.size() > 1) {
        out.exhausted = false;
        return out;
      }
    }
    for (Eigen::Index j = t.params(); j < t.cols(); ++j) {
      if (t.is_basic(j) || std::abs(t.reduced(j)) > kCostTol) continue;
      for (Eigen::Index row : t.ratio_rows(j, 1.0)) {
        Tableau next = t;
        next.pivot(row, j);
        if (!seen_bases.insert(next.sorted_basis()).second) continue;
        if (seen_bases.size() > kMaxFaceBases) {
          out.exhausted = false;
          return out;
        }
        queue.push_back(std::move(next));
      }
    }
  }
  return out;
}

L1Solution solution_from_active(const RealVector& b, const RealMatrix& bm,
                                std::vector<Eigen::Index> active) {
  const Eigen::Index p = bm.cols();
  RealMatrix bs(p, p);
  RealVector rhs(p);
  for (Eigen::Index k = 0; k < p; ++k) {
    bs.row(k) = bm.row(active[k]);
    rhs(k) = b(active[k]);
  }
  L1Solution sol;
  sol.x = p > 0 ? RealVector(bs.partialPivLu().solve(rhs)) : RealVector();
  sol.objective = p > 0 ? (b - bm * sol.x).lpNorm<1>() : b.lpNorm<1>();
  sol.active_set = std::move(active);
  return sol;
}

void check_shapes(const RealVector& b, const RealMatrix& bm, const char* who) {
  if (b.size() != bm.rows()) {
    throw DimensionError(std::string(who) + ": b has length " +
                         std::to_string(b.size()) + " but B has " +
                         std::to_string(bm.rows()) + " rows");
  }
  if (bm.cols() > bm.rows()) {
    throw DimensionError(std::string(who) + ": B must have at least as many rows as columns");
  }
  if (!b.allFinite() || !bm.allFinite()) {
    throw DomainError(std::string(who) + ": non-finite input");
  }
}

}  // namespace

L1Solution l1_fit(const RealVector& b, const RealMatrix& B, TiePolicy policy) {
  check_shapes(b, B, "l1_fit");
  const Eigen::Index p = B.cols();
  if (p == 0) return solution_from_active(b, B, {});
  if (!has_full_rank(B)) throw RankDeficiency("l1_fit: rank deficiency in B");

  Tableau t(b, B);
  int pivots = 0;
  const int budget = static_cast<int>(50 * (B.rows() + p) + 1000);
  if (!enter_free_columns(t, pivots)) {
    throw RankDeficiency("l1_fit: could not pivot all parameters into the basis");
  }
  const bool converged = optimize(t, pivots, budget);

  L1Solution sol;
  if (!converged) {
    sol = solution_from_active(b, B, t.active_rows());
    sol.status = SolveStatus::max_iter;
    sol.pivots = pivots;
    return sol;
  }

  const bool randomize = policy.kind == TiePolicy::Kind::randomize;
  const FaceSearch face = explore_optimal_face(t, !randomize);
  std::size_t pick = 0;
  if (randomize && face.active_sets.size() > 1) {
    std::mt19937_64 rng(policy.seed);
    std::uniform_int_distribution<std::size_t> dist(0, face.active_sets.size() - 1);
    pick = dist(rng);
  }
  sol = solution_from_active(b, B, face.active_sets[pick]);
  sol.optimal_active_sets = face.active_sets.size();
  sol.status = face.active_sets.size() > 1 ? SolveStatus::degenerate_tie
                                           : SolveStatus::optimal;
  sol.pivots = pivots;
  return sol;
}

L1Solution brute_force_l1(const RealVector& b, const RealMatrix& B) {
  check_shapes(b, B, "brute_force_l1");
  const Eigen::Index rows = B.rows();
  const Eigen::Index p = B.cols();
  if (p == 0) return solution_from_active(b, B, {});

  double subsets = 1.0;
  for (Eigen::Index k = 0; k < p; ++k) {
    subsets = subsets * static_cast<double>(rows - k) / static_cast<double>(k + 1);
  }
  if (subsets > kBruteForceLimit) {
    throw DomainError("brute_force_l1: " + std::to_string(subsets) +
                      " subsets exceed the enumeration limit");
  }

  std::vector<Eigen::Index> idx(p);
  for (Eigen::Index k = 0; k < p; ++k) idx[k] = k;
  L1Solution best;
  best.objective = std::numeric_limits<double>::infinity();
  bool found = false;
  RealMatrix bs(p, p);
  while (true) {
    for (Eigen::Index k = 0; k < p; ++k) bs.row(k) = B.row(idx[k]);
    Eigen::PartialPivLU<RealMatrix> lu(bs);
    const double det = std::abs(lu.determinant());
    if (det >= 1e-12 * std::pow(bs.norm(), static_cast<double>(p))) {
      L1Solution cand = solution_from_active(b, B, idx);
      if (cand.objective < best.objective - 1e-12) {
        best = std::move(cand);
        found = true;
      }
    }
    // Next combination in lexicographic order.
    Eigen::Index k = p - 1;
    while (k >= 0 && idx[k] == rows - p + k) --k;
    if (k < 0) break;
    ++idx[k];
    for (Eigen::Index j = k + 1; j < p; ++j) idx[j] = idx[j - 1] + 1;
  }
  if (!found) throw RankDeficiency("brute_force_l1: no nonsingular subset");
  return best;
}

}  // namespace l1dom
