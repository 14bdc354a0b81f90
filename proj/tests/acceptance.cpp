// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "io.hpp"
#include "l1dom/decomp.hpp"
#include "l1dom/estimator.hpp"
#include "l1dom/l1solve.hpp"
#include "l1dom/simlab.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace l1dom;
using namespace l1dom::testing;

namespace {

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s  %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const fs::path kSource = L1DOM_SOURCE_DIR;
const fs::path kWork = fs::temp_directory_path() / "l1dom_acceptance";

int run_cli(const std::string& args) {
  const std::string cmd = std::string(L1DOM_BINARY) + " " + args;
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool simulate(const std::string& config, const fs::path& out) {
  fs::remove_all(out);
  return run_cli("simulate --config \"" + (kSource / "configs" / config).string() + "\" --out \"" +
                 out.string() + "\"") == 0;
}

// Experiment 1: mean relative errors at sigma2 = 100 and 200.
void experiment1() {
  struct Row {
    const char* config;
    double sigma2, e_ls, e_d;
  };
  const Row rows[] = {{"experiment1_sigma100.json", 100.0, 0.62, 0.55},
                      {"experiment1_sigma200.json", 200.0, 0.44, 0.41}};
  const double tol = 0.08;
  for (const Row& r : rows) {
    const fs::path out = kWork / r.config;
    const auto t0 = std::chrono::steady_clock::now();
    if (!simulate(r.config, out)) {
      report(false, std::string("Experiment 1 sigma2=") + fmt("%g", r.sigma2), "simulate failed");
      continue;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const io::json s = io::read_json(out / "summary.json");
    const double e_ls = s["e_ls"]["mean"].get<double>();
    const double e_d = s["e_d"]["mean"].get<double>();
    const bool ok_ls = std::abs(e_ls - r.e_ls) <= tol;
    const bool ok_d = std::abs(e_d - r.e_d) <= tol;
    const bool order = e_d < e_ls;
    std::ostringstream d;
    d << "mean E_LS=" << fmt("%.4f", e_ls) << " (target " << r.e_ls << "+-" << tol
      << (ok_ls ? " ok" : " miss") << "), mean E_D=" << fmt("%.4f", e_d) << " (target " << r.e_d
      << "+-" << tol << (ok_d ? " ok" : " miss") << "), E_D<E_LS " << (order ? "yes" : "no")
      << ", R=" << s["e_d"]["count"] << ", " << fmt("%.1f", secs) << " s";
    report(ok_ls && ok_d && order, std::string("Experiment 1 sigma2=") + fmt("%g", r.sigma2),
           d.str());
  }
}

// Identity design, tied pairs resolved uniformly at random.
void identity_design() {
  const auto t0 = std::chrono::steady_clock::now();
  const RealMatrix id = RealMatrix::Identity(3, 3);
  RealVector xi(3);
  xi << 1.0, 2.0, 2.0;
  MseStudyOptions opt;
  opt.replications = 20000;
  opt.seed = 2;
  opt.randomize_ties = true;
  const MseStudyResult r = run_mse_study(id, id, xi, 4.0, opt);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok_d = std::abs(r.mse_d - 10.5) <= 0.03 * 10.5;
  const bool ok_ls = std::abs(r.mse_ls - 12.0) <= 0.03 * 12.0;
  const double gap = (r.mse_ls - r.mse_d) / r.se_diff;
  const bool ok_gap = gap > 3.0;
  std::ostringstream d;
  d << "MSE_D=" << fmt("%.4f", r.mse_d) << " (10.5+-3%), MSE_LS=" << fmt("%.4f", r.mse_ls)
    << " (12+-3%), gap=" << fmt("%.1f", gap) << " SE (>3), " << fmt("%.1f", secs) << " s";
  report(ok_d && ok_ls && ok_gap && secs <= 120.0, "Identity design MSE", d.str());
}

// Threshold sharpness on a designed noise basis.
void threshold_sharpness() {
  std::mt19937_64 rng(3);
  const RealMatrix v = random_matrix(rng, 6, 3);
  RealVector ratios(3);
  ratios << 1.5, 0.6, 2.0;
  const RealMatrix ve = design_noise_basis(v, ratios);
  RealVector xi(3);
  xi << 1.0, -0.5, 0.8;
  const ThresholdReport t = domination_threshold(v, ve, xi);
  MseStudyOptions opt;
  opt.replications = 20000;
  opt.seed = 4;
  const MseStudyResult above = run_mse_study(v, ve, xi, 2.0 * t.sigma2_threshold, opt);
  const MseStudyResult below = run_mse_study(v, ve, xi, 0.5 * t.sigma2_threshold, opt);
  const double z_above = (above.mse_ls - above.mse_d) / above.se_diff;
  const double z_below = (below.mse_d - below.mse_ls) / below.se_diff;
  std::ostringstream d;
  d << "threshold=" << fmt("%.5f", t.sigma2_threshold) << "; at 2x: MSE_D=" << fmt("%.5f", above.mse_d)
    << " < MSE_LS=" << fmt("%.5f", above.mse_ls) << " by " << fmt("%.1f", z_above)
    << " SE; at 0.5x: MSE_D=" << fmt("%.5f", below.mse_d) << " > MSE_LS=" << fmt("%.5f", below.mse_ls)
    << " by " << fmt("%.1f", z_below) << " SE (>3 each)";
  report(z_above > 3.0 && z_below > 3.0, "Threshold sharpness", d.str());
}

// l1_fit against exhaustive enumeration of basic solutions.
void basic_solution_oracle() {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> p_dist(1, 4);
  int bad_obj = 0, bad_basic = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int p = p_dist(rng);
    const int rows = std::uniform_int_distribution<int>(p + 1, 18)(rng);
    const RealMatrix bm = random_matrix(rng, rows, p);
    const RealVector b = random_vector(rng, rows);
    const L1Solution s = l1_fit(b, bm);
    const L1Solution ref = brute_force_l1(b, bm);
    const double diff = std::abs(s.objective - ref.objective);
    worst = std::max(worst, diff);
    if (diff > 1e-8) ++bad_obj;
    bool basic = static_cast<int>(s.active_set.size()) == p;
    if (basic) {
      RealMatrix bs(p, p);
      RealVector rhs(p);
      for (int k = 0; k < p; ++k) {
        bs.row(k) = bm.row(s.active_set[k]);
        rhs(k) = b(s.active_set[k]);
      }
      Eigen::FullPivLU<RealMatrix> lu(bs);
      basic = lu.isInvertible() &&
              (s.x - RealVector(lu.solve(rhs))).norm() <= 1e-9 * (1.0 + s.x.norm());
    }
    if (!basic) ++bad_basic;
  }
  std::ostringstream d;
  d << "200 instances, rows<=18, p<=4: objective mismatches=" << bad_obj
    << " (max diff " << fmt("%.2e", worst) << ", tol 1e-8), non-basic solutions=" << bad_basic;
  report(bad_obj == 0 && bad_basic == 0, "l1_fit vs brute force", d.str());
}

// Solver against the componentwise closed form.
void closed_form() {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> n_dist(2, 8);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = n_dist(rng);
    const int p = std::uniform_int_distribution<int>(1, n)(rng);
    const int w = n + std::uniform_int_distribution<int>(0, 3)(rng);
    const DesignedPair dp = designed_pair(rng, n, p, w);
    const RealVector d = random_vector(rng, n);
    const RealEstimate e = dominating_estimate(dp.v, dp.ve, d);
    const RealVector cf = closed_form_estimate(dp.v, dp.ve, d);
    worst = std::max(worst, (e.xi_d - cf).cwiseAbs().maxCoeff());
  }
  report(worst <= 1e-6, "Closed-form/solver equivalence",
         "50 designed instances, max component difference " + fmt("%.2e", worst) + " (tol 1e-6)");
}

void gsvd_contract() {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> n_dist(1, 20);
  double worst_rec = 0.0, worst_norm = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = n_dist(rng);
    const int p = std::uniform_int_distribution<int>(1, n)(rng);
    const int w = n + std::uniform_int_distribution<int>(0, 5)(rng);
    const RealMatrix v = random_matrix(rng, n, p);
    const RealMatrix ve = random_matrix(rng, n, w);
    const GsvdFactors f = gsvd(v, ve);
    worst_rec = std::max({worst_rec, (f.x * f.a_matrix() * f.u1 - v).norm() / v.norm(),
                          (f.x * f.b_matrix() * f.u2 - ve).norm() / ve.norm()});
    worst_norm = std::max(
        worst_norm,
        (f.alphas.cwiseAbs2() + f.betas.cwiseAbs2() - RealVector::Ones(p)).cwiseAbs().maxCoeff());
  }
  report(worst_rec < 1e-8 && worst_norm <= 1e-10, "GSVD contract",
         "100 pairs n<=20: max relative reconstruction error " + fmt("%.2e", worst_rec) +
             " (<1e-8), max |alpha^2+beta^2-1| " + fmt("%.2e", worst_norm) + " (<=1e-10)");
}

// Second run of every shipped config; compared with the first.
void determinism() {
  const std::vector<std::string> configs = {"smoke.json", "small.json", "experiment1_sigma100.json",
                                            "experiment1_sigma200.json"};
  int differing = 0;
  for (const std::string& c : configs) {
    const fs::path first = kWork / c;
    if (!fs::exists(first / "records.csv") && !simulate(c, first)) {
      ++differing;
      continue;
    }
    const fs::path second = kWork / (c + ".again");
    if (!simulate(c, second) || slurp(first / "records.csv") != slurp(second / "records.csv")) {
      ++differing;
    }
  }
  report(differing == 0, "Determinism",
         std::to_string(configs.size()) + " shipped configs run twice, " +
             std::to_string(differing) + " with differing records.csv bytes");
}

}  // namespace

int main() {
  fs::create_directories(kWork);
  experiment1();
  identity_design();
  threshold_sharpness();
  basic_solution_oracle();
  closed_form();
  gsvd_contract();
  determinism();
  std::printf("%d criterion line(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
