// l1dom: command line front end for the l1 dominating estimator.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "io.hpp"
#include "l1dom/decomp.hpp"
#include "l1dom/errors.hpp"
#include "l1dom/estimator.hpp"
#include "l1dom/realiso.hpp"
#include "l1dom/simlab.hpp"

namespace fs = std::filesystem;
using namespace l1dom;
using io::json;

namespace {

enum ExitCode { kOk = 0, kOther = 1, kParse = 2, kDimension = 3, kSolver = 4 };

struct Run {
  std::string command;
  std::vector<std::string> arguments;
  std::string config_path;
  fs::path out_dir;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
};

json versions() {
  return json{
      {"l1dom", L1DOM_VERSION},
      {"schema", io::kSchemaVersion},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                    "." + std::to_string(EIGEN_MINOR_VERSION)},
      {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                            std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                            std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
      {"cli11", CLI11_VERSION},
      {"compiler", __VERSION__},
  };
}

void write_manifest(const Run& run, const json& summary) {
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - run.start).count();
  io::write_json(run.out_dir / "manifest.json",
                 json{{"schema_version", io::kSchemaVersion},
                      {"command", run.command},
                      {"arguments", run.arguments},
                      {"config_path", run.config_path},
                      {"output_dir", fs::absolute(run.out_dir).string()},
                      {"versions", versions()},
                      {"duration_seconds", seconds},
                      {"summary", summary}});
}

void prepare_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw std::runtime_error("cannot create output directory " + dir.string());
}

ComplexVector to_complex(const RealVector& v) { return v.cast<Complex>(); }

// --- estimate -------------------------------------------------------------

struct EstimateArgs {
  std::string data, model, mode = "equality", out;
  double tau = 0.0;
  std::optional<std::uint64_t> seed;
};

int cmd_estimate(const EstimateArgs& a, Run& run) {
  run.config_path = a.model;
  const io::ModelFile mf = io::read_model(a.model);
  if (!mf.ve) throw io::ParseError(a.model + ": estimate needs a noise basis \"ve\"");
  const ComplexVector d = io::read_vector_file(a.data, "d");

  LinearModel model{mf.v, *mf.ve, mf.sigma2.value_or(1.0)};
  model.validate();
  if (d.size() != model.n()) {
    throw DimensionError("data has length " + std::to_string(d.size()) + " but the model has n = " +
                         std::to_string(model.n()));
  }
  EstimateOptions opt;
  opt.mode = a.mode == "residual" ? EstimationMode::residual : EstimationMode::equality;
  if (opt.mode == EstimationMode::residual) {
    double tau = a.tau;
    if (tau <= 0.0) {
      if (!mf.sigma2) throw io::ParseError("residual mode needs --tau or a model sigma2");
      tau = std::sqrt(*mf.sigma2) / 100.0;
    }
    opt.barrier.tau = tau;
  }
  if (a.seed) opt.tie = TiePolicy::randomize(*a.seed);

  const bool real = io::is_real(model.v) && io::is_real(model.ve) && (d.imag().array() == 0.0).all();
  ComplexVector xi_ls, xi_d, eta;
  double objective = 0.0;
  SolveStatus status = SolveStatus::optimal;
  if (real) {
    const RealMatrix v = model.v.real(), ve = model.ve.real();
    const RealVector dr = d.real();
    const RealEstimate e = dominating_estimate(v, ve, dr, opt);
    xi_ls = to_complex(least_squares(v, dr));
    xi_d = to_complex(e.xi_d);
    eta = to_complex(e.eta_hat);
    objective = e.objective;
    status = e.solver_status;
  } else {
    const DominatingEstimate e = dominating_estimate(model, d, opt);
    xi_ls = least_squares(model.v, d);
    xi_d = e.xi_d;
    eta = e.eta_hat;
    objective = e.objective;
    status = e.solver_status;
  }
  spdlog::info("estimate: n={} p={} m={} objective={} status={}", model.n(), model.p(), model.m(),
               objective, to_string(status));

  const json out{{"schema_version", io::kSchemaVersion},
                 {"mode", a.mode},
                 {"tau", opt.mode == EstimationMode::residual ? json(opt.barrier.tau) : json(nullptr)},
                 {"tie_policy", a.seed ? "randomize" : "first_basis"},
                 {"seed", a.seed ? json(*a.seed) : json(nullptr)},
                 {"real_arithmetic", real},
                 {"xi_ls", io::to_json(xi_ls)},
                 {"xi_d", io::to_json(xi_d)},
                 {"eta_hat", io::to_json(eta)},
                 {"objective", objective},
                 {"solver_status", std::string(to_string(status))}};
  io::write_json(run.out_dir / "estimate.json", out);
  write_manifest(run, json{{"objective", objective}, {"solver_status", std::string(to_string(status))}});
  if (status == SolveStatus::max_iter || status == SolveStatus::infeasible) {
    throw SolverError("solver stopped with status " + std::string(to_string(status)));
  }
  return kOk;
}

// --- simulate -------------------------------------------------------------

int cmd_simulate(const std::string& config, std::optional<int> threads, Run& run) {
  run.config_path = config;
  ExperimentConfig cfg = io::read_experiment_config(config);
  if (threads) cfg.threads = *threads;
  spdlog::info("simulate: n={} p={} m={} sigma2={} R={} threads={}", cfg.model.n, cfg.model.p(),
               cfg.resolved_m(), cfg.sigma2, cfg.replications, cfg.threads);
  const ExperimentResult res = run_experiment(cfg);
  const ExperimentSummary& s = res.summary;
  spdlog::info("simulate: mean E_D={} mean E_LS={} failures={}", s.e_d.mean, s.e_ls.mean, s.failures);

  io::write_atomic(run.out_dir / "records.csv", io::records_csv(res.records));
  io::write_json(run.out_dir / "summary.json", io::summary_json(cfg, s));
  char title[128];
  std::snprintf(title, sizeof title, "relative errors, sigma2 = %g, R = %d", cfg.sigma2,
                cfg.replications);
  io::write_atomic(run.out_dir / "histograms.svg", io::histogram_svg(s.hist_d, s.hist_ls, title));
  write_manifest(run, json{{"mean_e_d", s.e_d.mean},
                           {"mean_e_ls", s.e_ls.mean},
                           {"replications", cfg.replications},
                           {"failures", s.failures},
                           {"seed", cfg.seed},
                           {"threads", cfg.threads}});
  return kOk;
}

// --- threshold ------------------------------------------------------------

struct ThresholdArgs {
  std::string model, xi, out;
  std::optional<double> tau_b, sigma2;
};

int cmd_threshold(const ThresholdArgs& a, Run& run) {
  run.config_path = a.model;
  const io::ModelFile mf = io::read_model(a.model);
  if (!mf.ve) throw io::ParseError(a.model + ": threshold needs a noise basis \"ve\"");
  const bool real_model = io::is_real(mf.v) && io::is_real(*mf.ve);
  json out{{"schema_version", io::kSchemaVersion}};

  if (!a.xi.empty()) {
    const ComplexVector xi = io::read_vector_file(a.xi, "xi");
    const bool real = real_model && (xi.imag().array() == 0.0).all();
    out["real_arithmetic"] = real;
    const ThresholdReport r = real ? domination_threshold(RealMatrix(mf.v.real()),
                                                          RealMatrix(mf.ve->real()),
                                                          RealVector(xi.real()))
                                   : domination_threshold(mf.v, *mf.ve, xi);
    out["sigma2_threshold"] = r.sigma2_threshold;
    out["q"] = r.q;
    out["p"] = r.p;
    out["bias2"] = r.bias2;
    out["variance_sum"] = r.variance_sum;
    out["kept_variance_sum"] = r.kept_variance_sum;
    out["xi_tilde"] = io::to_json(r.xi_tilde);
    out["status"] = r.always_dominated ? "always dominated regime" : "threshold";
    if (a.sigma2) {
      const double mse_d = real ? mse_d_closed(RealMatrix(mf.v.real()), RealMatrix(mf.ve->real()),
                                               RealVector(xi.real()), *a.sigma2)
                                : mse_d_closed(mf.v, *mf.ve, xi, *a.sigma2);
      const double mse_ls = real ? mse_ls_gsvd(RealMatrix(mf.v.real()), RealMatrix(mf.ve->real()),
                                               *a.sigma2)
                                 : mse_ls_gsvd(matrix_to_real(mf.v), matrix_to_real(*mf.ve),
                                               *a.sigma2 / 2.0);
      out["sigma2"] = *a.sigma2;
      out["mse_d"] = mse_d;
      out["mse_ls"] = mse_ls;
      out["dominates"] = mse_d <= mse_ls;
    }
    spdlog::info("threshold: sigma2* = {} q = {} p = {}", r.sigma2_threshold, r.q, r.p);
  }
  if (a.tau_b) {
    if (!a.sigma2) throw io::ParseError("--tau-b needs --sigma2");
    const ConvenienceReport c =
        real_model ? convenience_check(RealMatrix(mf.v.real()), RealMatrix(mf.ve->real()), *a.tau_b,
                                       *a.sigma2)
                   : convenience_check(mf.v, *mf.ve, *a.tau_b, *a.sigma2);
    out["convenience"] = json{{"tau_b", *a.tau_b},
                              {"sigma2", *a.sigma2},
                              {"convenient", c.convenient},
                              {"margin", c.margin},
                              {"variance_sum", c.variance_sum},
                              {"q", c.q},
                              {"p", c.p},
                              {"status", c.q == c.p ? "always dominated regime"
                                         : c.convenient ? "convenient"
                                                        : "unknown"}};
    out["q"] = c.q;
    out["p"] = c.p;
    out["variance_sum"] = c.variance_sum;
  }
  io::write_json(run.out_dir / "threshold.json", out);
  write_manifest(run, out);
  return kOk;
}

// --- design-basis ---------------------------------------------------------

int cmd_design_basis(const std::string& model_path, const std::string& ratios_path, Run& run) {
  run.config_path = model_path;
  const io::ModelFile mf = io::read_model(model_path);
  const RealVector ratios = io::read_ratios_file(ratios_path);
  for (Eigen::Index k = 0; k < ratios.size(); ++k) {
    if (!(ratios(k) > 0.0) || !std::isfinite(ratios(k))) {
      throw DomainError("ratio " + std::to_string(k) +
                        " is not positive and finite; any positive ratios are feasible because "
                        "pairs are ordered by decreasing beta/alpha after construction");
    }
  }
  const bool real = io::is_real(mf.v);
  ComplexMatrix ve;
  GsvdFactors f;
  if (real) {
    const RealMatrix v = mf.v.real();
    const RealMatrix ver = design_noise_basis(v, ratios);
    ve = ver.cast<Complex>();
    f = gsvd(v, ver);
  } else {
    ve = design_noise_basis(mf.v, ratios);
    f = gsvd(matrix_to_real(mf.v), matrix_to_real(ve));
  }
  io::write_json(run.out_dir / "ve.json", json{{"schema_version", io::kSchemaVersion},
                                               {"v", io::to_json(mf.v)},
                                               {"ve", io::to_json(ve)},
                                               {"requested_ratios", io::to_json(ratios)}});
  const json verification{{"schema_version", io::kSchemaVersion},
                          {"real_arithmetic", real},
                          {"alphas", io::to_json(f.alphas)},
                          {"betas", io::to_json(f.betas)},
                          {"ratios", io::to_json(RealVector(f.ratios()))},
                          {"q", f.q},
                          {"p", f.p()}};
  io::write_json(run.out_dir / "verification.json", verification);
  spdlog::info("design-basis: q = {} of p = {}", f.q, f.p());
  write_manifest(run, json{{"q", f.q}, {"p", f.p()}});
  return kOk;
}

void init_logging() {
  auto logger = spdlog::stderr_logger_st("l1dom");
  logger->set_pattern("l1dom [%l] %v");
  spdlog::set_default_logger(logger);
  const char* env = std::getenv("L1DOM_LOG");
  spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
}

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

int fail(int code, const std::string& what) {
  std::cerr << "l1dom: error: " << one_line(what) << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  init_logging();
  CLI::App app{"l1 dominating estimator for linear models"};
  app.require_subcommand(1);
  Run run;
  for (int i = 1; i < argc; ++i) run.arguments.emplace_back(argv[i]);

  EstimateArgs est;
  std::uint64_t seed = 0;
  auto* estimate = app.add_subcommand("estimate", "estimate xi from data with the l1 and LS estimators");
  estimate->add_option("--data", est.data, "data file with \"d\"")->required();
  estimate->add_option("--model", est.model, "model file")->required();
  estimate->add_option("--mode", est.mode, "equality or residual")
      ->check(CLI::IsMember({"equality", "residual"}));
  estimate->add_option("--tau", est.tau, "residual bound (residual mode)");
  auto* seed_opt = estimate->add_option("--seed", seed, "randomize ties with this seed");
  estimate->add_option("--out", est.out, "output directory")->required();

  std::string sim_config, sim_out;
  int sim_threads = 0;
  auto* simulate = app.add_subcommand("simulate", "run a Monte Carlo experiment");
  simulate->add_option("--config", sim_config, "experiment config")->required();
  simulate->add_option("--out", sim_out, "output directory")->required();
  auto* threads_opt = simulate->add_option("--threads", sim_threads, "worker threads")
                          ->check(CLI::PositiveNumber);

  ThresholdArgs thr;
  double tau_b = 0.0, sigma2 = 0.0;
  auto* threshold = app.add_subcommand("threshold", "domination threshold and convenience check");
  threshold->add_option("--model", thr.model, "model file")->required();
  auto* xi_opt = threshold->add_option("--xi", thr.xi, "file with \"xi\"");
  auto* taub_opt = threshold->add_option("--tau-b", tau_b, "bound on ||xi||^2");
  auto* sigma_opt = threshold->add_option("--sigma2", sigma2, "noise variance");
  threshold->add_option("--out", thr.out, "output directory")->required();
  xi_opt->excludes(taub_opt);
  taub_opt->needs(sigma_opt);

  std::string db_model, db_ratios, db_out;
  auto* design = app.add_subcommand("design-basis", "noise basis with prescribed GSVD ratios");
  design->add_option("--model", db_model, "model file with \"v\"")->required();
  design->add_option("--ratios", db_ratios, "file with \"ratios\"")->required();
  design->add_option("--out", db_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kParse, e.what());
  }

  try {
    if (estimate->parsed()) {
      run.command = "estimate";
      if (seed_opt->count() > 0) est.seed = seed;
      run.out_dir = est.out;
      prepare_out_dir(run.out_dir);
      return cmd_estimate(est, run);
    }
    if (simulate->parsed()) {
      run.command = "simulate";
      run.out_dir = sim_out;
      prepare_out_dir(run.out_dir);
      return cmd_simulate(sim_config,
                          threads_opt->count() > 0 ? std::optional<int>(sim_threads) : std::nullopt,
                          run);
    }
    if (threshold->parsed()) {
      run.command = "threshold";
      if (xi_opt->count() == 0 && taub_opt->count() == 0) {
        return fail(kParse, "threshold needs --xi or --tau-b with --sigma2");
      }
      if (taub_opt->count() > 0) thr.tau_b = tau_b;
      if (sigma_opt->count() > 0) thr.sigma2 = sigma2;
      run.out_dir = thr.out;
      prepare_out_dir(run.out_dir);
      return cmd_threshold(thr, run);
    }
    if (design->parsed()) {
      run.command = "design-basis";
      run.out_dir = db_out;
      prepare_out_dir(run.out_dir);
      return cmd_design_basis(db_model, db_ratios, run);
    }
  } catch (const io::ParseError& e) {
    return fail(kParse, e.what());
  } catch (const DomainError& e) {
    return fail(kParse, e.what());
  } catch (const DimensionError& e) {
    return fail(kDimension, e.what());
  } catch (const RankDeficiency& e) {
    return fail(kDimension, e.what());
  } catch (const SolverError& e) {
    return fail(kSolver, e.what());
  } catch (const std::exception& e) {
    return fail(kOther, e.what());
  }
  return kOther;
}
