#include "io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unistd.h>

#include "l1dom/decomp.hpp"
#include "l1dom/errors.hpp"

namespace l1dom::io {

namespace fs = std::filesystem;

namespace {

void check_schema(const json& j, const fs::path& path) {
  if (!j.is_object()) throw ParseError(path.string() + ": top level must be an object");
  if (j.contains("schema_version")) {
    if (!j["schema_version"].is_number_integer() || j["schema_version"].get<int>() > kSchemaVersion) {
      throw ParseError(path.string() + ": unsupported schema_version");
    }
  }
}

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ParseError(where + ": missing field \"" + key + "\"");
  return j.at(key);
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw ParseError(what + ": expected a number");
  return j.get<double>();
}

// A node is [re, im], a number, or {"damping": a, "frequency": f} meaning
// exp(-a + 2 pi i f).
Complex parse_node(const json& j) {
  if (j.is_object()) {
    const double a = number(require(j, "damping", "node"), "damping");
    const double f = number(require(j, "frequency", "node"), "frequency");
    return std::exp(Complex(-a, 2.0 * std::numbers::pi * f));
  }
  return parse_complex(j);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else if (c == '\n') out += ' ';
    else out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

Complex parse_complex(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw ParseError("expected a number or an [re, im] pair, got " + j.dump());
}

ComplexVector parse_vector(const json& j) {
  if (!j.is_array()) throw ParseError("expected an array");
  ComplexVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = parse_complex(j[i]);
  return v;
}

RealVector parse_real_vector(const json& j) {
  if (!j.is_array()) throw ParseError("expected an array");
  RealVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = number(j[i], "vector entry");
  }
  return v;
}

ComplexMatrix parse_matrix(const json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("expected a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  ComplexMatrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw ParseError("matrix row " + std::to_string(r) + " has the wrong length");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = parse_complex(j[r][c]);
    }
  }
  return m;
}

json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

json to_json(const ComplexVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

json to_json(const RealVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json to_json(const ComplexMatrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    out.push_back(std::move(row));
  }
  return out;
}

bool is_real(const ComplexMatrix& m) { return (m.imag().array() == 0.0).all(); }

ModelFile read_model(const fs::path& path) {
  const json j = read_json(path);
  check_schema(j, path);
  const std::string where = path.string();
  ModelFile out;
  try {
    if (j.contains("sigma2")) out.sigma2 = number(j["sigma2"], where + ": sigma2");
    if (j.contains("v")) {
      out.v = parse_matrix(j["v"]);
      if (j.contains("ve")) out.ve = parse_matrix(j["ve"]);
      if (out.ve && out.ve->rows() != out.v.rows()) {
        throw DimensionError(where + ": v has " + std::to_string(out.v.rows()) +
                             " rows but ve has " + std::to_string(out.ve->rows()));
      }
      return out;
    }
    if (!j.contains("nodes")) throw ParseError(where + ": need either \"v\" or \"nodes\"");
    ExponentialModel em;
    const json& nodes = j["nodes"];
    if (!nodes.is_array()) throw ParseError(where + ": nodes must be an array");
    em.nodes.resize(static_cast<Eigen::Index>(nodes.size()));
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      em.nodes(static_cast<Eigen::Index>(k)) = parse_node(nodes[k]);
    }
    em.amplitudes = ComplexVector::Ones(em.nodes.size());
    em.n = static_cast<Eigen::Index>(number(require(j, "n", where), where + ": n"));
    if (j.contains("delta")) em.delta = number(j["delta"], where + ": delta");
    if (em.n < 1) throw DimensionError(where + ": n must be positive");
    const Eigen::Index m = j.contains("m")
                               ? static_cast<Eigen::Index>(number(j["m"], where + ": m"))
                               : 2 * em.n;
    out.v = vandermonde(em.effective_nodes(), em.n);
    if (m - em.p() < em.n) throw DimensionError(where + ": need m - p >= n");
    out.ve = fourier_basis(em.n, m - em.p());
    return out;
  } catch (const json::exception& e) {
    throw ParseError(where + ": " + e.what());
  }
}

ComplexVector read_vector_file(const fs::path& path, const std::string& key) {
  const json j = read_json(path);
  check_schema(j, path);
  try {
    return parse_vector(require(j, key.c_str(), path.string()));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

RealVector read_ratios_file(const fs::path& path) {
  const json j = read_json(path);
  check_schema(j, path);
  try {
    return parse_real_vector(require(j, "ratios", path.string()));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

ExperimentConfig parse_experiment_config(const json& j) {
  const std::string where = "config";
  ExperimentConfig cfg;
  try {
    const json& nodes = require(j, "nodes", where);
    const json& amps = require(j, "amplitudes", where);
    if (!nodes.is_array() || !amps.is_array()) {
      throw ParseError(where + ": nodes and amplitudes must be arrays");
    }
    cfg.model.nodes.resize(static_cast<Eigen::Index>(nodes.size()));
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      cfg.model.nodes(static_cast<Eigen::Index>(k)) = parse_node(nodes[k]);
    }
    cfg.model.amplitudes = parse_vector(amps);
    cfg.model.n = require(j, "n", where).get<Eigen::Index>();
    cfg.model.delta = j.value("delta", 1.0);
    cfg.sigma2 = number(require(j, "sigma2", where), where + ": sigma2");
    cfg.replications = require(j, "replications", where).get<int>();
    cfg.m = j.value("m", Eigen::Index{0});
    cfg.tau = j.value("tau", 0.0);
    cfg.seed = j.value("seed", std::uint64_t{0});
    const std::string est = j.value("estimator", std::string("dominating"));
    if (est == "dominating") {
      cfg.estimator = ExperimentEstimator::dominating;
    } else if (est == "sorted_whole_vector") {
      cfg.estimator = ExperimentEstimator::sorted_whole_vector;
    } else {
      throw ParseError(where + ": unknown estimator \"" + est + "\"");
    }
    cfg.histogram_bins = j.value("histogram_bins", 30);
    cfg.threads = j.value("threads", 1);
    if (j.contains("barrier")) {
      const json& b = j["barrier"];
      cfg.barrier.barrier_mu = b.value("mu", cfg.barrier.barrier_mu);
      cfg.barrier.inner_tol = b.value("inner_tol", cfg.barrier.inner_tol);
      cfg.barrier.outer_tol = b.value("outer_tol", cfg.barrier.outer_tol);
      cfg.barrier.max_newton = b.value("max_newton", cfg.barrier.max_newton);
      cfg.barrier.max_outer = b.value("max_outer", cfg.barrier.max_outer);
    }
  } catch (const json::exception& e) {
    throw ParseError(where + ": " + e.what());
  }
  return cfg;
}

ExperimentConfig read_experiment_config(const fs::path& path) {
  const json j = read_json(path);
  check_schema(j, path);
  try {
    return parse_experiment_config(j);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

json to_json(const ExperimentConfig& cfg) {
  return json{
      {"nodes", to_json(cfg.model.nodes)},
      {"amplitudes", to_json(cfg.model.amplitudes)},
      {"n", cfg.model.n},
      {"m", cfg.resolved_m()},
      {"delta", cfg.model.delta},
      {"sigma2", cfg.sigma2},
      {"tau", cfg.resolved_tau()},
      {"replications", cfg.replications},
      {"seed", cfg.seed},
      {"estimator", cfg.estimator == ExperimentEstimator::dominating ? "dominating"
                                                                      : "sorted_whole_vector"},
      {"histogram_bins", cfg.histogram_bins},
      {"barrier",
       {{"mu", cfg.barrier.barrier_mu},
        {"inner_tol", cfg.barrier.inner_tol},
        {"outer_tol", cfg.barrier.outer_tol},
        {"max_newton", cfg.barrier.max_newton},
        {"max_outer", cfg.barrier.max_outer}}},
  };
}

json to_json(const SampleStats& s) {
  return json{{"mean", s.mean}, {"median", s.median}, {"stddev", s.stddev},
              {"min", s.min},   {"max", s.max},       {"count", s.count}};
}

json to_json(const Histogram& h) { return json{{"edges", h.edges}, {"counts", h.counts}}; }

json summary_json(const ExperimentConfig& cfg, const ExperimentSummary& s) {
  return json{
      {"schema_version", kSchemaVersion},
      {"config", to_json(cfg)},
      {"e_d", to_json(s.e_d)},
      {"e_ls", to_json(s.e_ls)},
      {"d_better_than_ls", s.e_d.mean < s.e_ls.mean},
      {"failures", s.failures},
      {"non_optimal", s.non_optimal},
      {"snr", s.snr},
      {"condition_number", s.condition_number},
      {"histogram_d", to_json(s.hist_d)},
      {"histogram_ls", to_json(s.hist_ls)},
  };
}

std::string records_csv(const std::vector<ReplicationRecord>& records) {
  std::string out = "schema_version,index,e_d,e_ls,status,seed,failed,error\n";
  for (const ReplicationRecord& r : records) {
    out += std::to_string(kSchemaVersion) + ',' + std::to_string(r.index) + ',' +
           format_double(r.e_d) + ',' + format_double(r.e_ls) + ',' +
           std::string(to_string(r.status)) + ',' + std::to_string(r.seed_used) + ',' +
           (r.failed ? "1" : "0") + ',' + csv_escape(r.error) + '\n';
  }
  return out;
}

std::string histogram_svg(const Histogram& proposed, const Histogram& least_squares,
                          const std::string& title) {
  const double width = 640, height = 400;
  const double left = 60, right = 20, top = 40, bottom = 50;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  const std::size_t bins = proposed.counts.size();
  std::size_t peak = 1;
  for (std::size_t k = 0; k < bins; ++k) {
    peak = std::max({peak, proposed.counts[k], least_squares.counts[k]});
  }
  const double bin_w = plot_w / static_cast<double>(bins);
  const auto y_of = [&](std::size_t c) {
    return top + plot_h * (1.0 - static_cast<double>(c) / static_cast<double>(peak));
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  svg << "<!-- schema_version " << kSchemaVersion << " -->\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"#f4f4f4\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";
  for (std::size_t k = 0; k < bins; ++k) {
    const double x = left + bin_w * static_cast<double>(k);
    const double half = bin_w / 2.0;
    svg << "<rect x=\"" << x << "\" y=\"" << y_of(proposed.counts[k]) << "\" width=\"" << half
        << "\" height=\"" << top + plot_h - y_of(proposed.counts[k])
        << "\" fill=\"white\" stroke=\"black\" stroke-width=\"0.8\"/>\n";
    svg << "<rect x=\"" << x + half << "\" y=\"" << y_of(least_squares.counts[k])
        << "\" width=\"" << half << "\" height=\"" << top + plot_h - y_of(least_squares.counts[k])
        << "\" fill=\"black\" stroke=\"black\" stroke-width=\"0.8\"/>\n";
  }
  svg << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
      << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
      << top + plot_h << "\" stroke=\"black\"/>\n";
  const std::size_t ticks = std::min<std::size_t>(bins, 5);
  for (std::size_t t = 0; t <= ticks; ++t) {
    const std::size_t k = t * bins / ticks;
    const double x = left + bin_w * static_cast<double>(k);
    char label[32];
    std::snprintf(label, sizeof label, "%.3g", proposed.edges[k]);
    svg << "<text x=\"" << x << "\" y=\"" << top + plot_h + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << label
        << "</text>\n";
  }
  svg << "<text x=\"" << left - 8 << "\" y=\"" << top + 4
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << peak
      << "</text>\n";
  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
         "relative error</text>\n";
  svg << "<rect x=\"" << left + plot_w - 150 << "\" y=\"" << top << "\" width=\"12\" "
         "height=\"12\" fill=\"white\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << left + plot_w - 132 << "\" y=\"" << top + 10
      << "\" font-family=\"sans-serif\" font-size=\"11\">proposed (l1)</text>\n";
  svg << "<rect x=\"" << left + plot_w - 150 << "\" y=\"" << top + 18 << "\" width=\"12\" "
         "height=\"12\" fill=\"black\"/>\n";
  svg << "<text x=\"" << left + plot_w - 132 << "\" y=\"" << top + 28
      << "\" font-family=\"sans-serif\" font-size=\"11\">least squares</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_json(const fs::path& path, const json& j) { write_atomic(path, j.dump(2) + "\n"); }

}  // namespace l1dom::io
