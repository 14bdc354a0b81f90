#pragma once

// File formats of the l1dom command line tool. See docs/formats.md.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "l1dom/simlab.hpp"
#include "l1dom/types.hpp"

namespace l1dom::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Malformed or unreadable input file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json read_json(const std::filesystem::path& path);

/// A complex number is [re, im] or a plain number.
Complex parse_complex(const json& j);
ComplexVector parse_vector(const json& j);
/// Row-major nested arrays; every row must have the same length.
ComplexMatrix parse_matrix(const json& j);
RealVector parse_real_vector(const json& j);

json to_json(Complex z);
json to_json(const ComplexVector& v);
json to_json(const ComplexMatrix& m);
json to_json(const RealVector& v);

bool is_real(const ComplexMatrix& m);

/// Either explicit matrices {"v", "ve"} or an exponential model
/// {"nodes", "n", "m", "delta"} whose design is the Vandermonde matrix of
/// the sampled nodes and whose noise basis is fourier_basis(n, m - p).
struct ModelFile {
  ComplexMatrix v;
  std::optional<ComplexMatrix> ve;
  std::optional<double> sigma2;
};

ModelFile read_model(const std::filesystem::path& path);

/// Reads the array stored under `key` of a versioned JSON object.
ComplexVector read_vector_file(const std::filesystem::path& path, const std::string& key);
RealVector read_ratios_file(const std::filesystem::path& path);

ExperimentConfig parse_experiment_config(const json& j);
ExperimentConfig read_experiment_config(const std::filesystem::path& path);
json to_json(const ExperimentConfig& cfg);

json to_json(const SampleStats& s);
json to_json(const Histogram& h);
json summary_json(const ExperimentConfig& cfg, const ExperimentSummary& s);

/// One row per record, preceded by a header. Doubles use 17 significant
/// digits so equal runs give equal bytes.
std::string records_csv(const std::vector<ReplicationRecord>& records);

/// Overlaid histograms on common bins: white bars for the l1 estimate,
/// black bars for least squares.
std::string histogram_svg(const Histogram& proposed, const Histogram& least_squares,
                          const std::string& title);

/// Writes to a temporary sibling and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);
void write_json(const std::filesystem::path& path, const json& j);

std::string format_double(double x);

}  // namespace l1dom::io
