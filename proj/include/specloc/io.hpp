#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "specloc/blockop.hpp"
#include "specloc/numerics.hpp"
#include "specloc/operators.hpp"
#include "specloc/spectra.hpp"

namespace specloc::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

json to_json(Complex z);
json to_json(const std::vector<Complex>& zs);
json to_json(const ComplexMatrix& A);  // rows of [re, im]

/// Accepts a number or [re, im]. `path` names the field in error messages.
Complex complex_from_json(const json& j, const std::string& path);
/// Array of rows; every entry is a number or [re, im].
ComplexMatrix matrix_from_json(const json& j, const std::string& path);

struct GapSection {
  spectra::GapSequenceModel model;
  std::size_t kFirst = 1;
  std::size_t kLast = 0;
};

struct ProjectionSection {
  double theta = 0.0;
  std::vector<double> abscissas;
  double alpha = 1.0;
  double p = 0.0;
};

/// Parsed system specification file. Every section is optional at parse
/// time; subcommands demand the ones they need.
struct SystemSpecFile {
  std::optional<operators::PerturbedSystem> system;  // from dimension, G, S, p
  std::optional<GapSection> gaps;
  std::optional<blockop::HamiltonianModel> hamiltonian;
  std::optional<ProjectionSection> projection;
  std::vector<ComplexMatrix> frames;
  std::vector<ComplexMatrix> projectors;
};

/// Throws InputError naming the offending field.
SystemSpecFile parse_system_spec(const json& j);

/// Throws InputError when the report does not follow the published schema.
void validate_run_report(const json& report);

std::string sha256_hex(const std::string& bytes);

/// Whole file as bytes. Throws InputError when it cannot be read.
std::string read_file(const std::string& path);

}  // namespace specloc::io
