#pragma once

// Config-driven experiment front end.
//
// A config is a flat JSON object. Every config carries "schema_version": 1;
// unknown keys are rejected and all validation errors are reported together.
// See README.md for the key reference.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rcm/environment.hpp"
#include "rcm/error.hpp"

namespace rcm {

inline constexpr int kConfigSchemaVersion = 1;
// Largest torus any experiment may allocate.
inline constexpr std::size_t kMaxVertices = std::size_t{1} << 24;

enum class ExperimentKind { kRelax, kKernel, kCorrector, kWeights, kNecessity };

const char* to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_kind(const std::string& name);

class ConfigError : public ValidationError {
 public:
  explicit ConfigError(std::vector<std::string> messages);
  const std::vector<std::string>& messages() const { return messages_; }

 private:
  std::vector<std::string> messages_;
};

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  ExperimentKind kind = ExperimentKind::kRelax;
  int d = 0;
  long L = 0;
  EnvironmentLaw law;
  std::optional<LocalObservable> observable;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<double> moments;
  std::size_t reps = 0;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string output = "out";
  double fit_lo = 0.0;
  double fit_hi = 0.0;
  bool project_zero_mode = true;
  // corrector
  int direction = 0;
  std::vector<double> mu;
  double tol = 1e-10;
  bool precondition = false;
  // weights
  std::vector<double> q;
  double moderation_q = 0.0;
  double r_exponent = 1.0;
  // necessity
  std::vector<double> theta;
  double necessity_q = 8.0;
  std::optional<EnvironmentLaw> control_law;

  std::vector<std::string> warnings;

  // Fully populated config (defaults filled in), echoed into the manifest.
  nlohmann::json echo() const;
};

// `kind` comes from the CLI subcommand; when the document also names an
// "experiment" the two must agree. Throws ConfigError listing every problem.
ExperimentConfig parse_config(const std::string& text, std::optional<ExperimentKind> kind = std::nullopt);
ExperimentConfig parse_config(const nlohmann::json& doc, std::optional<ExperimentKind> kind = std::nullopt);
inline ExperimentConfig parse_config(const char* text, std::optional<ExperimentKind> kind = std::nullopt) {
  return parse_config(std::string(text), kind);
}

// SHA-1 of "blob <n>\0<bytes>", as git hashes file contents.
std::string git_blob_hash(const std::string& bytes);

struct RunReport {
  std::vector<std::filesystem::path> outputs;
  nlohmann::json manifest;
};

// Writes CSVs, plot data and manifest.json into cfg.output (created if
// needed). Module failures propagate as exceptions.
RunReport run_experiment(const ExperimentConfig& cfg);

struct PlotDataReport {
  std::size_t rows = 0;
  std::size_t dropped = 0;
  std::optional<double> exponent;
};

// "log10(t) log10(value)" rows after a '#' header carrying the decay exponent
// fitted over all positive points (or `exponent` when given). Nonpositive
// points are dropped and counted. Throws ValidationError on an empty series
// and Error on I/O failure.
PlotDataReport emit_plot_data(const std::vector<double>& t, const std::vector<double>& value,
                              const std::filesystem::path& path,
                              std::optional<double> exponent = std::nullopt);

}  // namespace rcm
