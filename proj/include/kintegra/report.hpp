#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kintegra/tensor.hpp"
#include "kintegra/theorem.hpp"

namespace kintegra {

inline constexpr const char* kToolVersion = "0.1.0";

// Invalid command-line or file configuration; the CLI maps this to exit 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;  // verify-theorem | check | torsion | witness
  int dim = 0;          // 0 = take from the metric file
  long trials = 1000;
  std::uint64_t seed = 0;
  double tolerance = 1e-8;
  std::optional<Signature> signature;
  std::vector<MultiplicityPattern> patterns;
  std::string metric_spec;   // built-in name[:radius] or file path
  std::string killing_spec;  // file path or the literal "metric" (K = g)
  std::vector<std::vector<double>> points;
  std::string format = "json";  // json | text
  std::string out_path;         // empty = stdout
};

struct PointRecord {
  std::vector<double> point;
  double killing_residual = 0.0;  // relative to |∇K|
  bool killing_ok = false;
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
  bool c1_ok = false, c2_ok = false, c3_ok = false;
  bool integrable = false;  // c1 and c2
  double haantjes_max_abs = 0.0;
  std::optional<std::vector<double>> eigenvalues;  // absent when no eigenframe
  // torsion command only: flattened N^a_bc, row-major
  std::optional<std::vector<double>> torsion;
  double torsion_max_abs = 0.0;
};

struct WitnessRecord {
  int dim = 0;
  std::string pattern;
  std::vector<double> lambda;
  bool found = false;
  double k2_residual = 0.0;
  int dim_k0k1 = 0;
  int dim_k0k1k2 = 0;
  std::vector<double> components;  // flattened witness tensor
};

// Everything a run reports. JSON serialization is byte-stable for a fixed
// RunConfig: fixed key order, 17-significant-digit floats, and no wall-clock
// fields (TheoremReport.elapsed_seconds appears only in the text format).
struct IntegrabilityReport {
  std::string command;
  std::uint64_t seed = 0;
  double tolerance = 1e-8;
  int dim = 0;
  std::string metric;
  std::string killing;
  std::vector<std::string> warnings;
  std::vector<PointRecord> points;
  std::vector<TheoremReport> theorem;
  std::optional<WitnessRecord> witness;
};

std::string report_to_json(const IntegrabilityReport& r);
std::string report_to_text(const IntegrabilityReport& r);

struct RunResult {
  IntegrabilityReport report;
  int exit_code = 0;
};

RunResult run_verify_theorem(const RunConfig& cfg);
RunResult run_check_field(const RunConfig& cfg);
RunResult run_torsion(const RunConfig& cfg);
RunResult run_witness(const RunConfig& cfg);

// Serialize per cfg.format and write to cfg.out_path or stdout.
void emit_report(const IntegrabilityReport& r, const RunConfig& cfg);

}  // namespace kintegra
