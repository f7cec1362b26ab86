#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kintegra/report.hpp"

namespace {

using kintegra::RunConfig;

// shared flags are registered per subcommand so each --help stays focused
void add_output_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--format", cfg.format, "report format: json or text")
      ->check(CLI::IsMember({"json", "text"}));
  cmd->add_option("--out", cfg.out_path, "write the report to a file instead of stdout");
  cmd->add_option("--seed", cfg.seed, "random seed");
  cmd->add_option("--tolerance", cfg.tolerance, "residual tolerance");
}

void add_pattern_option(CLI::App* cmd, std::vector<std::string>& raw) {
  cmd->add_option("--pattern", raw,
                  "eigenvalue multiplicity pattern like 2,1 (repeatable)");
}

void add_geometry_flags(CLI::App* cmd, RunConfig& cfg, std::vector<std::string>& points,
                        std::string& signature) {
  cmd->add_option("--metric", cfg.metric_spec,
                  "euclidean | minkowski | sphere[:radius] | hyperbolic[:radius] | metric file");
  cmd->add_option("--killing", cfg.killing_spec,
                  "killing tensor file, or 'metric' for K = g");
  cmd->add_option("--dim", cfg.dim, "chart dimension");
  cmd->add_option("--signature", signature, "metric signature p,q");
  cmd->add_option("--point", points, "evaluation point x1,x2,... (repeatable)");
}

std::vector<double> parse_point(const std::string& s) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    const std::string part = s.substr(pos, comma - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument("");
    } catch (...) {
      throw kintegra::ConfigError("malformed coordinate '" + part + "' in --point");
    }
    if (comma == s.size()) break;
    pos = comma + 1;
  }
  return out;
}

kintegra::Signature parse_signature(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos)
    throw kintegra::ConfigError("--signature must look like p,q");
  try {
    kintegra::Signature sig;
    sig.plus = std::stoi(s.substr(0, comma));
    sig.minus = std::stoi(s.substr(comma + 1));
    if (sig.plus < 0 || sig.minus < 0) throw std::invalid_argument("");
    return sig;
  } catch (const kintegra::ConfigError&) {
    throw;
  } catch (...) {
    throw kintegra::ConfigError("--signature must look like p,q");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"killing tensor integrability conditions on (pseudo-)riemannian charts"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::vector<std::string> raw_patterns;
  std::vector<std::string> raw_points;
  std::string raw_signature;

  CLI::App* verify = app.add_subcommand(
      "verify-theorem", "randomized + exact check that the cubic condition is redundant");
  verify->add_option("--dim", cfg.dim, "dimension (2..8)");
  verify->add_option("--trials", cfg.trials, "sampling trials per pattern");
  add_pattern_option(verify, raw_patterns);
  add_output_flags(verify, cfg);

  CLI::App* check = app.add_subcommand(
      "check", "evaluate killing residual, integrability conditions and haantjes tensor");
  add_geometry_flags(check, cfg, raw_points, raw_signature);
  add_output_flags(check, cfg);

  CLI::App* torsion = app.add_subcommand("torsion", "dump the nijenhuis torsion at points");
  add_geometry_flags(torsion, cfg, raw_points, raw_signature);
  add_output_flags(torsion, cfg);

  CLI::App* witness = app.add_subcommand(
      "witness", "exhibit a quadratic-condition violation inside the {K0,K1} solution space");
  witness->add_option("--dim", cfg.dim, "dimension (2..8)");
  add_pattern_option(witness, raw_patterns);
  add_output_flags(witness, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    for (const std::string& p : raw_patterns)
      cfg.patterns.push_back(kintegra::MultiplicityPattern::parse(p));
    for (const std::string& p : raw_points) cfg.points.push_back(parse_point(p));
    if (!raw_signature.empty()) cfg.signature = parse_signature(raw_signature);

    kintegra::RunResult res;
    if (verify->parsed()) {
      cfg.command = "verify-theorem";
      res = kintegra::run_verify_theorem(cfg);
    } else if (check->parsed()) {
      cfg.command = "check";
      res = kintegra::run_check_field(cfg);
    } else if (torsion->parsed()) {
      cfg.command = "torsion";
      res = kintegra::run_torsion(cfg);
    } else {
      cfg.command = "witness";
      res = kintegra::run_witness(cfg);
    }
    kintegra::emit_report(res.report, cfg);
    return res.exit_code;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
