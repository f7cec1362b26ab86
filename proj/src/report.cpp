#include "kintegra/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "kintegra/killing.hpp"
#include "kintegra/nijenhuis.hpp"

namespace kintegra {

namespace {

// ---- JSON assembly: fixed key order, 17 significant digits ----

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string jnum(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string jarr(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += jnum(v[i]);
  }
  return out + "]";
}

const char* jbool(bool b) { return b ? "true" : "false"; }

std::string point_record_json(const PointRecord& p, bool torsion_mode) {
  std::string out = "    {\"point\": " + jarr(p.point);
  if (torsion_mode) {
    out += ", \"torsion_max_abs\": " + jnum(p.torsion_max_abs);
    out += ", \"torsion\": " + jarr(p.torsion.value_or(std::vector<double>{}));
  } else {
    out += ", \"killing_residual\": " + jnum(p.killing_residual);
    out += std::string(", \"killing_ok\": ") + jbool(p.killing_ok);
    out += ", \"c1\": " + jnum(p.c1) + ", \"c2\": " + jnum(p.c2) + ", \"c3\": " + jnum(p.c3);
    out += std::string(", \"c1_ok\": ") + jbool(p.c1_ok);
    out += std::string(", \"c2_ok\": ") + jbool(p.c2_ok);
    out += std::string(", \"c3_ok\": ") + jbool(p.c3_ok);
    out += std::string(", \"integrable\": ") + jbool(p.integrable);
    out += ", \"haantjes_max_abs\": " + jnum(p.haantjes_max_abs);
    out += ", \"eigenvalues\": ";
    out += p.eigenvalues ? jarr(*p.eigenvalues) : "null";
  }
  return out + "}";
}

std::string theorem_json(const TheoremReport& t) {
  std::string out = "    {\"dim\": " + std::to_string(t.dim);
  out += ", \"pattern\": \"" + json_escape(t.pattern.str()) + "\"";
  out += ", \"trials\": " + std::to_string(t.trials);
  out += ", \"seed\": " + std::to_string(t.seed);
  out += ", \"tolerance\": " + jnum(t.tolerance);
  out += ", \"max_k3_residual\": " + jnum(t.max_k3_residual);
  out += ", \"constraint_dims\": [" + std::to_string(t.constraint_dims[0]) + ", " +
         std::to_string(t.constraint_dims[1]) + ", " + std::to_string(t.constraint_dims[2]) +
         ", " + std::to_string(t.constraint_dims[3]) + "]";
  out += std::string(", \"verified\": ") + jbool(t.verified);
  return out + "}";
}

std::string witness_json(const WitnessRecord& w) {
  std::string out = "{\"dim\": " + std::to_string(w.dim);
  out += ", \"pattern\": \"" + json_escape(w.pattern) + "\"";
  out += ", \"lambda\": " + jarr(w.lambda);
  out += std::string(", \"found\": ") + jbool(w.found);
  out += ", \"k2_residual\": " + jnum(w.k2_residual);
  out += ", \"nullspace_dim_k0k1\": " + std::to_string(w.dim_k0k1);
  out += ", \"nullspace_dim_k0k1k2\": " + std::to_string(w.dim_k0k1k2);
  out += ", \"components\": " + jarr(w.components);
  return out + "}";
}

std::string fmt_point(const std::vector<double>& p) {
  std::string out = "(";
  char buf[32];
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += ", ";
    std::snprintf(buf, sizeof buf, "%.6g", p[i]);
    out += buf;
  }
  return out + ")";
}

std::string pad(std::string s, std::size_t w) {
  s.append(s.size() < w ? w - s.size() : 2, ' ');
  return s;
}

std::string fmt_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace

std::string report_to_json(const IntegrabilityReport& r) {
  const bool torsion_mode = r.command == "torsion";
  std::string out = "{\n";
  out += "  \"tool\": \"kintegra\",\n";
  out += std::string("  \"version\": \"") + kToolVersion + "\",\n";
  out += "  \"command\": \"" + json_escape(r.command) + "\",\n";
  out += "  \"seed\": " + std::to_string(r.seed) + ",\n";
  out += "  \"tolerance\": " + jnum(r.tolerance) + ",\n";
  out += "  \"dim\": " + std::to_string(r.dim) + ",\n";
  out += "  \"metric\": \"" + json_escape(r.metric) + "\",\n";
  out += "  \"killing\": \"" + json_escape(r.killing) + "\",\n";
  out += "  \"warnings\": [";
  for (std::size_t i = 0; i < r.warnings.size(); ++i) {
    if (i) out += ", ";
    out += "\"" + json_escape(r.warnings[i]) + "\"";
  }
  out += "],\n";
  out += "  \"points\": [";
  for (std::size_t i = 0; i < r.points.size(); ++i)
    out += (i ? ",\n" : "\n") + point_record_json(r.points[i], torsion_mode);
  out += r.points.empty() ? "],\n" : "\n  ],\n";
  out += "  \"theorem\": [";
  for (std::size_t i = 0; i < r.theorem.size(); ++i)
    out += (i ? ",\n" : "\n") + theorem_json(r.theorem[i]);
  out += r.theorem.empty() ? "],\n" : "\n  ],\n";
  out += "  \"witness\": ";
  out += r.witness ? witness_json(*r.witness) : "null";
  out += "\n}\n";
  return out;
}

std::string report_to_text(const IntegrabilityReport& r) {
  std::string out;
  for (const std::string& w : r.warnings) out += "# warning: " + w + "\n";
  if (r.command == "verify-theorem") {
    out += pad("dim", 5) + pad("pattern", 14) + pad("trials", 8) + pad("seed", 8) +
           pad("dims{0,01,012,0123}", 22) + pad("max_k3", 12) + pad("verified", 10) + "elapsed_s\n";
    for (const TheoremReport& t : r.theorem) {
      std::string dims = std::to_string(t.constraint_dims[0]) + "," +
                         std::to_string(t.constraint_dims[1]) + "," +
                         std::to_string(t.constraint_dims[2]) + "," +
                         std::to_string(t.constraint_dims[3]);
      out += pad(std::to_string(t.dim), 5) + pad(t.pattern.str(), 14) +
             pad(std::to_string(t.trials), 8) + pad(std::to_string(t.seed), 8) + pad(dims, 22) +
             pad(fmt_sci(t.max_k3_residual), 12) + pad(t.verified ? "yes" : "no", 10) +
             fmt_sci(t.elapsed_seconds) + "\n";
    }
    return out;
  }
  if (r.command == "witness") {
    out += pad("dim", 5) + pad("pattern", 14) + pad("found", 7) + pad("k2_residual", 13) +
           pad("dim_k0k1", 10) + pad("dim_k0k1k2", 12) + "lambda\n";
    if (r.witness) {
      const WitnessRecord& w = *r.witness;
      out += pad(std::to_string(w.dim), 5) + pad(w.pattern, 14) + pad(w.found ? "yes" : "no", 7) +
             pad(fmt_sci(w.k2_residual), 13) + pad(std::to_string(w.dim_k0k1), 10) +
             pad(std::to_string(w.dim_k0k1k2), 12) + fmt_point(w.lambda) + "\n";
    }
    return out;
  }
  if (r.command == "torsion") {
    out += pad("point", 32) + "torsion_max_abs\n";
    for (const PointRecord& p : r.points)
      out += pad(fmt_point(p.point), 32) + fmt_sci(p.torsion_max_abs) + "\n";
    return out;
  }
  out += pad("point", 32) + pad("killing", 12) + pad("c1", 12) + pad("c2", 12) + pad("c3", 12) +
         pad("integrable", 12) + "haantjes\n";
  for (const PointRecord& p : r.points)
    out += pad(fmt_point(p.point), 32) + pad(fmt_sci(p.killing_residual), 12) +
           pad(fmt_sci(p.c1), 12) + pad(fmt_sci(p.c2), 12) + pad(fmt_sci(p.c3), 12) +
           pad(p.integrable ? "yes" : "no", 12) + fmt_sci(p.haantjes_max_abs) + "\n";
  return out;
}

namespace {

// ---- command drivers ----

void require_dim(const RunConfig& cfg) {
  if (cfg.dim == 0) throw ConfigError("--dim is required for this command");
  if (cfg.dim < 2 || cfg.dim > 8) throw ConfigError("dim must be in 2..8");
}

void validate_common(const RunConfig& cfg) {
  if (cfg.trials < 1) throw ConfigError("trials must be at least 1");
  if (!(cfg.tolerance > 0)) throw ConfigError("tolerance must be positive");
  if (cfg.format != "json" && cfg.format != "text")
    throw ConfigError("format must be 'json' or 'text'");
}

MetricField resolve_metric(const RunConfig& cfg) {
  if (cfg.metric_spec.empty()) throw ConfigError("--metric is required for this command");
  std::string base = cfg.metric_spec;
  std::optional<double> radius;
  if (auto colon = base.find(':'); colon != std::string::npos) {
    const std::string rs = base.substr(colon + 1);
    base = base.substr(0, colon);
    try {
      std::size_t used = 0;
      radius = std::stod(rs, &used);
      if (used != rs.size() || !(*radius > 0)) throw std::invalid_argument("");
    } catch (...) {
      throw ConfigError("metric radius must be a positive number, got '" + rs + "'");
    }
  }
  auto no_radius = [&]() {
    if (radius) throw ConfigError("metric '" + base + "' takes no radius");
  };
  if (base == "euclidean" || base == "minkowski" || base == "sphere" || base == "hyperbolic") {
    if (cfg.dim == 0) throw ConfigError("--dim is required with built-in metric names");
    if (cfg.dim < 2 || cfg.dim > 8) throw ConfigError("dim must be in 2..8");
  }
  if (base == "euclidean") {
    no_radius();
    if (cfg.signature && !(*cfg.signature == Signature{cfg.dim, 0}))
      throw ConfigError("euclidean metric has signature dim,0");
    return MetricField::euclidean(cfg.dim);
  }
  if (base == "minkowski") {
    no_radius();
    const Signature sig = cfg.signature.value_or(Signature{cfg.dim - 1, 1});
    if (sig.dim() != cfg.dim) throw ConfigError("signature parts must sum to dim");
    if (sig.minus < 1) throw ConfigError("minkowski signature needs at least one minus");
    return MetricField::minkowski(sig);
  }
  if (base == "sphere") return MetricField::sphere_stereographic(cfg.dim, radius.value_or(1.0));
  if (base == "hyperbolic") return MetricField::hyperbolic_ball(cfg.dim, radius.value_or(1.0));

  // a metric file
  if (!std::filesystem::exists(cfg.metric_spec))
    throw ConfigError("unknown metric '" + cfg.metric_spec +
                      "' (built-ins: euclidean, minkowski, sphere[:radius], hyperbolic[:radius]) "
                      "and no such file exists");
  MetricField m = [&] {
    try {
      return MetricField::from_file(cfg.metric_spec);
    } catch (const ParseError& e) {
      throw ConfigError(cfg.metric_spec + ": " + e.what());
    }
  }();
  if (cfg.dim != 0 && cfg.dim != m.dim())
    throw ConfigError("--dim disagrees with the metric file (file says " +
                      std::to_string(m.dim()) + ")");
  if (cfg.signature && !(*cfg.signature == m.signature()))
    throw ConfigError("--signature disagrees with the metric file");
  return m;
}

std::unique_ptr<SymmetricTensorField> resolve_killing(const RunConfig& cfg, const MetricField& m) {
  if (cfg.killing_spec.empty()) throw ConfigError("--killing is required for this command");
  if (cfg.killing_spec == "metric") return std::make_unique<MetricTensorField>(m);
  try {
    return std::make_unique<KillingTensorField>(killing_field_from_file(m, cfg.killing_spec));
  } catch (const ParseError& e) {
    throw ConfigError(cfg.killing_spec + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(cfg.killing_spec + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
}

std::vector<std::vector<double>> resolve_points(const RunConfig& cfg, const MetricField& m) {
  if (!cfg.points.empty()) {
    for (const auto& p : cfg.points) {
      if (static_cast<int>(p.size()) != m.dim())
        throw ConfigError("--point needs " + std::to_string(m.dim()) + " coordinates");
      if (!m.admissible(p)) throw ConfigError("point " + fmt_point(p) + " is outside the chart domain");
    }
    return cfg.points;
  }
  PhiloxRng rng(cfg.seed, 0xA11CE);
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < 20; ++i) pts.push_back(random_admissible_point(m, rng));
  return pts;
}

IntegrabilityReport base_report(const RunConfig& cfg, int dim) {
  IntegrabilityReport rep;
  rep.command = cfg.command;
  rep.seed = cfg.seed;
  rep.tolerance = cfg.tolerance;
  rep.dim = dim;
  rep.metric = cfg.metric_spec;
  rep.killing = cfg.killing_spec;
  return rep;
}

std::vector<MultiplicityPattern> default_patterns(int dim) {
  std::vector<MultiplicityPattern> out;
  out.push_back(MultiplicityPattern::distinct(dim));
  if (dim >= 3) {
    MultiplicityPattern two;
    two.parts.push_back(2);
    for (int i = 0; i < dim - 2; ++i) two.parts.push_back(1);
    out.push_back(std::move(two));
  }
  MultiplicityPattern all;
  all.parts.push_back(dim);
  out.push_back(std::move(all));
  return out;
}

}  // namespace

RunResult run_verify_theorem(const RunConfig& cfg) {
  validate_common(cfg);
  require_dim(cfg);
  std::vector<MultiplicityPattern> patterns =
      cfg.patterns.empty() ? default_patterns(cfg.dim) : cfg.patterns;
  for (const MultiplicityPattern& p : patterns)
    if (p.total() != cfg.dim) throw ConfigError("pattern " + p.str() + " does not sum to dim");

  RunResult res{base_report(cfg, cfg.dim), 0};
  for (const MultiplicityPattern& p : patterns) {
    res.report.theorem.push_back(
        verify_redundancy(cfg.dim, p, cfg.trials, cfg.seed, cfg.tolerance));
    if (!res.report.theorem.back().verified) res.exit_code = 1;
  }
  return res;
}

RunResult run_check_field(const RunConfig& cfg) {
  validate_common(cfg);
  const MetricField metric = resolve_metric(cfg);
  const std::unique_ptr<SymmetricTensorField> field = resolve_killing(cfg, metric);
  const std::vector<std::vector<double>> pts = resolve_points(cfg, metric);

  RunResult res{base_report(cfg, metric.dim()), 0};
  int failures = 0;
  for (const auto& coords : pts) {
    const ChartPoint p = metric.point(coords);
    PointRecord rec;
    rec.point = coords;
    rec.killing_residual = killing_residual_relative(*field, metric, p);
    rec.killing_ok = rec.killing_residual <= cfg.tolerance;
    const ConditionResiduals cr = condition_residuals(*field, metric, p, cfg.tolerance);
    rec.c1 = cr.rel[0];
    rec.c2 = cr.rel[1];
    rec.c3 = cr.rel[2];
    rec.c1_ok = cr.verdict[0];
    rec.c2_ok = cr.verdict[1];
    rec.c3_ok = cr.verdict[2];
    rec.integrable = cr.verdict[0] && cr.verdict[1];
    rec.haantjes_max_abs = haantjes_at(*field, metric, p).max_abs();
    const std::optional<EigenFrame> frame =
        generalized_eigenframe(field->value_at(p), metric.metric_at(p), metric.signature());
    if (frame) {
      std::vector<double> ev(frame->eigenvalues.data(),
                             frame->eigenvalues.data() + frame->eigenvalues.size());
      rec.eigenvalues = std::move(ev);
    }
    if (!rec.killing_ok) ++failures;
    res.report.points.push_back(std::move(rec));
  }
  if (failures > 0) {
    res.report.warnings.push_back(
        "killing residual exceeds tolerance at " + std::to_string(failures) + " of " +
        std::to_string(pts.size()) +
        " points; the input is not a Killing tensor, so the cubic-condition redundancy "
        "is not guaranteed");
    res.exit_code = 1;
  }
  return res;
}

RunResult run_torsion(const RunConfig& cfg) {
  validate_common(cfg);
  const MetricField metric = resolve_metric(cfg);
  const std::unique_ptr<SymmetricTensorField> field = resolve_killing(cfg, metric);
  const std::vector<std::vector<double>> pts = resolve_points(cfg, metric);

  RunResult res{base_report(cfg, metric.dim()), 0};
  for (const auto& coords : pts) {
    const ChartPoint p = metric.point(coords);
    const DenseTensor n = torsion_at(*field, metric, p);
    PointRecord rec;
    rec.point = coords;
    rec.torsion_max_abs = n.max_abs();
    rec.torsion = std::vector<double>(n.components().begin(), n.components().end());
    res.report.points.push_back(std::move(rec));
  }
  return res;
}

RunResult run_witness(const RunConfig& cfg) {
  validate_common(cfg);
  require_dim(cfg);
  if (cfg.patterns.size() > 1) throw ConfigError("witness takes at most one --pattern");
  const MultiplicityPattern pattern =
      cfg.patterns.empty() ? MultiplicityPattern::distinct(cfg.dim) : cfg.patterns[0];
  if (pattern.total() != cfg.dim) throw ConfigError("pattern " + pattern.str() + " does not sum to dim");

  PhiloxRng rng(cfg.seed, 1);
  const Eigen::VectorXd lambda = sample_lambda(cfg.dim, pattern, rng);
  const std::optional<WitnessResult> w = independence_witness(cfg.dim, lambda, cfg.seed);

  RunResult res{base_report(cfg, cfg.dim), w ? 0 : 1};
  WitnessRecord rec;
  rec.dim = cfg.dim;
  rec.pattern = pattern.str();
  rec.lambda.assign(lambda.data(), lambda.data() + lambda.size());
  if (w) {
    rec.found = true;
    rec.k2_residual = w->k2_residual;
    rec.dim_k0k1 = w->dim_k0k1;
    rec.dim_k0k1k2 = w->dim_k0k1k2;
    rec.components.assign(w->s.components().begin(), w->s.components().end());
  } else {
    static constexpr KCondition c01[] = {KCondition::K0, KCondition::K1};
    static constexpr KCondition c012[] = {KCondition::K0, KCondition::K1, KCondition::K2};
    rec.dim_k0k1 = static_cast<int>(constraint_solution_space(lambda, c01).cols());
    rec.dim_k0k1k2 = static_cast<int>(constraint_solution_space(lambda, c012).cols());
  }
  res.report.witness = std::move(rec);
  return res;
}

void emit_report(const IntegrabilityReport& r, const RunConfig& cfg) {
  const std::string body = cfg.format == "text" ? report_to_text(r) : report_to_json(r);
  if (cfg.out_path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream out(cfg.out_path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + cfg.out_path);
  out << body;
}

}  // namespace kintegra
