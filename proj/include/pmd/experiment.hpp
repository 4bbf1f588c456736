// Experiment driver: wires a parsed config into a solver run, writes the
// trace/summary/plot artifacts, and implements the solve / compare / oracle /
// certify commands. Traces round-trip exactly: doubles are written in
// shortest round-trip form, so a re-run parse-compares bitwise.
#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pmd/config.hpp"
#include "pmd/errors.hpp"
#include "pmd/reference.hpp"
#include "pmd/solver.hpp"
#include "pmd/textio.hpp"

namespace pmd {

inline constexpr const char* kTraceHeader =
    "k,f_x,best_f,eta,target,g_dual_norm,delta,sigma,level,certifier_residual,domain_violation";

namespace detail {

inline std::string cell(double v) {
  if (std::isnan(v)) return "";
  return format_double(v);
}

inline std::string cell(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

inline std::string cell(const std::optional<long long>& v) {
  return v ? std::to_string(*v) : std::string();
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

}  // namespace detail

inline std::string trace_line(const IterationRecord& rec) {
  std::string s = std::to_string(rec.k);
  s += ',';
  s += detail::cell(rec.f_x);
  s += ',';
  s += detail::cell(rec.best_f);
  s += ',';
  s += detail::cell(rec.eta);
  s += ',';
  s += detail::cell(rec.target);
  s += ',';
  s += detail::cell(rec.g_dual_norm);
  s += ',';
  s += detail::cell(rec.policy.delta);
  s += ',';
  s += detail::cell(rec.policy.sigma);
  s += ',';
  s += detail::cell(rec.policy.level);
  s += ',';
  s += detail::cell(rec.certifier_residual);
  s += ',';
  s += rec.domain_violation ? '1' : '0';
  return s;
}

inline void write_trace(const std::string& path, const std::vector<IterationRecord>& history) {
  std::ofstream out = detail::open_out(path);
  out << kTraceHeader << '\n';
  for (const IterationRecord& rec : history) out << trace_line(rec) << '\n';
}

inline void write_summary(const std::string& path, const std::string& policy_kind,
                          const RunResult& res, const std::optional<ReferenceOptimum>& ref,
                          long long seed) {
  std::ofstream out = detail::open_out(path);
  out << "policy = " << policy_kind << '\n';
  out << "termination = " << to_string(res.termination) << '\n';
  out << "iterations = " << res.history.size() << '\n';
  out << "best_f = " << format_double(res.best_f) << '\n';
  out << "best_x = " << detail::join_vector(res.best_x) << '\n';
  if (ref) {
    out << "f_star = " << format_double(ref->f_star) << '\n';
    out << "reference_method = " << to_string(ref->method) << '\n';
    out << "reference_resolution = " << format_double(ref->resolution) << '\n';
    out << "gap = " << format_double(res.best_f - ref->f_star) << '\n';
  }
  bool violated = false;
  long long certified = 0;
  double min_residual = kInf;
  for (const IterationRecord& rec : res.history) {
    violated = violated || rec.domain_violation;
    if (rec.certifier_residual) {
      ++certified;
      min_residual = std::min(min_residual, *rec.certifier_residual);
    }
  }
  out << "domain_violation = " << (violated ? 1 : 0) << '\n';
  out << "certified_iterations = " << certified << '\n';
  if (certified > 0) out << "min_certifier_residual = " << format_double(min_residual) << '\n';
  out << "seed = " << seed << '\n';
}

inline void write_plot(const std::string& path, const std::vector<IterationRecord>& history,
                       const std::optional<ReferenceOptimum>& ref) {
  std::ofstream out = detail::open_out(path);
  out << (ref ? "k,gap" : "k,best_f") << '\n';
  for (const IterationRecord& rec : history) {
    out << rec.k << ',';
    out << format_double(ref ? rec.best_f - ref->f_star : rec.best_f) << '\n';
  }
}

// Reference wiring: the grid oracle refuses instances it cannot cover, and
// the experiment then simply runs without a gap column.
inline std::optional<ReferenceOptimum> try_reference(const Objective& obj,
                                                     double resolution = 1e-4) {
  try {
    return compute_reference(obj, resolution);
  } catch (const UnsupportedInstance&) {
    return std::nullopt;
  }
}

inline PolicyState build_policy(const ExperimentConfig& cfg, const std::string& policy_kind,
                                const std::optional<ReferenceOptimum>& ref) {
  try {
    if (policy_kind == "classic") {
      if (cfg.f_star) return make_classic(*cfg.f_star, cfg.c);
      if (cfg.f_star_auto) {
        if (!ref)
          throw ConfigError(
              "policy.f_star = auto requires a computable reference optimum for this problem");
        return make_classic(ref->f_star, cfg.c);
      }
      throw ConfigError("classic policy requires policy.f_star (a number or auto)");
    }
    if (policy_kind == "adaptive")
      return make_adaptive(cfg.delta1, cfg.delta_floor, cfg.beta, cfg.gamma, cfg.c);
    if (policy_kind == "level") return make_level(cfg.delta1, cfg.budget, cfg.c);
    throw ConfigError("unknown policy '" + policy_kind + "'");
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
}

struct ExperimentResult {
  std::string policy_kind;
  RunResult run;
  std::optional<ReferenceOptimum> reference;
};

inline ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                       const std::string& policy_kind = "",
                                       long long certify_every_override = -1) {
  ExperimentResult res;
  res.policy_kind = policy_kind.empty() ? cfg.policy_kind : policy_kind;
  res.reference = try_reference(cfg.objective);
  RunConfig rc = cfg.run;
  if (res.reference) rc.f_star_reference = res.reference->f_star;
  if (rc.target_gap && !rc.f_star_reference)
    throw ConfigError("run.target_gap requires a computable reference optimum for this problem");
  if (certify_every_override >= 0) rc.certify_every = certify_every_override;
  PolicyState policy = build_policy(cfg, res.policy_kind, res.reference);
  res.run = pmd::run(cfg.objective, cfg.map, std::move(policy), rc);
  return res;
}

namespace detail {

inline void ensure_parent_dir(const std::string& prefix) {
  const std::filesystem::path parent = std::filesystem::path(prefix).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

inline std::string outcome_line(const ExperimentResult& r) {
  std::string s = r.policy_kind;
  s += ": ";
  s += to_string(r.run.termination);
  s += " after " + std::to_string(r.run.history.size()) + " iterations, best_f = ";
  s += format_double(r.run.best_f);
  if (r.reference) s += ", gap = " + format_double(r.run.best_f - r.reference->f_star);
  return s;
}

}  // namespace detail

inline int cmd_solve(const std::string& config_path) {
  const ExperimentConfig cfg = parse_config(config_path);
  const ExperimentResult r = run_experiment(cfg);
  detail::ensure_parent_dir(cfg.output_prefix);
  write_trace(cfg.output_prefix + ".trace.csv", r.run.history);
  write_summary(cfg.output_prefix + ".summary.txt", r.policy_kind, r.run, r.reference,
                cfg.run.seed);
  write_plot(cfg.output_prefix + ".plot.csv", r.run.history, r.reference);
  std::cout << detail::outcome_line(r) << '\n';
  std::cout << "wrote " << cfg.output_prefix << ".{trace.csv,summary.txt,plot.csv}" << '\n';
  return 0;
}

inline int cmd_compare(const std::string& config_path, const std::vector<std::string>& policies) {
  if (policies.empty()) throw ConfigError("compare: empty policy list");
  const ExperimentConfig cfg = parse_config(config_path);
  detail::ensure_parent_dir(cfg.output_prefix);
  std::vector<ExperimentResult> results;
  for (const std::string& name : policies) {
    if (name != "classic" && name != "adaptive" && name != "level")
      throw ConfigError("compare: unknown policy '" + name + "'");
    ExperimentResult r = run_experiment(cfg, name);
    const std::string prefix = cfg.output_prefix + "." + name;
    write_trace(prefix + ".trace.csv", r.run.history);
    write_summary(prefix + ".summary.txt", r.policy_kind, r.run, r.reference, cfg.run.seed);
    write_plot(prefix + ".plot.csv", r.run.history, r.reference);
    std::cout << detail::outcome_line(r) << '\n';
    results.push_back(std::move(r));
  }

  // Combined table: one gap (or best_f) column per policy, rows padded to the
  // longest run with empty cells.
  const bool have_ref = results.front().reference.has_value();
  std::ofstream out = detail::open_out(cfg.output_prefix + ".compare.csv");
  out << 'k';
  for (const std::string& name : policies) out << ',' << name << (have_ref ? "_gap" : "_best_f");
  out << '\n';
  std::size_t rows = 0;
  for (const ExperimentResult& r : results) rows = std::max(rows, r.run.history.size());
  for (std::size_t i = 0; i < rows; ++i) {
    out << (i + 1);
    for (const ExperimentResult& r : results) {
      out << ',';
      if (i < r.run.history.size()) {
        const double best = r.run.history[i].best_f;
        out << format_double(have_ref ? best - r.reference->f_star : best);
      }
    }
    out << '\n';
  }
  std::cout << "wrote " << cfg.output_prefix << ".compare.csv" << '\n';
  return 0;
}

inline int cmd_oracle(const std::string& config_path, double resolution) {
  const ExperimentConfig cfg = parse_config(config_path);
  const ReferenceOptimum ref = compute_reference(cfg.objective, resolution);
  std::cout << "f_star = " << format_double(ref.f_star) << '\n';
  std::cout << "x_star = " << detail::join_vector(ref.x_star) << '\n';
  std::cout << "method = " << to_string(ref.method) << '\n';
  std::cout << "resolution = " << format_double(ref.resolution) << '\n';
  return 0;
}

namespace detail {

struct TraceRow {
  long long k = 0;
  double f_x = 0.0;
  double best_f = 0.0;
  std::optional<double> eta, target, g_dual_norm, delta, sigma;
  std::optional<long long> level;
  std::optional<double> certifier_residual;
  bool domain_violation = false;
};

inline std::optional<double> parse_opt_double(const std::string& s, const char* what) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  if (!try_parse_double(s, v)) throw ConfigError(std::string("trace: bad ") + what + " '" + s + "'");
  return v;
}

inline std::vector<TraceRow> parse_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("trace: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader) throw ConfigError("trace: unexpected header '" + line + "'");
  std::vector<TraceRow> rows;
  long long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != 11)
      throw ConfigError("trace: line " + std::to_string(lineno) + " has " +
                        std::to_string(f.size()) + " fields, expected 11");
    TraceRow row;
    if (!try_parse_int(f[0], row.k))
      throw ConfigError("trace: bad k '" + f[0] + "'");
    if (!try_parse_double(f[1], row.f_x)) throw ConfigError("trace: bad f_x '" + f[1] + "'");
    if (!try_parse_double(f[2], row.best_f)) throw ConfigError("trace: bad best_f '" + f[2] + "'");
    row.eta = parse_opt_double(f[3], "eta");
    row.target = parse_opt_double(f[4], "target");
    row.g_dual_norm = parse_opt_double(f[5], "g_dual_norm");
    row.delta = parse_opt_double(f[6], "delta");
    row.sigma = parse_opt_double(f[7], "sigma");
    if (!f[8].empty()) {
      long long lv = 0;
      if (!try_parse_int(f[8], lv)) throw ConfigError("trace: bad level '" + f[8] + "'");
      row.level = lv;
    }
    row.certifier_residual = parse_opt_double(f[9], "certifier_residual");
    if (f[10] == "0")
      row.domain_violation = false;
    else if (f[10] == "1")
      row.domain_violation = true;
    else
      throw ConfigError("trace: bad domain_violation '" + f[10] + "'");
    rows.push_back(row);
  }
  return rows;
}

inline bool same_opt(const std::optional<double>& a, const std::optional<double>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || *a == *b;
}

// Columns a recomputed record must reproduce bitwise; certifier_residual is
// exempt because the re-run certifies every iteration regardless of the
// original cadence.
inline std::string mismatch_reason(const TraceRow& want, const IterationRecord& got) {
  auto opt = [](double v) -> std::optional<double> {
    if (std::isnan(v)) return std::nullopt;
    return v;
  };
  if (want.k != got.k) return "k";
  if (want.f_x != got.f_x) return "f_x";
  if (want.best_f != got.best_f) return "best_f";
  if (!same_opt(want.eta, opt(got.eta))) return "eta";
  if (!same_opt(want.target, opt(got.target))) return "target";
  if (!same_opt(want.g_dual_norm, opt(got.g_dual_norm))) return "g_dual_norm";
  if (!same_opt(want.delta, got.policy.delta)) return "delta";
  if (!same_opt(want.sigma, got.policy.sigma)) return "sigma";
  if (want.level != got.policy.level) return "level";
  if (want.domain_violation != got.domain_violation) return "domain_violation";
  return "";
}

}  // namespace detail

// Validates a recorded trace by replaying the run with certification forced
// on every iteration. Returns 0 when the trace matches bitwise and every
// residual clears -1e-9; 3 on any mismatch or certificate violation.
inline int cmd_certify(const std::string& trace_path, const std::string& config_path) {
  const std::vector<detail::TraceRow> rows = detail::parse_trace(trace_path);
  const ExperimentConfig cfg = parse_config(config_path);
  const ExperimentResult r = run_experiment(cfg, "", /*certify_every_override=*/1);

  if (rows.size() != r.run.history.size()) {
    std::cerr << "certify: trace has " << rows.size() << " rows but the re-run produced "
              << r.run.history.size() << '\n';
    return 3;
  }
  constexpr double kResidualTol = -1e-9;
  long long certified = 0;
  double min_residual = kInf;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string bad = detail::mismatch_reason(rows[i], r.run.history[i]);
    if (!bad.empty()) {
      std::cerr << "certify: row " << (i + 1) << " (k = " << rows[i].k
                << ") does not match the re-run in column '" << bad << "'\n";
      return 3;
    }
    if (r.run.history[i].certifier_residual) {
      const double res = *r.run.history[i].certifier_residual;
      ++certified;
      min_residual = std::min(min_residual, res);
      if (!(res >= kResidualTol)) {
        std::cerr << "certify: descent certificate violated at k = " << r.run.history[i].k
                  << " (residual = " << format_double(res) << ")\n";
        return 3;
      }
    }
  }
  std::cout << "certified " << certified << " iterations";
  if (certified > 0) std::cout << ", min residual = " << format_double(min_residual);
  std::cout << '\n';
  return 0;
}

}  // namespace pmd
