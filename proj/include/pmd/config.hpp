// Experiment configuration: flat "section.key = value" text with '#'
// comments. Unknown and duplicate keys are errors (fail-closed), the policy
// parameter requirements are enforced at parse time, and serialize/parse
// round-trips to an equivalent config.
#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pmd/errors.hpp"
#include "pmd/geometry.hpp"
#include "pmd/objectives.hpp"
#include "pmd/solver.hpp"
#include "pmd/textio.hpp"

namespace pmd {

struct ExperimentConfig {
  std::string problem_kind;  // kelly | linear | synthetic
  Objective objective;
  MirrorMap map{};
  std::string policy_kind = "adaptive";  // classic | adaptive | level
  double c = 1.0;
  std::optional<double> f_star;  // classic policy; alternative: f_star_auto
  bool f_star_auto = false;
  double delta1 = 0.1;
  double delta_floor = 1e-4;
  double beta = 0.5;
  double gamma = 1.5;
  double budget = 20.0;
  RunConfig run;
  std::string output_prefix = "run";
};

namespace detail {

inline const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys = {
      "problem.kind",       "problem.returns",   "problem.probs",     "problem.cost",
      "problem.anchors",    "problem.weights",   "map.kind",          "map.feasible",
      "policy.kind",        "policy.c",          "policy.f_star",     "policy.delta1",
      "policy.delta_floor", "policy.beta",       "policy.gamma",      "policy.budget",
      "run.max_iterations", "run.zero_grad_tol", "run.initial_point", "run.certify_every",
      "run.target_gap",     "run.seed",          "output.prefix"};
  return keys;
}

struct KvReader {
  std::map<std::string, std::string> kv;

  bool has(const std::string& key) const { return kv.count(key) > 0; }

  std::string raw(const std::string& key) const { return kv.at(key); }

  double number(const std::string& key) const {
    double v = 0.0;
    if (!try_parse_double(kv.at(key), v))
      throw ConfigError(key + ": cannot parse '" + kv.at(key) + "' as a number");
    return v;
  }

  long long integer(const std::string& key) const {
    long long v = 0;
    if (!try_parse_int(kv.at(key), v))
      throw ConfigError(key + ": cannot parse '" + kv.at(key) + "' as an integer");
    return v;
  }

  Vec vector(const std::string& key) const {
    Vec v;
    for (const std::string& tok : split_ws(kv.at(key))) {
      double x = 0.0;
      if (!try_parse_double(tok, x))
        throw ConfigError(key + ": cannot parse '" + tok + "' as a number");
      v.push_back(x);
    }
    if (v.empty()) throw ConfigError(key + ": empty vector");
    return v;
  }

  std::vector<Vec> matrix(const std::string& key) const {
    std::vector<Vec> rows;
    for (const std::string& part : split(kv.at(key), ';')) {
      Vec row;
      for (const std::string& tok : split_ws(part)) {
        double x = 0.0;
        if (!try_parse_double(tok, x))
          throw ConfigError(key + ": cannot parse '" + tok + "' as a number");
        row.push_back(x);
      }
      if (row.empty()) throw ConfigError(key + ": empty matrix row");
      rows.push_back(std::move(row));
    }
    return rows;
  }
};

inline std::string join_vector(const Vec& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += format_double(v[i]);
  }
  return s;
}

inline std::string join_matrix(const std::vector<Vec>& rows) {
  std::string s;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (r) s += " ; ";
    s += join_vector(rows[r]);
  }
  return s;
}

}  // namespace detail

inline ExperimentConfig parse_config_text(const std::string& text) {
  detail::KvReader reader;
  std::istringstream in(text);
  std::string line;
  long long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    const auto& known = detail::known_config_keys();
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("unknown key '" + key + "'");
    if (value.empty()) throw ConfigError(key + ": empty value");
    if (!reader.kv.emplace(key, value).second) throw ConfigError("duplicate key '" + key + "'");
  }

  ExperimentConfig cfg;

  // problem
  if (!reader.has("problem.kind")) throw ConfigError("missing required key 'problem.kind'");
  cfg.problem_kind = reader.raw("problem.kind");
  auto forbid = [&](const char* key, const char* kind) {
    if (reader.has(key))
      throw ConfigError(std::string(key) + " only applies to problem.kind = " + kind);
  };
  try {
    if (cfg.problem_kind == "kelly") {
      if (!reader.has("problem.returns") || !reader.has("problem.probs"))
        throw ConfigError("problem.kind = kelly requires problem.returns and problem.probs");
      forbid("problem.cost", "linear");
      forbid("problem.anchors", "synthetic");
      forbid("problem.weights", "synthetic");
      cfg.objective = make_kelly(reader.matrix("problem.returns"), reader.vector("problem.probs"));
    } else if (cfg.problem_kind == "linear") {
      if (!reader.has("problem.cost"))
        throw ConfigError("problem.kind = linear requires problem.cost");
      forbid("problem.returns", "kelly");
      forbid("problem.probs", "kelly");
      forbid("problem.anchors", "synthetic");
      forbid("problem.weights", "synthetic");
      cfg.objective = make_linear_on_simplex(reader.vector("problem.cost"));
    } else if (cfg.problem_kind == "synthetic") {
      if (!reader.has("problem.anchors") || !reader.has("problem.weights"))
        throw ConfigError("problem.kind = synthetic requires problem.anchors and problem.weights");
      forbid("problem.returns", "kelly");
      forbid("problem.probs", "kelly");
      forbid("problem.cost", "linear");
      cfg.objective =
          make_synthetic(reader.matrix("problem.anchors"), reader.vector("problem.weights"));
    } else {
      throw ConfigError("problem.kind must be kelly, linear, or synthetic");
    }
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("invalid problem: ") + e.what());
  }

  // map; defaults follow the problem (simplex problems get the entropic map)
  const bool simplex_problem = cfg.problem_kind != "synthetic";
  std::string map_kind = reader.has("map.kind") ? reader.raw("map.kind")
                                                : (simplex_problem ? "entropic" : "euclidean");
  std::string feasible = reader.has("map.feasible") ? reader.raw("map.feasible")
                                                    : (simplex_problem ? "simplex" : "fullspace");
  if (map_kind != "entropic" && map_kind != "euclidean")
    throw ConfigError("map.kind must be euclidean or entropic");
  if (feasible != "simplex" && feasible != "fullspace")
    throw ConfigError("map.feasible must be fullspace or simplex");
  if (simplex_problem && feasible != "simplex")
    throw ConfigError("problem.kind = " + cfg.problem_kind + " requires map.feasible = simplex");
  if (!simplex_problem && feasible != "fullspace")
    throw ConfigError("problem.kind = synthetic requires map.feasible = fullspace");
  if (map_kind == "entropic" && feasible != "simplex")
    throw ConfigError("the entropic map requires map.feasible = simplex");
  cfg.map = map_kind == "entropic"
                ? entropic_map()
                : euclidean_map(feasible == "simplex" ? FeasibleSet::ProbabilitySimplex
                                                      : FeasibleSet::FullSpace);

  // policy; all parameter keys are accepted regardless of policy.kind so one
  // config can drive compare mode, and every requirement is checked here.
  if (reader.has("policy.kind")) cfg.policy_kind = reader.raw("policy.kind");
  if (cfg.policy_kind != "classic" && cfg.policy_kind != "adaptive" && cfg.policy_kind != "level")
    throw ConfigError("policy.kind must be classic, adaptive, or level");
  if (reader.has("policy.c")) cfg.c = reader.number("policy.c");
  if (reader.has("policy.delta1")) cfg.delta1 = reader.number("policy.delta1");
  if (reader.has("policy.delta_floor")) cfg.delta_floor = reader.number("policy.delta_floor");
  if (reader.has("policy.beta")) cfg.beta = reader.number("policy.beta");
  if (reader.has("policy.gamma")) cfg.gamma = reader.number("policy.gamma");
  if (reader.has("policy.budget")) cfg.budget = reader.number("policy.budget");
  if (reader.has("policy.f_star")) {
    if (reader.raw("policy.f_star") == "auto")
      cfg.f_star_auto = true;
    else
      cfg.f_star = reader.number("policy.f_star");
  }
  if (!(cfg.c > 0.5))
    throw ConfigError("policy.c = " + format_double(cfg.c) + " violates the requirement c > 1/2");
  if (!(cfg.delta1 > 0.0))
    throw ConfigError("policy.delta1 = " + format_double(cfg.delta1) +
                      " violates the requirement delta_1 > 0");
  if (!(cfg.delta_floor > 0.0))
    throw ConfigError("policy.delta_floor = " + format_double(cfg.delta_floor) +
                      " violates the requirement delta_floor > 0");
  if (!(cfg.delta1 >= cfg.delta_floor))
    throw ConfigError("policy.delta1 = " + format_double(cfg.delta1) +
                      " violates the requirement delta_1 >= delta_floor");
  if (!(cfg.beta < 1.0))
    throw ConfigError("policy.beta = " + format_double(cfg.beta) +
                      " violates the requirement beta < 1");
  if (!(cfg.gamma >= 1.0))
    throw ConfigError("policy.gamma = " + format_double(cfg.gamma) +
                      " violates the requirement gamma >= 1");
  if (!(cfg.budget > 0.0))
    throw ConfigError("policy.budget = " + format_double(cfg.budget) +
                      " violates the requirement B > 0");
  if (cfg.policy_kind == "classic" && cfg.f_star && !std::isfinite(*cfg.f_star))
    throw ConfigError("policy.f_star must be finite");

  // run
  if (reader.has("run.max_iterations")) cfg.run.max_iterations = reader.integer("run.max_iterations");
  if (cfg.run.max_iterations < 1) throw ConfigError("run.max_iterations must be >= 1");
  if (reader.has("run.zero_grad_tol")) cfg.run.zero_grad_tol = reader.number("run.zero_grad_tol");
  if (!(cfg.run.zero_grad_tol >= 0.0)) throw ConfigError("run.zero_grad_tol must be >= 0");
  if (reader.has("run.certify_every")) cfg.run.certify_every = reader.integer("run.certify_every");
  if (cfg.run.certify_every < 0) throw ConfigError("run.certify_every must be >= 0");
  if (reader.has("run.target_gap")) {
    cfg.run.target_gap = reader.number("run.target_gap");
    if (!(*cfg.run.target_gap > 0.0)) throw ConfigError("run.target_gap must be > 0");
  }
  if (reader.has("run.seed")) cfg.run.seed = reader.integer("run.seed");
  if (reader.has("run.initial_point")) {
    Vec x0 = reader.vector("run.initial_point");
    if (x0.size() != cfg.objective.dim)
      throw ConfigError("run.initial_point: dimension mismatch with the problem");
    check_finite(x0, "run.initial_point");
    if (cfg.map.feasible_set == FeasibleSet::ProbabilitySimplex) {
      double s = 0.0;
      for (double xi : x0) {
        if (xi < 0.0) throw ConfigError("run.initial_point: outside the simplex");
        s += xi;
      }
      if (std::abs(s - 1.0) > 1e-9) throw ConfigError("run.initial_point: must sum to 1");
      if (cfg.map.kind == MapKind::NegativeEntropy)
        for (double xi : x0)
          if (!(xi > 0.0))
            throw ConfigError(
                "run.initial_point: must be strictly positive for the entropic map");
    }
    cfg.run.initial_point = std::move(x0);
  }

  // output
  if (reader.has("output.prefix")) cfg.output_prefix = reader.raw("output.prefix");
  if (cfg.output_prefix.empty()) throw ConfigError("output.prefix must be nonempty");

  return cfg;
}

inline ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

inline std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "problem.kind = " << cfg.problem_kind << "\n";
  switch (cfg.objective.kind) {
    case ObjectiveKind::Kelly:
      out << "problem.returns = " << detail::join_matrix(cfg.objective.returns) << "\n";
      out << "problem.probs = " << detail::join_vector(cfg.objective.probs) << "\n";
      break;
    case ObjectiveKind::LinearOnSimplex:
      out << "problem.cost = " << detail::join_vector(cfg.objective.cost) << "\n";
      break;
    case ObjectiveKind::SyntheticPiecewiseLinear:
      out << "problem.anchors = " << detail::join_matrix(cfg.objective.anchors) << "\n";
      out << "problem.weights = " << detail::join_vector(cfg.objective.weights) << "\n";
      break;
  }
  out << "map.kind = " << (cfg.map.kind == MapKind::NegativeEntropy ? "entropic" : "euclidean")
      << "\n";
  out << "map.feasible = "
      << (cfg.map.feasible_set == FeasibleSet::ProbabilitySimplex ? "simplex" : "fullspace")
      << "\n";
  out << "policy.kind = " << cfg.policy_kind << "\n";
  out << "policy.c = " << format_double(cfg.c) << "\n";
  if (cfg.f_star_auto)
    out << "policy.f_star = auto\n";
  else if (cfg.f_star)
    out << "policy.f_star = " << format_double(*cfg.f_star) << "\n";
  out << "policy.delta1 = " << format_double(cfg.delta1) << "\n";
  out << "policy.delta_floor = " << format_double(cfg.delta_floor) << "\n";
  out << "policy.beta = " << format_double(cfg.beta) << "\n";
  out << "policy.gamma = " << format_double(cfg.gamma) << "\n";
  out << "policy.budget = " << format_double(cfg.budget) << "\n";
  out << "run.max_iterations = " << cfg.run.max_iterations << "\n";
  out << "run.zero_grad_tol = " << format_double(cfg.run.zero_grad_tol) << "\n";
  out << "run.certify_every = " << cfg.run.certify_every << "\n";
  if (cfg.run.target_gap) out << "run.target_gap = " << format_double(*cfg.run.target_gap) << "\n";
  if (cfg.run.initial_point)
    out << "run.initial_point = " << detail::join_vector(*cfg.run.initial_point) << "\n";
  out << "run.seed = " << cfg.run.seed << "\n";
  out << "output.prefix = " << cfg.output_prefix << "\n";
  return out.str();
}

}  // namespace pmd
