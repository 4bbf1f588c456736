// Outer mirror-descent loop: evaluate, record, propose, step, certify, close
// the iteration with policy feedback. Domain errors from the objective or the
// step terminate the run as DomainViolation, a recorded outcome rather than a
// crash, so boundary stalling is observable as a first-class result.
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "pmd/geometry.hpp"
#include "pmd/objectives.hpp"
#include "pmd/policies.hpp"

namespace pmd {

enum class Termination { ZeroGradient, MaxIterations, TargetReached, DomainViolation };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::ZeroGradient: return "ZeroGradient";
    case Termination::MaxIterations: return "MaxIterations";
    case Termination::TargetReached: return "TargetReached";
    case Termination::DomainViolation: return "DomainViolation";
  }
  return "?";
}

// One row of run history. Fields not reached before termination stay NaN
// (written as empty CSV cells). The policy snapshot is taken immediately
// after the proposal, so it reflects the values the step was computed with.
struct IterationRecord {
  long long k = 0;
  double f_x = 0.0;  // +inf on the row where a domain violation surfaced
  Vec x;
  double best_f = 0.0;
  double g_dual_norm = std::numeric_limits<double>::quiet_NaN();
  double eta = std::numeric_limits<double>::quiet_NaN();
  double target = std::numeric_limits<double>::quiet_NaN();
  PolicySnapshot policy;
  std::optional<double> certifier_residual;
  bool domain_violation = false;
};

struct RunConfig {
  long long max_iterations = 1000;
  double zero_grad_tol = 1e-14;
  std::optional<Vec> initial_point;  // default: simplex barycenter / origin
  long long certify_every = 0;       // 0 = off
  std::optional<double> target_gap;  // stop when best_f - f_star_reference <= target_gap
  std::optional<double> f_star_reference;
  long long seed = 0;  // recorded for reproducibility; the loop itself is deterministic
};

struct RunResult {
  std::vector<IterationRecord> history;
  double best_f = std::numeric_limits<double>::infinity();
  Vec best_x;
  Termination termination = Termination::MaxIterations;
};

// Residual of the per-step descent certificate
//   eta (f(x) - f(y)) <= D_h(y, x) - D_h(y, x_plus) + eta^2 |g(x)|_*^2 / 2,
// nonnegative for every feasible y in the interior of dom h whenever x_plus
// is the mirror step from x.
inline double certify_descent(const MirrorMap& map, const Vec& x, const Vec& x_plus, double eta,
                              const Vec& g, double f_x, const Vec& y, double f_y) {
  const double gn = dual_norm(map, g);
  return bregman(map, y, x) - bregman(map, y, x_plus) + 0.5 * eta * eta * gn * gn -
         eta * (f_x - f_y);
}

inline Vec default_initial_point(const Objective& obj, const MirrorMap& map) {
  if (map.feasible_set == FeasibleSet::ProbabilitySimplex) return barycenter(obj.dim);
  return Vec(obj.dim, 0.0);
}

inline RunResult run(const Objective& obj, const MirrorMap& map, PolicyState policy,
                     const RunConfig& cfg) {
  if (cfg.max_iterations < 1) throw InvalidInput("run: max_iterations must be >= 1");
  if (cfg.certify_every < 0) throw InvalidInput("run: certify_every must be >= 0");
  if (!(cfg.zero_grad_tol >= 0.0)) throw InvalidInput("run: zero_grad_tol must be >= 0");
  if (map.kind == MapKind::NegativeEntropy && map.feasible_set != FeasibleSet::ProbabilitySimplex)
    throw InvalidInput("run: the entropic map requires the probability simplex");

  Vec x = cfg.initial_point ? *cfg.initial_point : default_initial_point(obj, map);
  check_dim(x, obj.dim, "run: initial point");
  check_finite(x, "run: initial point");
  if (map.feasible_set == FeasibleSet::ProbabilitySimplex) {
    double s = 0.0;
    for (double xi : x) {
      if (xi < 0.0) throw InvalidInput("run: initial point outside the simplex");
      s += xi;
    }
    if (std::abs(s - 1.0) > 1e-9) throw InvalidInput("run: initial point must sum to 1");
  }
  if (map.kind == MapKind::NegativeEntropy)
    for (double xi : x)
      if (!(xi > 0.0))
        throw InvalidInput("run: initial point must be strictly positive for the entropic map");

  double f_x = eval(obj, x);
  if (!std::isfinite(f_x)) throw InvalidInput("run: objective not finite at the initial point");

  RunResult res;
  res.history.reserve(static_cast<std::size_t>(std::min<long long>(cfg.max_iterations, 1 << 21)));
  res.best_x = x;
  const Vec bary = barycenter(obj.dim);

  for (long long k = 1; k <= cfg.max_iterations; ++k) {
    IterationRecord rec;
    rec.k = k;
    rec.f_x = f_x;
    rec.x = x;
    if (f_x < res.best_f) {
      res.best_f = f_x;
      res.best_x = x;
    }
    rec.best_f = res.best_f;

    if (cfg.target_gap && cfg.f_star_reference &&
        res.best_f - *cfg.f_star_reference <= *cfg.target_gap) {
      res.history.push_back(std::move(rec));
      res.termination = Termination::TargetReached;
      return res;
    }

    Vec g;
    try {
      g = subgrad(obj, x);
    } catch (const DomainError&) {
      rec.domain_violation = true;
      res.history.push_back(std::move(rec));
      res.termination = Termination::DomainViolation;
      return res;
    }
    const double gn = dual_norm(map, g);
    rec.g_dual_norm = gn;
    if (gn <= cfg.zero_grad_tol) {
      res.history.push_back(std::move(rec));
      res.termination = Termination::ZeroGradient;
      return res;
    }

    policy_observe(policy, f_x);
    const auto [eta, target] = policy_propose(policy, f_x, gn, k);
    rec.eta = eta;
    rec.target = target;
    rec.policy = policy_snapshot(policy);

    // Only the classic policy can propose eta <= 0 (iterate already at or
    // below its target); the iterate then stays put.
    double f_next = f_x;
    if (eta > 0.0) {
      Vec x_next;
      try {
        x_next = mirror_step(map, x, g, eta);
      } catch (const DomainError&) {
        rec.domain_violation = true;
        res.history.push_back(std::move(rec));
        res.termination = Termination::DomainViolation;
        return res;
      }
      if (cfg.certify_every > 0 && k % cfg.certify_every == 0) {
        Vec y = res.best_x;
        if (map.feasible_set == FeasibleSet::ProbabilitySimplex) {
          bool boundary = false;
          for (double yi : y)
            if (yi <= 0.0) boundary = true;
          if (boundary)
            for (std::size_t i = 0; i < y.size(); ++i)
              y[i] = (1.0 - 1e-6) * y[i] + 1e-6 * bary[i];
        }
        const double f_y = eval(obj, y);
        rec.certifier_residual = certify_descent(map, x, x_next, eta, g, f_x, y, f_y);
      }
      x = std::move(x_next);
      f_next = eval(obj, x);
    }
    policy_feedback(policy, f_next, eta > 0.0 ? eta : 0.0, gn);
    f_x = f_next;
    res.history.push_back(std::move(rec));
  }
  res.termination = Termination::MaxIterations;
  return res;
}

}  // namespace pmd
