// Step-size policy state machines: classic Polyak (requires the optimal
// value), the adaptive-estimate policy (targets best-so-far minus an adaptive
// gap delta_k), and the subgradient-level policy (targets a per-group record
// minus a level delta_l, halving delta_l when a path budget is exhausted).
//
// Protocol per iteration: the caller updates the running record via
// *_observe(f(x_k)) BEFORE proposing, then proposes, steps, and closes the
// iteration with adaptive_feedback(f(x_{k+1})) resp. level_accumulate(eta, |g|_*).
#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <variant>

#include "pmd/errors.hpp"

namespace pmd {

// ── classic Polyak ──

// eta = (f(x) - f_star) / (c |g(x)|_*^2).
struct ClassicPolyakState {
  double f_star = 0.0;
  double c = 1.0;
};

inline ClassicPolyakState make_classic(double f_star, double c = 1.0) {
  if (!std::isfinite(f_star)) throw InvalidInput("classic policy: f_star must be finite");
  if (!(c > 0.5)) throw InvalidInput("classic policy: violates the requirement c > 1/2");
  return ClassicPolyakState{f_star, c};
}

inline double classic_eta(const ClassicPolyakState& st, double f_x, double g_dual_norm) {
  if (!(g_dual_norm > 0.0))
    throw InvalidInput("classic_eta: zero dual gradient norm, the run must terminate first");
  return (f_x - st.f_star) / (st.c * g_dual_norm * g_dual_norm);
}

// ── adaptive estimate ──

// target = best_f - delta_k; on success (f(x_{k+1}) <= target) delta grows by
// gamma, otherwise it shrinks to max(beta delta_k, delta_floor). delta_k >=
// delta_floor holds at all times, so every proposed eta is strictly positive.
struct AdaptiveEstimateState {
  double delta_floor = 1e-4;
  double delta_k = 0.1;
  double beta = 0.5;
  double gamma = 1.5;
  double c = 1.0;
  double best_f = std::numeric_limits<double>::infinity();
  double last_target = std::numeric_limits<double>::quiet_NaN();
};

inline AdaptiveEstimateState make_adaptive(double delta1, double delta_floor, double beta,
                                           double gamma, double c) {
  if (!(delta_floor > 0.0))
    throw InvalidInput("adaptive policy: violates the requirement delta_floor > 0");
  if (!(delta1 >= delta_floor))
    throw InvalidInput("adaptive policy: violates the requirement delta_1 >= delta_floor");
  if (!(beta < 1.0)) throw InvalidInput("adaptive policy: violates the requirement beta < 1");
  if (!(gamma >= 1.0)) throw InvalidInput("adaptive policy: violates the requirement gamma >= 1");
  if (!(c > 0.5)) throw InvalidInput("adaptive policy: violates the requirement c > 1/2");
  AdaptiveEstimateState st;
  st.delta_floor = delta_floor;
  st.delta_k = delta1;
  st.beta = beta;
  st.gamma = gamma;
  st.c = c;
  return st;
}

inline void adaptive_observe(AdaptiveEstimateState& st, double f_x) {
  st.best_f = std::min(st.best_f, f_x);
}

inline std::pair<double, double> adaptive_propose(AdaptiveEstimateState& st, double f_xk,
                                              double g_dual_norm) {
  if (!(g_dual_norm > 0.0))
    throw InvalidInput("adaptive_propose: zero dual gradient norm, the run must terminate first");
  const double target = st.best_f - st.delta_k;
  const double eta = (f_xk - target) / (st.c * g_dual_norm * g_dual_norm);
  st.last_target = target;
  return {eta, target};
}

inline void adaptive_feedback(AdaptiveEstimateState& st, double f_x_next) {
  if (std::isnan(st.last_target)) throw InvalidInput("adaptive_feedback: no pending proposal");
  if (f_x_next <= st.last_target)
    st.delta_k *= st.gamma;
  else
    st.delta_k = std::max(st.beta * st.delta_k, st.delta_floor);
  st.best_f = std::min(st.best_f, f_x_next);
}

// ── subgradient level ──

// Iterations are partitioned into groups; group_record snapshots the running
// record at the iteration the group began. A group ends either on sufficient
// improvement (f(x_k) <= group_record - delta_l / 2; delta kept) or on budget
// exhaustion (sigma > B; delta halved). The improvement test is checked
// first and at most one transition fires per iteration; sigma resets to
// exactly 0 at every transition.
struct SubgradientLevelState {
  double delta_l = 0.1;
  double sigma = 0.0;
  double budget = 20.0;
  double c = 1.0;
  long long level = 1;
  long long group_start_k = 1;
  double group_record = std::numeric_limits<double>::quiet_NaN();  // set at the first proposal
  double best_f = std::numeric_limits<double>::infinity();
};

inline SubgradientLevelState make_level(double delta1, double budget, double c) {
  if (!(delta1 > 0.0)) throw InvalidInput("level policy: violates the requirement delta_1 > 0");
  if (!(budget > 0.0)) throw InvalidInput("level policy: violates the requirement B > 0");
  if (!(c > 0.5)) throw InvalidInput("level policy: violates the requirement c > 1/2");
  SubgradientLevelState st;
  st.delta_l = delta1;
  st.budget = budget;
  st.c = c;
  return st;
}

inline void level_observe(SubgradientLevelState& st, double f_x) {
  st.best_f = std::min(st.best_f, f_x);
}

inline std::pair<double, double> level_propose(SubgradientLevelState& st, double f_xk,
                                              double g_dual_norm, long long iteration_k) {
  if (!(g_dual_norm > 0.0))
    throw InvalidInput("level_propose: zero dual gradient norm, the run must terminate first");
  if (std::isnan(st.group_record)) st.group_record = st.best_f;
  if (f_xk <= st.group_record - 0.5 * st.delta_l) {
    st.level += 1;
    st.group_start_k = iteration_k;
    st.group_record = st.best_f;
    st.sigma = 0.0;
  } else if (st.sigma > st.budget) {
    st.level += 1;
    st.group_start_k = iteration_k;
    st.group_record = st.best_f;
    st.sigma = 0.0;
    st.delta_l *= 0.5;
  }
  const double target = st.group_record - st.delta_l;
  const double eta = (f_xk - target) / (st.c * g_dual_norm * g_dual_norm);
  return {eta, target};
}

inline void level_accumulate(SubgradientLevelState& st, double eta, double g_dual_norm) {
  st.sigma += st.c * eta * g_dual_norm;
}

// ── policy-agnostic wrappers used by the solver ──

using PolicyState = std::variant<ClassicPolyakState, AdaptiveEstimateState, SubgradientLevelState>;

struct PolicySnapshot {
  std::optional<double> delta;
  std::optional<double> sigma;
  std::optional<long long> level;
};

inline void policy_observe(PolicyState& st, double f_x) {
  if (auto* a = std::get_if<AdaptiveEstimateState>(&st))
    adaptive_observe(*a, f_x);
  else if (auto* l = std::get_if<SubgradientLevelState>(&st))
    level_observe(*l, f_x);
}

// Returns (eta, target). The classic policy's target is f_star itself.
inline std::pair<double, double> policy_propose(PolicyState& st, double f_x, double g_dual_norm,
                                                long long iteration_k) {
  if (auto* cp = std::get_if<ClassicPolyakState>(&st))
    return {classic_eta(*cp, f_x, g_dual_norm), cp->f_star};
  if (auto* a = std::get_if<AdaptiveEstimateState>(&st)) return adaptive_propose(*a, f_x, g_dual_norm);
  return level_propose(std::get<SubgradientLevelState>(st), f_x, g_dual_norm, iteration_k);
}

inline void policy_feedback(PolicyState& st, double f_x_next, double eta, double g_dual_norm) {
  if (auto* a = std::get_if<AdaptiveEstimateState>(&st))
    adaptive_feedback(*a, f_x_next);
  else if (auto* l = std::get_if<SubgradientLevelState>(&st))
    level_accumulate(*l, eta, g_dual_norm);
}

inline PolicySnapshot policy_snapshot(const PolicyState& st) {
  PolicySnapshot snap;
  if (const auto* a = std::get_if<AdaptiveEstimateState>(&st)) {
    snap.delta = a->delta_k;
  } else if (const auto* l = std::get_if<SubgradientLevelState>(&st)) {
    snap.delta = l->delta_l;
    snap.sigma = l->sigma;
    snap.level = l->level;
  }
  return snap;
}

}  // namespace pmd
