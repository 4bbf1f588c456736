// Mirror-map geometry: Legendre potentials with their Bregman divergences,
// dual norms, feasible sets, and the mirror-step operation.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "pmd/errors.hpp"
#include "pmd/vec.hpp"

namespace pmd {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class MapKind { Euclidean, NegativeEntropy };
enum class FeasibleSet { FullSpace, ProbabilitySimplex };
enum class PrimalNorm { L2, L1 };

// Geometry bundle: the potential kind, the feasible set, and the norm the
// potential is 1-strongly convex in. NegativeEntropy is only valid on the
// probability simplex and is 1-strongly convex in the l1 norm there;
// Euclidean pairs with the l2 norm.
struct MirrorMap {
  MapKind kind;
  FeasibleSet feasible_set;
  PrimalNorm primal_norm_id;
};

inline MirrorMap euclidean_map(FeasibleSet fs = FeasibleSet::FullSpace) {
  return MirrorMap{MapKind::Euclidean, fs, PrimalNorm::L2};
}

inline MirrorMap entropic_map() {
  return MirrorMap{MapKind::NegativeEntropy, FeasibleSet::ProbabilitySimplex, PrimalNorm::L1};
}

// ── potential and divergence ──

// h(x); 0 ln 0 = 0, and +inf outside the closure of dom h.
inline double h_value(const MirrorMap& map, const Vec& x) {
  check_finite(x, "h_value");
  if (map.kind == MapKind::Euclidean) {
    double s = 0.0;
    for (double xi : x) s += xi * xi;
    return 0.5 * s;
  }
  double s = 0.0;
  for (double xi : x) {
    if (xi < 0.0) return kInf;
    if (xi > 0.0) s += xi * std::log(xi);
  }
  return s;
}

// D_h(x, y) = h(x) - h(y) - <grad h(y), x - y>, always >= 0. The entropic
// case is evaluated as sum_i [x_i ln(x_i / y_i) - x_i + y_i]: the linear
// terms of the definition cancel analytically, the value agrees with the
// three-term form for every x >= 0, y > 0, and it reduces to KL divergence
// on the simplex. D_h(x, x) is exactly 0.
inline double bregman(const MirrorMap& map, const Vec& x, const Vec& y) {
  check_dim(y, x.size(), "bregman");
  check_finite(x, "bregman");
  check_finite(y, "bregman");
  if (map.kind == MapKind::Euclidean) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - y[i];
      s += d * d;
    }
    return 0.5 * s;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] <= 0.0) throw DomainError("bregman: second argument on the boundary of dom h");
    if (x[i] < 0.0) throw DomainError("bregman: first argument outside the closure of dom h");
    if (x[i] > 0.0)
      s += x[i] * std::log(x[i] / y[i]) - x[i] + y[i];
    else
      s += y[i];
  }
  return s;
}

// Norm dual to the primal norm: l2 is self-dual, l-infinity is dual to l1.
inline double dual_norm(const MirrorMap& map, const Vec& v) {
  check_finite(v, "dual_norm");
  return map.primal_norm_id == PrimalNorm::L2 ? norm_l2(v) : norm_linf(v);
}

// ── feasible-set operations ──

// Euclidean projection onto the probability simplex, sort-then-threshold.
// Output entries sum to 1 and may contain exact zeros.
inline Vec simplex_project(const Vec& v) {
  check_finite(v, "simplex_project");
  if (v.empty()) throw InvalidInput("simplex_project: empty vector");
  Vec u = v;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0;
  double cum_at_rho = u[0];
  std::size_t rho = 1;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cum += u[j];
    if (u[j] + (1.0 - cum) / static_cast<double>(j + 1) > 0.0) {
      rho = j + 1;
      cum_at_rho = cum;
    }
  }
  const double theta = (1.0 - cum_at_rho) / static_cast<double>(rho);
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] + theta, 0.0);
  return out;
}

// T(x; eta): the minimizer of <g, y - x> + D_h(y, x) / eta over the feasible
// set. Euclidean full space is the plain gradient step; Euclidean simplex
// projects it; NegativeEntropy is the multiplicative update
// x_i exp(-eta g_i) renormalized, computed in the log domain with max
// subtraction. No positivity floor is applied: the exact renormalized values
// are kept, and underflow to zero raises DomainError instead of clamping.
inline Vec mirror_step(const MirrorMap& map, const Vec& x, const Vec& g, double eta) {
  check_dim(g, x.size(), "mirror_step");
  check_finite(x, "mirror_step");
  check_finite(g, "mirror_step");
  if (!(eta > 0.0)) throw InvalidInput("mirror_step: eta must be positive");
  if (map.kind == MapKind::Euclidean) {
    Vec v(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) v[i] = x[i] - eta * g[i];
    return map.feasible_set == FeasibleSet::ProbabilitySimplex ? simplex_project(v) : v;
  }
  Vec t(x.size());
  double m = -kInf;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0.0) throw DomainError("mirror_step: x outside the interior of dom h");
    t[i] = std::log(x[i]) - eta * g[i];
    m = std::max(m, t[i]);
  }
  Vec out(x.size());
  double z = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::exp(t[i] - m);
    z += out[i];
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] /= z;
    if (out[i] <= 0.0) throw DomainError("mirror_step: multiplicative update underflowed to zero");
  }
  return out;
}

}  // namespace pmd
