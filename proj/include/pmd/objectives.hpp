// Convex objective instances with extended-real evaluation and subgradient
// oracles. eval may return +inf as a first-class value (the iterate left the
// effective domain); subgrad at such points throws DomainError so the solver
// can observe and report the violation instead of crashing.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "pmd/errors.hpp"
#include "pmd/geometry.hpp"
#include "pmd/vec.hpp"

namespace pmd {

enum class ObjectiveKind { Kelly, LinearOnSimplex, SyntheticPiecewiseLinear };

struct Objective {
  ObjectiveKind kind{};
  std::size_t dim = 0;
  std::vector<Vec> returns;  // Kelly rows a_i, nonnegative and nonzero
  Vec probs;                 // Kelly outcome probabilities, sum to 1
  Vec cost;                  // LinearOnSimplex cost vector
  std::vector<Vec> anchors;  // SyntheticPiecewiseLinear anchor points
  Vec weights;               //   one positive weight per anchor
};

// Validated constructor for the log-growth portfolio objective
// f(x) = sum_i p_i (-ln <a_i, x>) on the simplex.
inline Objective make_kelly(const std::vector<Vec>& returns, const Vec& probs) {
  if (returns.empty()) throw InvalidInput("make_kelly: at least one return row required");
  const std::size_t d = returns.front().size();
  if (d == 0) throw InvalidInput("make_kelly: empty return row");
  if (probs.size() != returns.size())
    throw InvalidInput("make_kelly: probs length must match the number of return rows");
  check_finite(probs, "make_kelly");
  double psum = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw InvalidInput("make_kelly: negative probability");
    psum += p;
  }
  if (std::abs(psum - 1.0) > 1e-9)
    throw InvalidInput("make_kelly: probabilities must sum to 1 within 1e-9");
  for (const Vec& row : returns) {
    if (row.size() != d) throw InvalidInput("make_kelly: ragged return matrix");
    check_finite(row, "make_kelly");
    double rowmax = 0.0;
    for (double a : row) {
      if (a < 0.0) throw InvalidInput("make_kelly: negative return entry");
      rowmax = std::max(rowmax, a);
    }
    if (rowmax == 0.0) throw InvalidInput("make_kelly: zero return row");
  }
  Objective o;
  o.kind = ObjectiveKind::Kelly;
  o.dim = d;
  o.returns = returns;
  o.probs = probs;
  return o;
}

inline Objective make_linear_on_simplex(const Vec& cost) {
  if (cost.empty()) throw InvalidInput("make_linear_on_simplex: empty cost vector");
  check_finite(cost, "make_linear_on_simplex");
  Objective o;
  o.kind = ObjectiveKind::LinearOnSimplex;
  o.dim = cost.size();
  o.cost = cost;
  return o;
}

// f(x) = sum_j w_j ||x - anchor_j||_1 on the full space.
inline Objective make_synthetic(const std::vector<Vec>& anchors, const Vec& weights) {
  if (anchors.empty()) throw InvalidInput("make_synthetic: at least one anchor required");
  const std::size_t d = anchors.front().size();
  if (d == 0) throw InvalidInput("make_synthetic: empty anchor");
  if (weights.size() != anchors.size())
    throw InvalidInput("make_synthetic: weights length must match the number of anchors");
  check_finite(weights, "make_synthetic");
  for (double w : weights)
    if (!(w > 0.0)) throw InvalidInput("make_synthetic: weights must be positive");
  for (const Vec& a : anchors) {
    if (a.size() != d) throw InvalidInput("make_synthetic: ragged anchor matrix");
    check_finite(a, "make_synthetic");
  }
  Objective o;
  o.kind = ObjectiveKind::SyntheticPiecewiseLinear;
  o.dim = d;
  o.anchors = anchors;
  o.weights = weights;
  return o;
}

// Extended-real evaluation; +inf exactly when min_i <a_i, x> <= 0 for Kelly.
inline double eval(const Objective& obj, const Vec& x) {
  check_dim(x, obj.dim, "eval");
  check_finite(x, "eval");
  switch (obj.kind) {
    case ObjectiveKind::Kelly: {
      double s = 0.0;
      for (std::size_t r = 0; r < obj.returns.size(); ++r) {
        const double ip = dot(obj.returns[r], x);
        if (ip <= 0.0) return kInf;
        s -= obj.probs[r] * std::log(ip);
      }
      return s;
    }
    case ObjectiveKind::LinearOnSimplex:
      return dot(obj.cost, x);
    case ObjectiveKind::SyntheticPiecewiseLinear: {
      double s = 0.0;
      for (std::size_t j = 0; j < obj.anchors.size(); ++j) {
        double t = 0.0;
        for (std::size_t i = 0; i < obj.dim; ++i) t += std::abs(x[i] - obj.anchors[j][i]);
        s += obj.weights[j] * t;
      }
      return s;
    }
  }
  throw InvalidInput("eval: unknown objective kind");
}

// Subgradient selection. Kelly is differentiable on its effective domain;
// the synthetic problem uses sign(0) = 0, a fixed valid selection.
inline Vec subgrad(const Objective& obj, const Vec& x) {
  check_dim(x, obj.dim, "subgrad");
  check_finite(x, "subgrad");
  switch (obj.kind) {
    case ObjectiveKind::Kelly: {
      Vec g(obj.dim, 0.0);
      for (std::size_t r = 0; r < obj.returns.size(); ++r) {
        const double ip = dot(obj.returns[r], x);
        if (ip <= 0.0)
          throw DomainError("subgrad: nonpositive inner product <a_i, x>, objective undefined here");
        const double w = obj.probs[r] / ip;
        for (std::size_t i = 0; i < obj.dim; ++i) g[i] -= w * obj.returns[r][i];
      }
      return g;
    }
    case ObjectiveKind::LinearOnSimplex:
      return obj.cost;
    case ObjectiveKind::SyntheticPiecewiseLinear: {
      Vec g(obj.dim, 0.0);
      for (std::size_t j = 0; j < obj.anchors.size(); ++j) {
        for (std::size_t i = 0; i < obj.dim; ++i) {
          const double d = x[i] - obj.anchors[j][i];
          if (d > 0.0)
            g[i] += obj.weights[j];
          else if (d < 0.0)
            g[i] -= obj.weights[j];
        }
      }
      return g;
    }
  }
  throw InvalidInput("subgrad: unknown objective kind");
}

}  // namespace pmd
