// Shared helpers for the unit and acceptance suites: seeded generators,
// random problem instances, finite differences, and straight-line reference
// transcriptions of the two adaptive step-size state machines. The
// transcriptions are intentionally independent of include/pmd/policies.hpp
// so replay comparisons are meaningful.
#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "pmd/objectives.hpp"
#include "pmd/vec.hpp"

namespace pmdtest {

inline std::mt19937 seeded(unsigned seed) { return std::mt19937(seed); }

// Uniform Dirichlet-style draw, redrawn until every coordinate clears
// min_coord; exact for tests that need strictly interior points.
inline pmd::Vec random_simplex_interior(std::mt19937& gen, std::size_t d,
                                        double min_coord = 1e-6) {
  std::exponential_distribution<double> exp1(1.0);
  while (true) {
    pmd::Vec x(d);
    double s = 0.0;
    for (double& xi : x) {
      xi = exp1(gen);
      s += xi;
    }
    bool ok = true;
    for (double& xi : x) {
      xi /= s;
      ok = ok && xi >= min_coord;
    }
    if (ok) return x;
  }
}

inline pmd::Vec central_diff_grad(const pmd::Objective& obj, const pmd::Vec& x,
                                  double h = 1e-6) {
  pmd::Vec g(x.size());
  pmd::Vec xp = x, xm = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    g[i] = (pmd::eval(obj, xp) - pmd::eval(obj, xm)) / (2.0 * h);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return g;
}

inline double rel_linf_err(const pmd::Vec& approx, const pmd::Vec& exact) {
  double num = 0.0, den = 1.0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    num = std::max(num, std::abs(approx[i] - exact[i]));
    den = std::max(den, std::abs(exact[i]));
  }
  return num / den;
}

// Random portfolio instance with every outcome row bounded away from zero,
// so the objective is finite on the interior of the simplex.
inline pmd::Objective random_kelly(std::mt19937& gen, std::size_t dmax = 5,
                                   std::size_t nmax = 8) {
  std::uniform_int_distribution<std::size_t> dim_dist(2, dmax);
  std::uniform_int_distribution<std::size_t> n_dist(1, nmax);
  std::uniform_real_distribution<double> entry(0.0, 2.0);
  std::uniform_real_distribution<double> weight(0.01, 1.0);
  const std::size_t d = dim_dist(gen);
  const std::size_t n = n_dist(gen);
  std::vector<pmd::Vec> returns(n);
  for (pmd::Vec& row : returns) {
    do {
      row.assign(d, 0.0);
      double mx = 0.0;
      for (double& v : row) {
        v = entry(gen);
        mx = std::max(mx, v);
      }
      if (mx >= 1e-3) break;
    } while (true);
  }
  pmd::Vec probs(n);
  double s = 0.0;
  for (double& p : probs) {
    p = weight(gen);
    s += p;
  }
  for (double& p : probs) p /= s;
  // Renormalize exactly: push any rounding slack into the largest entry.
  double resid = 1.0;
  std::size_t imax = 0;
  for (std::size_t i = 0; i < n; ++i) {
    resid -= probs[i];
    if (probs[i] > probs[imax]) imax = i;
  }
  probs[imax] += resid;
  return pmd::make_kelly(returns, probs);
}

// ── reference transcriptions of the adaptive policies ──
// Call order per solver iteration: observe(f), propose(f, gn, k), then
// feedback/accumulate once the post-step value is known.

struct AdaptiveRef {
  double delta_floor, delta, beta, gamma, c;
  double best = std::numeric_limits<double>::infinity();
  double pending_target = std::numeric_limits<double>::quiet_NaN();

  AdaptiveRef(double delta1, double floor_, double beta_, double gamma_, double c_)
      : delta_floor(floor_), delta(delta1), beta(beta_), gamma(gamma_), c(c_) {}

  void observe(double f) { best = std::min(best, f); }

  std::pair<double, double> propose(double f, double gn) {
    const double target = best - delta;
    pending_target = target;
    return {(f - target) / (c * gn * gn), target};
  }

  void feedback(double f_next) {
    if (f_next <= pending_target)
      delta *= gamma;
    else
      delta = std::max(beta * delta, delta_floor);
    best = std::min(best, f_next);
  }
};

struct LevelRef {
  double delta, budget, c;
  double sigma = 0.0;
  long long level = 1;
  long long group_start_k = 1;
  double group_record = std::numeric_limits<double>::quiet_NaN();
  double best = std::numeric_limits<double>::infinity();

  LevelRef(double delta1, double budget_, double c_) : delta(delta1), budget(budget_), c(c_) {}

  void observe(double f) { best = std::min(best, f); }

  std::pair<double, double> propose(double f, double gn, long long k) {
    if (std::isnan(group_record)) group_record = best;
    if (f <= group_record - 0.5 * delta) {
      level += 1;
      group_start_k = k;
      group_record = best;
      sigma = 0.0;
    } else if (sigma > budget) {
      level += 1;
      group_start_k = k;
      group_record = best;
      sigma = 0.0;
      delta *= 0.5;
    }
    const double target = group_record - delta;
    return {(f - target) / (c * gn * gn), target};
  }

  void accumulate(double eta, double gn) { sigma += c * eta * gn; }
};

}  // namespace pmdtest
