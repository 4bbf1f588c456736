// Reference optima used by the classic policy and by acceptance checks:
// simplex grid search with one local refinement for Kelly instances, the
// minimal-cost vertex for linear objectives, and the coordinate-wise
// weighted median for the synthetic problem. The reported f_star always
// equals the minimum over the probed points, so it upper-bounds the true
// optimal value by at most the local Lipschitz constant times the resolution.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "pmd/errors.hpp"
#include "pmd/objectives.hpp"
#include "pmd/vec.hpp"

namespace pmd {

enum class ReferenceMethod { GridSearch, AnalyticVertex, ClosedForm };

inline const char* to_string(ReferenceMethod m) {
  switch (m) {
    case ReferenceMethod::GridSearch: return "GridSearch";
    case ReferenceMethod::AnalyticVertex: return "AnalyticVertex";
    case ReferenceMethod::ClosedForm: return "ClosedForm";
  }
  return "?";
}

struct ReferenceOptimum {
  double f_star = 0.0;
  Vec x_star;
  ReferenceMethod method{};
  double resolution = 0.0;
};

namespace detail {

// Number of points x = k / m on the simplex grid: C(m + d - 1, d - 1).
inline double simplex_grid_size(std::size_t d, long long m) {
  double v = 1.0;
  for (std::size_t i = 1; i < d; ++i)
    v = v * static_cast<double>(m + static_cast<long long>(i)) / static_cast<double>(i);
  return v;
}

template <typename F>
void for_each_simplex_grid_point(std::size_t d, long long m, F&& fn) {
  std::vector<long long> kvec(d, 0);
  Vec x(d, 0.0);
  auto rec = [&](auto&& self, std::size_t i, long long remaining) -> void {
    if (i + 1 == d) {
      kvec[i] = remaining;
      for (std::size_t j = 0; j < d; ++j)
        x[j] = static_cast<double>(kvec[j]) / static_cast<double>(m);
      fn(x);
      return;
    }
    for (long long k = 0; k <= remaining; ++k) {
      kvec[i] = k;
      self(self, i + 1, remaining - k);
    }
  };
  rec(rec, 0, m);
}

}  // namespace detail

inline ReferenceOptimum compute_reference(const Objective& obj, double resolution = 1e-4) {
  switch (obj.kind) {
    case ObjectiveKind::LinearOnSimplex: {
      std::size_t arg = 0;
      for (std::size_t i = 1; i < obj.dim; ++i)
        if (obj.cost[i] < obj.cost[arg]) arg = i;
      Vec xs(obj.dim, 0.0);
      xs[arg] = 1.0;
      return ReferenceOptimum{obj.cost[arg], xs, ReferenceMethod::AnalyticVertex, 0.0};
    }
    case ObjectiveKind::SyntheticPiecewiseLinear: {
      // The objective is separable across coordinates; each coordinate is
      // minimized by a weighted median of the anchor coordinates.
      double wsum = 0.0;
      for (double w : obj.weights) wsum += w;
      Vec xs(obj.dim, 0.0);
      for (std::size_t i = 0; i < obj.dim; ++i) {
        std::vector<std::pair<double, double>> vals;
        vals.reserve(obj.anchors.size());
        for (std::size_t j = 0; j < obj.anchors.size(); ++j)
          vals.emplace_back(obj.anchors[j][i], obj.weights[j]);
        std::sort(vals.begin(), vals.end());
        double cum = 0.0;
        for (const auto& [v, w] : vals) {
          cum += w;
          if (cum >= 0.5 * wsum) {
            xs[i] = v;
            break;
          }
        }
      }
      return ReferenceOptimum{eval(obj, xs), xs, ReferenceMethod::ClosedForm, 0.0};
    }
    case ObjectiveKind::Kelly: {
      if (obj.dim > 4)
        throw UnsupportedInstance("compute_reference: grid search supports dimension <= 4");
      if (!(resolution > 0.0 && resolution <= 1.0))
        throw InvalidInput("compute_reference: resolution must be in (0, 1]");
      const long long m = std::max<long long>(1, std::llround(1.0 / resolution));
      if (detail::simplex_grid_size(obj.dim, m) > 2e7)
        throw UnsupportedInstance("compute_reference: grid too large at this resolution");
      double best = kInf;
      Vec bx;
      detail::for_each_simplex_grid_point(obj.dim, m, [&](const Vec& x) {
        const double f = eval(obj, x);
        if (f < best) {
          best = f;
          bx = x;
        }
      });
      // One refinement pass at 10x finer resolution around the coarse argmin:
      // the first d-1 coordinates walk offsets in [-10, 10], the last absorbs
      // the remainder. The minimum over coarse and fine probes is reported.
      const long long m10 = 10 * m;
      std::vector<long long> base(obj.dim);
      for (std::size_t i = 0; i < obj.dim; ++i) base[i] = std::llround(bx[i] * m10);
      std::vector<long long> off(obj.dim - 1, -10);
      Vec x(obj.dim);
      while (true) {
        long long s = 0;
        bool ok = true;
        for (std::size_t i = 0; i + 1 < obj.dim; ++i) {
          const long long ki = base[i] + off[i];
          if (ki < 0) ok = false;
          s += ki;
          x[i] = static_cast<double>(ki) / static_cast<double>(m10);
        }
        const long long klast = m10 - s;
        if (klast < 0) ok = false;
        if (ok) {
          x[obj.dim - 1] = static_cast<double>(klast) / static_cast<double>(m10);
          const double f = eval(obj, x);
          if (f < best) {
            best = f;
            bx = x;
          }
        }
        std::size_t i = 0;
        while (i < off.size() && ++off[i] > 10) {
          off[i] = -10;
          ++i;
        }
        if (i == off.size()) break;
      }
      return ReferenceOptimum{best, bx, ReferenceMethod::GridSearch, resolution};
    }
  }
  throw InvalidInput("compute_reference: unknown objective kind");
}

}  // namespace pmd
