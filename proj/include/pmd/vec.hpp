// Dense vector helpers. Vectors are plain std::vector<double>; dimension and
// finiteness are validated at API boundaries, not per arithmetic call.
#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "pmd/errors.hpp"

namespace pmd {

using Vec = std::vector<double>;

inline void check_dim(const Vec& v, std::size_t d, const char* what) {
  if (v.size() != d)
    throw InvalidInput(std::string(what) + ": dimension mismatch (" +
                       std::to_string(v.size()) + " vs " + std::to_string(d) + ")");
}

inline void check_finite(const Vec& v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw InvalidInput(std::string(what) + ": non-finite entry");
}

inline double dot(const Vec& a, const Vec& b) {
  check_dim(b, a.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm_l1(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

inline double norm_l2(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double norm_linf(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline Vec barycenter(std::size_t d) { return Vec(d, 1.0 / static_cast<double>(d)); }

}  // namespace pmd
