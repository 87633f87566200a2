#pragma once

// Independent numeric cross-checks: generic quadrature against the library's
// closed-form evaluations, plus empirical-distribution statistics.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "skewdiff/scale.hpp"

namespace oracles {

using skewdiff::ScaleFunction;

inline double simpson_leaf(const std::function<double(double)>& f, double a, double b) {
  return (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double left = simpson_leaf(f, a, m);
  const double right = simpson_leaf(f, m, b);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson(f, a, m, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
  if (a == b) return 0.0;
  return adaptive_simpson(f, a, b, simpson_leaf(f, a, b), tol, 40);
}

// Quadrature of the boundary functional integral(0..x) (h(x) - h(y)) / h'(y) dy,
// split at the tabulated kinks of h so every piece is smooth.
inline double phi_by_quadrature(const ScaleFunction& sf, double x) {
  if (x == 0.0) return 0.0;
  const double lo = std::min(0.0, x), hi = std::max(0.0, x);
  const double hx = sf.h(x);
  std::vector<double> cuts{lo, hi};
  for (double node : sf.map().nodes()) {
    if (node > lo && node < hi) cuts.push_back(node);
  }
  std::sort(cuts.begin(), cuts.end());
  const double sign = x > 0.0 ? 1.0 : -1.0;
  double total = 0.0;
  auto integrand = [&](double y) { return (hx - sf.h(y)) / sf.h_prime(y); };
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    // Pull the endpoints marginally inside the piece so h' is the interior
    // slope there; the trimmed sliver contributes O(1e-10 * width).
    const double eps = 1e-10 * (cuts[i + 1] - cuts[i]);
    total += integrate(integrand, cuts[i] + eps, cuts[i + 1] - eps, 1e-13);
  }
  return sign * total;
}

// Two-sided Kolmogorov-Smirnov statistic of a sample against a CDF.
inline double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (size_t i = 0; i < sample.size(); ++i) {
    const double F = cdf(sample[i]);
    d = std::max(d, std::abs(F - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - F));
  }
  return d;
}

inline double norm_cdf(double t) { return 0.5 * std::erfc(-t * 0.7071067811865475244); }

// Brute-force partial sum of a term sequence over depths [0, n).
inline double partial_sum(const std::function<double(long long)>& term, long long n) {
  double s = 0.0;
  for (long long d = 0; d < n; ++d) s += term(d);
  return s;
}

}  // namespace oracles
