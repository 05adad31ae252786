// Test-only oracles, independent of the integration/estimation paths they
// check: midpoint-rule quadrature, direct window scans and direct summation.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>

namespace oracles {

// Composite midpoint rule. Good to O((b-a)^3/n^2) on smooth pieces; for step
// functions use enough points that breakpoint error (b-a)/n is below the
// comparison tolerance.
inline double midpoint_quadrature(const std::function<double(double)>& f, double a,
                                  double b, int n) {
  double h = (b - a) / n;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += f(a + (i + 0.5) * h);
  return acc * h;
}

inline double midpoint_quadrature_log(const std::function<double(double)>& f, double a,
                                      double b, int n) {
  return midpoint_quadrature([&](double t) { return f(t) / t; }, a, b, n);
}

// Brute-force sliding-window maximum of (1/len) ∫ window, scanning n_scan
// anchor positions in [lo, hi].
inline double window_scan_max(const std::function<double(double, double)>& integral,
                              double lo, double hi, double window_len, int n_scan) {
  double best = -1e300;
  for (int i = 0; i <= n_scan; ++i) {
    double x = lo + (hi - lo) * i / n_scan;
    best = std::max(best, integral(x, x + window_len) / window_len);
  }
  return best;
}

// Direct window sums for sequences.
inline double direct_sum(const std::function<double(std::int64_t)>& f, std::int64_t lo,
                         std::int64_t hi) {
  double acc = 0.0;
  for (std::int64_t i = lo; i <= hi; ++i) acc += f(i);
  return acc;
}

inline double direct_harmonic_sum(const std::function<double(std::int64_t)>& f,
                                  std::int64_t lo, std::int64_t hi) {
  double acc = 0.0;
  for (std::int64_t i = lo; i <= hi; ++i) acc += f(i) / static_cast<double>(i);
  return acc;
}

// Low-discrepancy points in [lo, hi] (golden-ratio rotation), deterministic.
inline double quasi_point(int i, double lo, double hi) {
  constexpr double kGolden = 0.6180339887498949;
  double frac = std::fmod(0.5 + kGolden * i, 1.0);
  return lo + (hi - lo) * frac;
}

}  // namespace oracles
