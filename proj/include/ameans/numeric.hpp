#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace ameans {

/// Neumaier-compensated accumulator. Window sums run over up to ~1e7 terms;
/// plain summation would be fine at our tolerances, compensation makes the
/// exact-integration claims hold to near machine precision.
class Accumulator {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// b^k with saturation just below INT64_MAX (b >= 2, k >= 0).
inline std::int64_t ipow_saturating(std::int64_t b, std::int64_t k) {
  std::int64_t r = 1;
  for (std::int64_t i = 0; i < k; ++i) {
    if (r > (std::int64_t{1} << 62) / b) return std::int64_t{1} << 62;
    r *= b;
  }
  return r;
}

/// floor(log_b n) for integers n >= 1, b >= 2, exact.
inline std::int64_t floor_log_int(std::int64_t n, std::int64_t base) {
  std::int64_t k = 0;
  std::int64_t p = base;
  while (p <= n) {
    ++k;
    if (p > (std::int64_t{1} << 62) / base) break;
    p *= base;
  }
  return k;
}

/// floor(log_b x) for real x >= 1, b > 1, with fixup so that the result k
/// always satisfies b^k <= x < b^(k+1) under std::pow comparisons.
inline std::int64_t floor_log(double x, double base, double log_base) {
  auto k = static_cast<std::int64_t>(std::floor(std::log(x) / log_base));
  while (k > 0 && std::pow(base, static_cast<double>(k)) > x) --k;
  while (std::pow(base, static_cast<double>(k + 1)) <= x) ++k;
  if (k < 0) k = 0;
  return k;
}

/// Digamma function, used for closed-form harmonic window sums.
/// Recurrence shift above 12 then the standard asymptotic series.
double digamma(double x);

/// Sum of 1/i over integers i in [lo, hi] with i ≡ residue (mod modulus).
/// Exact loop for short ranges, digamma differences for long ones.
double harmonic_residue_sum(std::int64_t lo, std::int64_t hi, std::int64_t residue,
                            std::int64_t modulus);

/// n geometrically spaced points spanning [lo, hi], endpoints exact.
std::vector<double> geometric_points(double lo, double hi, int n);

/// Geometrically spaced distinct integers spanning [lo, hi].
std::vector<std::int64_t> geometric_integers(std::int64_t lo, std::int64_t hi, int n);

}  // namespace ameans
