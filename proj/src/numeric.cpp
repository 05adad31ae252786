#include "ameans/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace ameans {

double digamma(double x) {
  // Shift into the asymptotic regime, then the standard series
  // psi(x) ~ ln x - 1/(2x) - sum B_2k / (2k x^(2k)).
  double acc = 0.0;
  while (x < 12.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  double inv = 1.0 / x;
  double inv2 = inv * inv;
  double series = inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 -
                  inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))));
  return acc + std::log(x) - 0.5 * inv - series;
}

double harmonic_residue_sum(std::int64_t lo, std::int64_t hi, std::int64_t residue,
                            std::int64_t modulus) {
  if (lo < 1) lo = 1;
  if (hi < lo) return 0.0;
  // first and last i in [lo, hi] with i ≡ residue (mod modulus)
  std::int64_t r = residue % modulus;
  if (r < 0) r += modulus;
  std::int64_t first = lo + ((r - lo) % modulus + modulus) % modulus;
  if (first > hi) return 0.0;
  std::int64_t count = (hi - first) / modulus + 1;
  if (count <= 4096) {
    Accumulator acc;
    for (std::int64_t i = first, c = 0; c < count; ++c, i += modulus)
      acc.add(1.0 / static_cast<double>(i));
    return acc.value();
  }
  // sum over k of 1/(modulus*k + first), k = 0..count-1
  //   = (1/modulus) * (psi(count + first/modulus) - psi(first/modulus))
  double base = static_cast<double>(first) / static_cast<double>(modulus);
  return (digamma(base + static_cast<double>(count)) - digamma(base)) /
         static_cast<double>(modulus);
}

std::vector<double> geometric_points(double lo, double hi, int n) {
  std::vector<double> out;
  if (n <= 0 || !(lo > 0.0) || hi < lo) return out;
  if (n == 1 || hi == lo) {
    out.push_back(lo);
    return out;
  }
  out.reserve(static_cast<std::size_t>(n));
  double la = std::log(lo), lb = std::log(hi);
  for (int i = 0; i < n; ++i)
    out.push_back(std::exp(la + (lb - la) * static_cast<double>(i) / (n - 1)));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<std::int64_t> geometric_integers(std::int64_t lo, std::int64_t hi, int n) {
  std::vector<std::int64_t> out;
  if (lo < 1) lo = 1;
  if (hi < lo || n <= 0) return out;
  auto pts = geometric_points(static_cast<double>(lo), static_cast<double>(hi), n);
  out.reserve(pts.size());
  for (double p : pts) {
    auto v = static_cast<std::int64_t>(std::llround(p));
    v = std::max(lo, std::min(hi, v));
    if (out.empty() || out.back() != v) out.push_back(v);
  }
  return out;
}

}  // namespace ameans
