#include "ameans/means.hpp"

#include <algorithm>
#include <cmath>

#include "ameans/numeric.hpp"

namespace ameans {

namespace {

// Band over the tail half of the samples: abscissa at or beyond the geometric
// midpoint of [x_min, x_max]. Discards transients without a tuned burn-in.
void finish_estimate(LimitEstimate& est, double x_min, double x_max, double band_tol) {
  double tail_from = x_min > 0.0 ? std::sqrt(x_min * x_max) : 0.5 * (x_min + x_max);
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (const auto& [x, v] : est.tail_samples) {
    if (x < tail_from) continue;
    if (first) {
      lo = hi = v;
      first = false;
    } else {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (first && !est.tail_samples.empty()) {
    lo = hi = est.tail_samples.back().second;
  }
  est.lo = lo;
  est.hi = hi;
  est.band_tol = band_tol;
  est.converged = hi - lo <= band_tol;
}

void validate(const MeanCriterion& c, double domain_min) {
  if (!(c.x_min >= domain_min) || !(c.x_max > c.x_min) || c.n_samples < 2 ||
      !(c.band_tol > 0.0))
    throw DomainError("mean criterion: need domain_min <= x_min < x_max, >= 2 samples");
}

}  // namespace

nlohmann::json LimitEstimate::to_json() const {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& [x, v] : tail_samples) samples.push_back({x, v});
  return {{"lo", lo}, {"hi", hi}, {"converged", converged}, {"samples", samples}};
}

LimitEstimate cesaro_mean(const FunctionSpec& f, const MeanCriterion& c) {
  if (f.domain() != Domain::Multiplicative)
    throw DomainError("cesaro_mean expects a multiplicative-domain function");
  validate(c, 1.0);
  LimitEstimate est;
  est.criterion = {c.x_min, c.x_max, c.n_samples, c.band_tol};
  auto xs = geometric_points(c.x_min, c.x_max, c.n_samples);
  Accumulator integral;  // ∫_1^{x_j} f, extended incrementally
  double prev = 1.0;
  for (double x : xs) {
    integral.add(f.integrate(prev, x));
    prev = x;
    est.tail_samples.emplace_back(x, integral.value() / x);
  }
  finish_estimate(est, c.x_min, c.x_max, c.band_tol);
  return est;
}

MeanCriterion exp_mean_default_criterion() {
  // log image of the cesaro_mean default grid [16, 4^12]
  MeanCriterion c;
  c.x_min = std::log(16.0);
  c.x_max = 12.0 * std::log(4.0);
  c.n_samples = 64;
  c.band_tol = 1e-2;
  return c;
}

LimitEstimate exp_mean(const FunctionSpec& f) { return exp_mean(f, exp_mean_default_criterion()); }

LimitEstimate exp_mean(const FunctionSpec& f, const MeanCriterion& c) {
  if (f.domain() != Domain::Additive)
    throw DomainError("exp_mean expects an additive-domain function");
  validate(c, 0.0);
  LimitEstimate est;
  est.criterion = {c.x_min, c.x_max, c.n_samples, c.band_tol};
  // arithmetic grid; S carried by the overflow-safe recurrence
  // S(x+h) = e^(-h) S(x) + ∫_0^h f(x+u) e^(u-h) du
  double h = (c.x_max - c.x_min) / (c.n_samples - 1);
  double s = 0.0;
  double x = 0.0;
  if (c.x_min > 0.0) {
    s = f.integrate_expw(0.0, c.x_min);
    x = c.x_min;
  }
  est.tail_samples.emplace_back(x, s);
  for (int j = 1; j < c.n_samples; ++j) {
    double x_next = c.x_min + h * j;
    double step = x_next - x;
    s = std::exp(-step) * s + f.integrate_expw(x, step);
    x = x_next;
    est.tail_samples.emplace_back(x, s);
  }
  finish_estimate(est, c.x_min, c.x_max, c.band_tol);
  return est;
}

LimitEstimate cesaro_mean_seq(const SequenceSpec& s, std::int64_t n_max) {
  SeqMeanCriterion c;
  c.n_max = n_max;
  c.n_min = std::min<std::int64_t>(c.n_min, n_max);
  return cesaro_mean_seq(s, c);
}

LimitEstimate cesaro_mean_seq(const SequenceSpec& s, const SeqMeanCriterion& c) {
  if (c.n_max < 16) throw DomainError("cesaro_mean_seq: n_max must be at least 16");
  if (c.n_min < 1 || c.n_min > c.n_max || c.n_samples < 2 || !(c.band_tol > 0.0))
    throw DomainError("cesaro_mean_seq: invalid criterion");
  LimitEstimate est;
  est.criterion = {static_cast<double>(c.n_min), static_cast<double>(c.n_max),
                   c.n_samples, c.band_tol};
  auto ns = geometric_integers(c.n_min, c.n_max, c.n_samples);
  Accumulator partial;  // Σ_{i=1..n} s(i), f(0) ignored
  std::int64_t prev = 0;
  for (std::int64_t n : ns) {
    partial.add(s.sum_range(prev + 1, n));
    prev = n;
    est.tail_samples.emplace_back(static_cast<double>(n),
                                  partial.value() / static_cast<double>(n));
  }
  finish_estimate(est, static_cast<double>(c.n_min), static_cast<double>(c.n_max),
                  c.band_tol);
  return est;
}

}  // namespace ameans
