#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ameans/fnspec.hpp"

namespace ameans {

/// Sampling grid and convergence band for a single-limit estimator.
struct MeanCriterion {
  double x_min = 16.0;
  double x_max = 16777216.0;  // 4^12
  int n_samples = 64;
  double band_tol = 1e-2;
};

struct SeqMeanCriterion {
  std::int64_t n_min = 16;
  std::int64_t n_max = 1048576;  // 4^10
  int n_samples = 64;
  double band_tol = 1e-2;
};

/// Grid actually used by an estimation, echoed on the result.
struct CriterionRecord {
  double x_min = 0.0;
  double x_max = 0.0;
  int n_samples = 0;
  double band_tol = 0.0;
};

/// Result of a single-limit estimation. The band [lo, hi] is the range of the
/// partial averages over the tail half of the grid (abscissa at or beyond the
/// geometric midpoint of [x_min, x_max]); converged iff hi - lo <= band_tol.
/// Convergence is declared only from the band, never by extrapolation.
struct LimitEstimate {
  double lo = 0.0;
  double hi = 0.0;
  bool converged = false;
  std::vector<std::pair<double, double>> tail_samples;  // (abscissa, partial average)
  CriterionRecord criterion;
  double band_tol = 0.0;

  double midpoint() const { return 0.5 * (lo + hi); }
  nlohmann::json to_json() const;  // {lo, hi, converged, samples}
};

/// Cesàro mean  M(f) = lim (1/x) ∫_1^x f, multiplicative domain.
/// Partial averages sampled on a geometric grid, integrals exact.
LimitEstimate cesaro_mean(const FunctionSpec& f, const MeanCriterion& c = {});

/// Default grid for exp_mean: the log image of the cesaro_mean default, so
/// the two estimators probe corresponding ranges under W.
MeanCriterion exp_mean_default_criterion();

/// Exponentially weighted mean  R(f) = lim e^(-x) ∫_0^x f(t) e^t dt,
/// additive domain, arithmetic grid. Partial values follow the recurrence
/// S(x+h) = e^(-h) S(x) + ∫_0^h f(x+u) e^(u-h) du, which never forms e^x.
LimitEstimate exp_mean(const FunctionSpec& f);
LimitEstimate exp_mean(const FunctionSpec& f, const MeanCriterion& c);

/// Discrete Cesàro mean  M_d(f) = lim (1/n) Σ_{i=1..n} f(i); f(0) ignored.
LimitEstimate cesaro_mean_seq(const SequenceSpec& s, std::int64_t n_max);
LimitEstimate cesaro_mean_seq(const SequenceSpec& s, const SeqMeanCriterion& c = {});

}  // namespace ameans
