#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ameans/fnspec.hpp"

namespace ameans {

/// Which sublinear functional a sweep estimates.
///   K  : additive windows [x, x+theta], theta -> 0+
///   P  : multiplicative windows [x, theta x], length-normalized, theta -> 1+
///   Q  : multiplicative windows with weight dt/t, normalizer ln theta
///   Pd : discrete windows {n..floor(theta n)}, counting measure
///   Qd : discrete windows, harmonic weights 1/i
enum class Variant { K, P, Q, Pd, Qd };

std::string to_string(Variant v);

struct SweepParams {
  /// Strictly monotone, approaching the limit point: decreasing in (0,1] for
  /// K, decreasing toward 1 in (1,2] for the P/Q family. At least 4 entries.
  std::vector<double> theta_schedule;

  double x_min = 16.0;
  double x_max = 1e7;
  std::int64_t n_min = 2;
  std::int64_t n_max = 4194304;

  int anchors_per_theta = 48;
  double stride_fraction = 0.25;  // in (0, 1/2]

  /// Windows over integer-step structure (lifted sequences, discrete sweeps)
  /// must span at least this many unit cells; shorter windows are skipped.
  /// Controls the O(bound/min_cells) resolution bias of those estimates.
  std::int64_t min_cells = 256;

  /// theta_j = 2^-j, j = 2..j_max.
  static SweepParams defaults_additive(int j_max = 10);
  /// theta_j = 1 + 2^-j, j = 2..j_max.
  static SweepParams defaults_multiplicative(int j_max = 10);
  /// Multiplicative schedule with discrete anchor range defaults.
  static SweepParams defaults_discrete(int j_max = 10);

  nlohmann::json to_json() const;
};

struct ThetaEntry {
  double theta = 0.0;
  double estimate = 0.0;
  double argmax_anchor = 0.0;
};

/// Result of a double-limit sweep. `value` is the last (finest-theta)
/// estimate, justified by the monotonicity of the inner limsup in window
/// size; `monotone_ok` reports whether the per-theta estimates were indeed
/// non-decreasing along the schedule (non-increasing for lower sweeps), as a
/// self-diagnostic rather than an assumption.
struct SweepReport {
  std::vector<ThetaEntry> per_theta;
  double value = 0.0;
  bool monotone_ok = true;
  bool is_lower = false;
  /// Honest half-width of the estimate: anchor discretization plus the
  /// 1/min_cells resolution term when integer-step structure is present.
  /// Identity checks compose tolerances additively from these.
  double tolerance = 0.0;
  SweepParams params;

  nlohmann::json to_json() const;
  std::string to_csv() const;  // columns: theta, limsup_estimate, argmax_anchor
};

SweepReport k_upper(const FunctionSpec& f, const SweepParams& p);
SweepReport p_upper(const FunctionSpec& f, const SweepParams& p);
SweepReport q_upper(const FunctionSpec& f, const SweepParams& p);
SweepReport p_upper_seq(const SequenceSpec& s, const SweepParams& p);
SweepReport q_upper_seq(const SequenceSpec& s, const SweepParams& p);

/// Lower functional: the corresponding upper sweep applied to the negated
/// input, with all estimates negated.
SweepReport k_lower(const FunctionSpec& f, const SweepParams& p);
SweepReport p_lower(const FunctionSpec& f, const SweepParams& p);
SweepReport q_lower(const FunctionSpec& f, const SweepParams& p);
SweepReport p_lower_seq(const SequenceSpec& s, const SweepParams& p);
SweepReport q_lower_seq(const SequenceSpec& s, const SweepParams& p);

SweepReport upper_variant(Variant v, const SpecInput& input, const SweepParams& p);
SweepReport lower_variant(Variant v, const SpecInput& input, const SweepParams& p);

/// [lower, upper] of the functional class on the given input. When the
/// corresponding mean exists with value a, both endpoints collapse to a.
struct FunctionalRange {
  SweepReport lower;
  SweepReport upper;
  double lo() const { return lower.value; }
  double hi() const { return upper.value; }
};

FunctionalRange functional_range(Variant v, const SpecInput& input, const SweepParams& p);

}  // namespace ameans
