#include "ameans/sublinear.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "ameans/numeric.hpp"
#include "ameans/parallel.hpp"

namespace ameans {

namespace {

constexpr double kMonotoneSlack = 1e-9;

enum class Kind { K, P, Q };

bool is_ratio_kind(Kind k) { return k != Kind::K; }

void validate_schedule(const std::vector<double>& sched, bool ratio) {
  if (sched.size() < 4) throw ScheduleError("theta schedule needs at least 4 entries");
  for (std::size_t i = 0; i < sched.size(); ++i) {
    double t = sched[i];
    if (ratio ? !(t > 1.0 && t <= 2.0) : !(t > 0.0 && t <= 1.0))
      throw ScheduleError("theta value outside the valid range for this functional");
    if (i > 0 && !(t < sched[i - 1]))
      throw ScheduleError("theta schedule must decrease strictly toward the limit point");
  }
}

void validate_params(const SweepParams& p, bool ratio) {
  validate_schedule(p.theta_schedule, ratio);
  if (!(p.x_min > 0.0) || !(p.x_max > p.x_min))
    throw ScheduleError("sweep needs 0 < x_min < x_max");
  if (p.anchors_per_theta < 2) throw ScheduleError("need at least 2 anchors per theta");
  if (!(p.stride_fraction > 0.0 && p.stride_fraction <= 0.5))
    throw ScheduleError("stride_fraction must lie in (0, 1/2]");
  if (p.min_cells < 1) throw ScheduleError("min_cells must be positive");
}

double window_average(const FunctionSpec& f, Kind kind, double theta, double x) {
  switch (kind) {
    case Kind::K:
      return f.integrate(x, x + theta) / theta;
    case Kind::P:
      return f.integrate(x, theta * x) / ((theta - 1.0) * x);
    default:
      return f.integrate_log(x, theta * x) / std::log1p(theta - 1.0);
  }
}

void add_cluster(double anchor, Kind kind, double theta, double stride_fraction,
                 double lo, double hi, std::vector<double>& out) {
  for (int k = 1; k <= 8; ++k) {
    double x = is_ratio_kind(kind)
                   ? anchor * (1.0 + k * stride_fraction * (theta - 1.0))
                   : anchor + k * stride_fraction * theta;
    if (x >= lo && x <= hi) out.push_back(x);
  }
}

void add_jitter(double anchor, Kind kind, double theta, double stride_fraction,
                double lo, double hi, std::vector<double>& out) {
  for (int k = -2; k <= 2; ++k) {
    if (k == 0) continue;
    double x = is_ratio_kind(kind)
                   ? anchor * (1.0 + k * stride_fraction * (theta - 1.0))
                   : anchor + k * stride_fraction * theta;
    if (x >= lo && x <= hi) out.push_back(x);
  }
}

// Window starts whose ratio/length tiling covers the previous argmax window;
// keeps the per-theta estimates non-decreasing along the schedule.
void add_seeds(double prev_argmax, double prev_theta, Kind kind, double theta,
               double lo, double hi, std::vector<double>& out) {
  if (!std::isfinite(prev_argmax)) return;
  if (is_ratio_kind(kind)) {
    double x = prev_argmax;
    for (int k = 0; k < 8 && x <= prev_argmax * prev_theta; ++k, x *= theta)
      if (x >= lo && x <= hi) out.push_back(x);
    double end_aligned = prev_argmax * prev_theta / theta;
    if (end_aligned >= lo && end_aligned <= hi) out.push_back(end_aligned);
    double mid = prev_argmax * std::sqrt(prev_theta / theta);
    if (mid >= lo && mid <= hi) out.push_back(mid);
  } else {
    double x = prev_argmax;
    for (int k = 0; k < 8 && x <= prev_argmax + prev_theta; ++k, x += theta)
      if (x >= lo && x <= hi) out.push_back(x);
    double end_aligned = prev_argmax + prev_theta - theta;
    if (end_aligned >= lo && end_aligned <= hi) out.push_back(end_aligned);
  }
}

// Exact-window specs must refine monotonically to near roundoff; windows over
// integer-step structure carry the documented bound/min_cells resolution
// bias, and sums of incommensurate oscillations carry sup-search uncertainty.
// Only deviations beyond those published terms count as violations.
bool check_monotone(const std::vector<ThetaEntry>& entries, double slack) {
  for (std::size_t i = 1; i < entries.size(); ++i)
    if (entries[i].estimate < entries[i - 1].estimate - slack) return false;
  return true;
}

// Resolution half-width of the window sup search for this input: the
// integer-cell bias plus an alignment term for multi-scale mixtures.
double resolution_term(double bound, const SweepParams& p, bool integer_cells,
                       int osc_scales) {
  double r = integer_cells ? bound / static_cast<double>(p.min_cells) : 0.0;
  if (osc_scales > 1) r += bound * 4e-3 * static_cast<double>(osc_scales - 1);
  return r;
}

double sweep_tolerance(double bound, const SweepParams& p, double resolution) {
  double tol = bound * 2.5e-3 * (p.stride_fraction / 0.25) + resolution;
  return std::max(tol, 1e-12);
}

SweepReport continuous_sweep(const FunctionSpec& f, const SweepParams& p, Kind kind) {
  bool ratio = is_ratio_kind(kind);
  validate_params(p, ratio);
  if (kind == Kind::K && f.domain() != Domain::Additive)
    throw DomainError("K-type sweep expects an additive-domain function");
  if (kind != Kind::K && f.domain() != Domain::Multiplicative)
    throw DomainError("P/Q-type sweep expects a multiplicative-domain function");

  SweepReport rep;
  rep.params = p;
  double prev_argmax = std::numeric_limits<double>::quiet_NaN();
  double prev_theta = 0.0;

  // One anchor range for the whole sweep (the intersection over the
  // schedule): per-theta maxima taken over theta-dependent ranges would not
  // be comparable, and the finest theta is the binding one anyway.
  double x_lo = p.x_min;
  double x_hi = 1e300;
  for (double theta : p.theta_schedule) {
    x_lo = std::max(x_lo, f.min_anchor(theta, ratio, p.min_cells));
    double hi = ratio ? p.x_max / theta : p.x_max - theta;
    x_hi = std::min(x_hi, std::min(hi, f.max_anchor(theta, ratio)));
  }
  if (!(x_lo < x_hi))
    throw ScheduleError("every anchor is skipped at some theta; widen [x_min, x_max]");

  for (double theta : p.theta_schedule) {

    std::vector<double> anchors = geometric_points(x_lo, x_hi, p.anchors_per_theta);
    std::size_t n_base = anchors.size();
    for (std::size_t i = 0; i < n_base; ++i)
      add_cluster(anchors[i], kind, theta, p.stride_fraction, x_lo, x_hi, anchors);

    std::vector<double> crit;
    f.critical_anchors(theta, ratio, x_lo, x_hi, 512, crit);
    for (double c : crit) {
      anchors.push_back(c);
      add_jitter(c, kind, theta, p.stride_fraction, x_lo, x_hi, anchors);
    }
    add_seeds(prev_argmax, prev_theta, kind, theta, x_lo, x_hi, anchors);

    std::sort(anchors.begin(), anchors.end());
    anchors.erase(std::unique(anchors.begin(), anchors.end()), anchors.end());

    std::vector<double> vals(anchors.size());
    parallel_for(anchors.size(), [&](std::size_t i) {
      vals[i] = window_average(f, kind, theta, anchors[i]);
    });
    double best = vals[0];
    double best_x = anchors[0];
    for (std::size_t i = 1; i < vals.size(); ++i) {
      if (vals[i] > best) {
        best = vals[i];
        best_x = anchors[i];
      }
    }

    // zoom refinement: the coarse grid undersamples the sup for
    // quasi-periodic mixtures, so rescan around the leading candidates
    std::vector<std::size_t> order(anchors.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::size_t top = std::min<std::size_t>(8, order.size());
    std::partial_sort(order.begin(), order.begin() + top, order.end(),
                      [&](std::size_t a, std::size_t b) {
                        if (vals[a] != vals[b]) return vals[a] > vals[b];
                        return anchors[a] < anchors[b];
                      });
    for (std::size_t t = 0; t < top; ++t) {
      std::size_t i = order[t];
      double left = i > 0 ? anchors[i - 1] : std::max(x_lo, anchors[i] - theta);
      double right = i + 1 < anchors.size() ? anchors[i + 1]
                                            : std::min(x_hi, anchors[i] + theta);
      for (int round = 0; round < 3; ++round) {
        double step = (right - left) / 24.0;
        if (!(step > 0.0)) break;
        double loc_best = -1e300, loc_x = left;
        for (int k = 0; k <= 24; ++k) {
          double x = std::min(x_hi, std::max(x_lo, left + step * k));
          double v = window_average(f, kind, theta, x);
          if (v > loc_best) {
            loc_best = v;
            loc_x = x;
          }
        }
        if (loc_best > best) {
          best = loc_best;
          best_x = loc_x;
        }
        left = std::max(x_lo, loc_x - step);
        right = std::min(x_hi, loc_x + step);
      }
    }

    rep.per_theta.push_back({theta, best, best_x});
    prev_argmax = best_x;
    prev_theta = theta;
  }

  rep.value = rep.per_theta.back().estimate;
  double res = resolution_term(f.bound(), p, f.has_integer_cells(),
                               f.oscillatory_scale_count());
  rep.monotone_ok = check_monotone(rep.per_theta, kMonotoneSlack + res);
  rep.tolerance = sweep_tolerance(f.bound(), p, res);
  return rep;
}

double seq_window_estimate(const SequenceSpec& s, bool harmonic, std::int64_t n,
                           std::int64_t m) {
  if (harmonic) {
    double num = s.harmonic_sum_range(n, m);
    double den = harmonic_residue_sum(n, m, 0, 1);
    return num / den;
  }
  return s.sum_range(n, m) / static_cast<double>(m - n + 1);
}

SweepReport discrete_sweep(const SequenceSpec& s, const SweepParams& p, bool harmonic) {
  validate_params(p, true);
  if (p.n_min < 1 || p.n_max <= p.n_min)
    throw ScheduleError("discrete sweep needs 1 <= n_min < n_max");

  SweepReport rep;
  rep.params = p;
  std::int64_t prev_argmax = -1;
  double prev_theta = 0.0;

  bool unit_cells = s.has_unit_cells();
  auto transient = s.transient_length();

  // theta-independent anchor range, as in the continuous sweep: windows need
  // a second integer (floor(theta n) >= n+1) at every theta, and unit-scale
  // structure additionally needs min_cells integers per window
  double need = static_cast<double>(std::max<std::int64_t>(p.n_min, 2));
  double hi_common = 1e18;
  for (double theta : p.theta_schedule) {
    double cells = unit_cells ? static_cast<double>(p.min_cells) : 1.0;
    need = std::max(need, cells / (theta - 1.0));
    hi_common = std::min(hi_common, static_cast<double>(p.n_max) / theta);
  }
  need = std::max(need, static_cast<double>(transient));
  auto n_lo = static_cast<std::int64_t>(std::ceil(need));
  auto n_hi = static_cast<std::int64_t>(std::floor(hi_common));
  if (n_lo > n_hi)
    throw ScheduleError(
        "every anchor is skipped at some theta; raise n_max or coarsen the schedule");

  for (double theta : p.theta_schedule) {

    std::vector<std::int64_t> anchors = geometric_integers(n_lo, n_hi, p.anchors_per_theta);
    std::size_t n_base = anchors.size();
    for (std::size_t i = 0; i < n_base; ++i) {
      for (int k = 1; k <= 8; ++k) {
        double x = static_cast<double>(anchors[i]) *
                   (1.0 + k * p.stride_fraction * (theta - 1.0));
        auto v = static_cast<std::int64_t>(std::llround(x));
        if (v >= n_lo && v <= n_hi) anchors.push_back(v);
      }
    }
    std::vector<std::int64_t> crit;
    s.critical_anchors(n_lo, n_hi, 256, crit);
    for (std::int64_t c : crit) {
      anchors.push_back(c);
      auto end_aligned = static_cast<std::int64_t>(
          std::floor(static_cast<double>(c) / theta));
      if (end_aligned >= n_lo && end_aligned <= n_hi) anchors.push_back(end_aligned);
    }
    if (prev_argmax > 0) {
      double x = static_cast<double>(prev_argmax);
      for (int k = 0; k < 8 && x <= static_cast<double>(prev_argmax) * prev_theta;
           ++k, x *= theta) {
        auto v = static_cast<std::int64_t>(std::llround(x));
        if (v >= n_lo && v <= n_hi) anchors.push_back(v);
      }
    }
    std::sort(anchors.begin(), anchors.end());
    anchors.erase(std::unique(anchors.begin(), anchors.end()), anchors.end());

    std::vector<double> vals(anchors.size());
    parallel_for(anchors.size(), [&](std::size_t i) {
      auto n = anchors[i];
      auto m = static_cast<std::int64_t>(std::floor(theta * static_cast<double>(n)));
      vals[i] = seq_window_estimate(s, harmonic, n, m);
    });
    double best = vals[0];
    std::int64_t best_n = anchors[0];
    for (std::size_t i = 1; i < vals.size(); ++i) {
      if (vals[i] > best) {
        best = vals[i];
        best_n = anchors[i];
      }
    }
    rep.per_theta.push_back({theta, best, static_cast<double>(best_n)});
    prev_argmax = best_n;
    prev_theta = theta;
  }

  rep.value = rep.per_theta.back().estimate;
  double res = resolution_term(s.bound(), p, unit_cells, 1);
  rep.monotone_ok = check_monotone(rep.per_theta, kMonotoneSlack + res);
  rep.tolerance = sweep_tolerance(s.bound(), p, res);
  return rep;
}

SweepReport negate_report(SweepReport rep) {
  for (auto& e : rep.per_theta) e.estimate = -e.estimate;
  rep.value = -rep.value;
  rep.is_lower = true;
  return rep;
}

}  // namespace

std::string to_string(Variant v) {
  switch (v) {
    case Variant::K: return "K";
    case Variant::P: return "P";
    case Variant::Q: return "Q";
    case Variant::Pd: return "Pd";
    default: return "Qd";
  }
}

SweepParams SweepParams::defaults_additive(int j_max) {
  SweepParams p;
  for (int j = 2; j <= j_max; ++j) p.theta_schedule.push_back(std::pow(2.0, -j));
  return p;
}

SweepParams SweepParams::defaults_multiplicative(int j_max) {
  SweepParams p;
  for (int j = 2; j <= j_max; ++j) p.theta_schedule.push_back(1.0 + std::pow(2.0, -j));
  return p;
}

SweepParams SweepParams::defaults_discrete(int j_max) {
  SweepParams p = defaults_multiplicative(j_max);
  p.n_min = 2;
  // past 4^11 so geometric block structures keep an on-block inside the
  // admissible anchor range at the finest theta
  p.n_max = 4194304;
  return p;
}

nlohmann::json SweepParams::to_json() const {
  return {{"theta_schedule", theta_schedule},
          {"x_min", x_min},
          {"x_max", x_max},
          {"n_min", n_min},
          {"n_max", n_max},
          {"anchors_per_theta", anchors_per_theta},
          {"stride_fraction", stride_fraction},
          {"min_cells", min_cells}};
}

nlohmann::json SweepReport::to_json() const {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : per_theta)
    entries.push_back(
        {{"theta", e.theta}, {"estimate", e.estimate}, {"anchor", e.argmax_anchor}});
  return {{"value", value},
          {"monotone_ok", monotone_ok},
          {"is_lower", is_lower},
          {"tolerance", tolerance},
          {"per_theta", entries},
          {"params", params.to_json()}};
}

std::string SweepReport::to_csv() const {
  std::string out = "theta,limsup_estimate,argmax_anchor\n";
  char buf[128];
  for (const auto& e : per_theta) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", e.theta, e.estimate,
                  e.argmax_anchor);
    out += buf;
  }
  return out;
}

SweepReport k_upper(const FunctionSpec& f, const SweepParams& p) {
  return continuous_sweep(f, p, Kind::K);
}
SweepReport p_upper(const FunctionSpec& f, const SweepParams& p) {
  return continuous_sweep(f, p, Kind::P);
}
SweepReport q_upper(const FunctionSpec& f, const SweepParams& p) {
  return continuous_sweep(f, p, Kind::Q);
}
SweepReport p_upper_seq(const SequenceSpec& s, const SweepParams& p) {
  return discrete_sweep(s, p, false);
}
SweepReport q_upper_seq(const SequenceSpec& s, const SweepParams& p) {
  return discrete_sweep(s, p, true);
}

SweepReport k_lower(const FunctionSpec& f, const SweepParams& p) {
  return negate_report(k_upper(FunctionSpec::scale(-1.0, f), p));
}
SweepReport p_lower(const FunctionSpec& f, const SweepParams& p) {
  return negate_report(p_upper(FunctionSpec::scale(-1.0, f), p));
}
SweepReport q_lower(const FunctionSpec& f, const SweepParams& p) {
  return negate_report(q_upper(FunctionSpec::scale(-1.0, f), p));
}
SweepReport p_lower_seq(const SequenceSpec& s, const SweepParams& p) {
  return negate_report(p_upper_seq(SequenceSpec::affine(-1.0, s, 0.0), p));
}
SweepReport q_lower_seq(const SequenceSpec& s, const SweepParams& p) {
  return negate_report(q_upper_seq(SequenceSpec::affine(-1.0, s, 0.0), p));
}

namespace {

const FunctionSpec& need_function(const SpecInput& in, Variant v) {
  if (!in.is_function())
    throw DomainError(to_string(v) + " expects a function spec, got a sequence");
  return in.function();
}

const SequenceSpec& need_sequence(const SpecInput& in, Variant v) {
  if (in.is_function())
    throw DomainError(to_string(v) + " expects a sequence spec, got a function");
  return in.sequence();
}

}  // namespace

SweepReport upper_variant(Variant v, const SpecInput& input, const SweepParams& p) {
  switch (v) {
    case Variant::K: return k_upper(need_function(input, v), p);
    case Variant::P: return p_upper(need_function(input, v), p);
    case Variant::Q: return q_upper(need_function(input, v), p);
    case Variant::Pd: return p_upper_seq(need_sequence(input, v), p);
    default: return q_upper_seq(need_sequence(input, v), p);
  }
}

SweepReport lower_variant(Variant v, const SpecInput& input, const SweepParams& p) {
  switch (v) {
    case Variant::K: return k_lower(need_function(input, v), p);
    case Variant::P: return p_lower(need_function(input, v), p);
    case Variant::Q: return q_lower(need_function(input, v), p);
    case Variant::Pd: return p_lower_seq(need_sequence(input, v), p);
    default: return q_lower_seq(need_sequence(input, v), p);
  }
}

FunctionalRange functional_range(Variant v, const SpecInput& input, const SweepParams& p) {
  return FunctionalRange{lower_variant(v, input, p), upper_variant(v, input, p)};
}

}  // namespace ameans
