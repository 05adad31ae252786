#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <variant>

#include "ameans/fnspec.hpp"
#include "ameans/numeric.hpp"

namespace ameans {

namespace {

constexpr double kMaxLiftedArg = 9.0e15;   // floor(x) must stay exact in int64
constexpr double kMaxExpArg = 709.0;       // e^x overflows beyond this

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw SpecError(std::string("non-finite value in ") + what);
}

struct ConstantNode {
  double value;
};

// Periodic step profile on the additive half-line: value values[i] on
// [breaks[i], breaks[i+1]) within each period, breaks[0] == 0.
struct PeriodicStepsNode {
  double period;
  std::vector<double> breaks;
  std::vector<double> values;
  std::vector<double> cum;  // cum[i] = integral of the profile over [0, breaks[i]); cum[p] over a full period
  double period_mass;

  double value_at_phase(double phi) const {
    auto it = std::upper_bound(breaks.begin(), breaks.end(), phi);
    return values[static_cast<std::size_t>(it - breaks.begin() - 1)];
  }

  // integral of the profile over [0, phi], 0 <= phi <= period
  double mass_at_phase(double phi) const {
    auto it = std::upper_bound(breaks.begin(), breaks.end(), phi);
    auto i = static_cast<std::size_t>(it - breaks.begin() - 1);
    return cum[i] + values[i] * (phi - breaks[i]);
  }
};

struct LogBlocksNode {
  double base;
  double log_base;
  std::string pattern;

  double value_at(std::int64_t k) const {
    auto p = static_cast<std::int64_t>(pattern.size());
    return pattern[static_cast<std::size_t>(k % p)] == '1' ? 1.0 : 0.0;
  }
};

struct SinusoidNode {
  double amplitude;
  double period;
  double phase;
  double omega;  // 2*pi/period
};

struct LogSinusoidNode {
  double amplitude;
  double ratio;
  double phase;
  double log_ratio;
  double omega;  // 2*pi/log(ratio)
};

struct SumNode {
  FunctionSpec left, right;
};
struct ScaleNode {
  double factor;
  FunctionSpec inner;
};
struct ShiftNode {
  double offset;
  FunctionSpec inner;
};
struct DilateNode {
  double factor;
  FunctionSpec inner;
};
struct LiftedNode {
  SequenceSpec seq;
};
struct ExpArgNode {
  FunctionSpec inner;
};

using FnVariant = std::variant<ConstantNode, PeriodicStepsNode, LogBlocksNode, SinusoidNode,
                               LogSinusoidNode, SumNode, ScaleNode, ShiftNode, DilateNode,
                               LiftedNode, ExpArgNode>;

double domain_min(Domain d) { return d == Domain::Additive ? 0.0 : 1.0; }

}  // namespace

struct FunctionSpec::Node {
  Domain domain;
  double bound;
  FnVariant v;
};

FunctionSpec::FunctionSpec(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Domain FunctionSpec::domain() const { return node_->domain; }
double FunctionSpec::bound() const { return node_->bound; }

std::string to_string(Domain d) {
  return d == Domain::Additive ? "additive" : "multiplicative";
}

// ---------------------------------------------------------------------------
// construction

FunctionSpec FunctionSpec::constant(Domain domain, double value) {
  require_finite(value, "constant");
  return FunctionSpec(
      std::make_shared<Node>(Node{domain, std::abs(value), ConstantNode{value}}));
}

FunctionSpec FunctionSpec::additive_periodic(double period, std::vector<double> breakpoints,
                                             std::vector<double> values) {
  require_finite(period, "additive_periodic");
  if (period <= 0.0) throw SpecError("additive_periodic: period must be positive");
  if (breakpoints.empty() || breakpoints.size() != values.size())
    throw SpecError("additive_periodic: breakpoints/values size mismatch");
  if (breakpoints.front() != 0.0)
    throw SpecError("additive_periodic: first breakpoint must be 0");
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    require_finite(breakpoints[i], "additive_periodic");
    require_finite(values[i], "additive_periodic");
    if (breakpoints[i] >= period)
      throw SpecError("additive_periodic: breakpoints must lie in [0, period)");
    if (i > 0 && breakpoints[i] <= breakpoints[i - 1])
      throw SpecError("additive_periodic: breakpoints must increase strictly");
  }
  PeriodicStepsNode n{period, std::move(breakpoints), std::move(values), {}, 0.0};
  n.cum.resize(n.breaks.size() + 1, 0.0);
  double b = 0.0;
  for (std::size_t i = 0; i < n.breaks.size(); ++i) {
    double hi = i + 1 < n.breaks.size() ? n.breaks[i + 1] : n.period;
    n.cum[i + 1] = n.cum[i] + n.values[i] * (hi - n.breaks[i]);
    b = std::max(b, std::abs(n.values[i]));
  }
  n.period_mass = n.cum.back();
  return FunctionSpec(std::make_shared<Node>(Node{Domain::Additive, b, std::move(n)}));
}

FunctionSpec FunctionSpec::log_periodic_blocks(double base, std::string pattern) {
  require_finite(base, "log_periodic_blocks");
  if (base <= 1.0) throw SpecError("log_periodic_blocks: base must exceed 1");
  if (pattern.empty()) throw SpecError("log_periodic_blocks: empty pattern");
  bool any = false;
  for (char c : pattern) {
    if (c != '0' && c != '1')
      throw SpecError("log_periodic_blocks: pattern must be a 0/1 word");
    any = any || c == '1';
  }
  LogBlocksNode n{base, std::log(base), std::move(pattern)};
  return FunctionSpec(
      std::make_shared<Node>(Node{Domain::Multiplicative, any ? 1.0 : 0.0, std::move(n)}));
}

FunctionSpec FunctionSpec::sinusoid(double amplitude, double period, double phase) {
  require_finite(amplitude, "sinusoid");
  require_finite(phase, "sinusoid");
  require_finite(period, "sinusoid");
  if (period <= 0.0) throw SpecError("sinusoid: period must be positive");
  SinusoidNode n{amplitude, period, phase, 2.0 * std::numbers::pi / period};
  return FunctionSpec(
      std::make_shared<Node>(Node{Domain::Additive, std::abs(amplitude), n}));
}

FunctionSpec FunctionSpec::log_sinusoid(double amplitude, double ratio, double phase) {
  require_finite(amplitude, "log_sinusoid");
  require_finite(phase, "log_sinusoid");
  require_finite(ratio, "log_sinusoid");
  if (ratio <= 1.0) throw SpecError("log_sinusoid: multiplicative period must exceed 1");
  double lr = std::log(ratio);
  LogSinusoidNode n{amplitude, ratio, phase, lr, 2.0 * std::numbers::pi / lr};
  return FunctionSpec(
      std::make_shared<Node>(Node{Domain::Multiplicative, std::abs(amplitude), n}));
}

FunctionSpec FunctionSpec::sum(FunctionSpec left, FunctionSpec right) {
  if (left.domain() != right.domain())
    throw SpecError("sum: children must share a domain");
  Domain d = left.domain();
  double b = left.bound() + right.bound();
  return FunctionSpec(
      std::make_shared<Node>(Node{d, b, SumNode{std::move(left), std::move(right)}}));
}

FunctionSpec FunctionSpec::scale(double factor, FunctionSpec inner) {
  require_finite(factor, "scale");
  Domain d = inner.domain();
  double b = std::abs(factor) * inner.bound();
  return FunctionSpec(
      std::make_shared<Node>(Node{d, b, ScaleNode{factor, std::move(inner)}}));
}

FunctionSpec FunctionSpec::shift(double offset, FunctionSpec inner) {
  require_finite(offset, "shift");
  if (offset < 0.0) throw SpecError("shift: offset must be nonnegative");
  if (inner.domain() != Domain::Additive)
    throw SpecError("shift: inner function must be additive");
  double b = inner.bound();
  return FunctionSpec(std::make_shared<Node>(
      Node{Domain::Additive, b, ShiftNode{offset, std::move(inner)}}));
}

FunctionSpec FunctionSpec::dilate(double factor, FunctionSpec inner) {
  require_finite(factor, "dilate");
  if (factor < 1.0) throw SpecError("dilate: factor must be >= 1");
  if (inner.domain() != Domain::Multiplicative)
    throw SpecError("dilate: inner function must be multiplicative");
  double b = inner.bound();
  return FunctionSpec(std::make_shared<Node>(
      Node{Domain::Multiplicative, b, DilateNode{factor, std::move(inner)}}));
}

FunctionSpec FunctionSpec::exp_arg(FunctionSpec multiplicative_inner) {
  if (multiplicative_inner.domain() != Domain::Multiplicative)
    throw SpecError("exp_arg: inner function must be multiplicative");
  double b = multiplicative_inner.bound();
  return FunctionSpec(std::make_shared<Node>(
      Node{Domain::Additive, b, ExpArgNode{std::move(multiplicative_inner)}}));
}

FunctionSpec lift_V(const SequenceSpec& s) {
  return FunctionSpec(std::make_shared<FunctionSpec::Node>(
      FunctionSpec::Node{Domain::Multiplicative, s.bound(), LiftedNode{s}}));
}

// ---------------------------------------------------------------------------
// evaluation

double FunctionSpec::evaluate(double x) const {
  if (!std::isfinite(x) || x < domain_min(node_->domain))
    throw DomainError("evaluate: argument outside the function's domain");
  return std::visit(
      [x](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ConstantNode>) {
          return n.value;
        } else if constexpr (std::is_same_v<T, PeriodicStepsNode>) {
          return n.value_at_phase(std::fmod(x, n.period));
        } else if constexpr (std::is_same_v<T, LogBlocksNode>) {
          return n.value_at(floor_log(x, n.base, n.log_base));
        } else if constexpr (std::is_same_v<T, SinusoidNode>) {
          return n.amplitude * std::sin(n.omega * x + n.phase);
        } else if constexpr (std::is_same_v<T, LogSinusoidNode>) {
          return n.amplitude * std::sin(n.omega * std::log(x) + n.phase);
        } else if constexpr (std::is_same_v<T, SumNode>) {
          return n.left.evaluate(x) + n.right.evaluate(x);
        } else if constexpr (std::is_same_v<T, ScaleNode>) {
          return n.factor * n.inner.evaluate(x);
        } else if constexpr (std::is_same_v<T, ShiftNode>) {
          return n.inner.evaluate(x + n.offset);
        } else if constexpr (std::is_same_v<T, DilateNode>) {
          return n.inner.evaluate(n.factor * x);
        } else if constexpr (std::is_same_v<T, LiftedNode>) {
          if (x > kMaxLiftedArg)
            throw OverflowGuardError("lifted sequence argument exceeds exact integer range");
          return n.seq.value(static_cast<std::int64_t>(std::floor(x)));
        } else {
          if (x > kMaxExpArg)
            throw OverflowGuardError("exp_arg evaluation would overflow e^x");
          return n.inner.evaluate(std::exp(x));
        }
      },
      node_->v);
}

// ---------------------------------------------------------------------------
// integration

namespace {

// ∫_a^b of a periodic step profile: whole periods contribute exactly
// (qb-qa)*period_mass; the fractional phases contribute mass differences.
double steps_integral(const PeriodicStepsNode& n, double a, double b) {
  double qa = std::floor(a / n.period), qb = std::floor(b / n.period);
  double pa = std::min(std::max(a - qa * n.period, 0.0), n.period);
  double pb = std::min(std::max(b - qb * n.period, 0.0), n.period);
  return (qb - qa) * n.period_mass + n.mass_at_phase(pb) - n.mass_at_phase(pa);
}

double sin_integral(const SinusoidNode& n, double a, double b) {
  // ∫ A sin(w t + phi) dt = (2A/w) sin(w(b-a)/2) sin(w(a+b)/2 + phi)
  return 2.0 * n.amplitude / n.omega * std::sin(n.omega * (b - a) * 0.5) *
         std::sin(n.omega * (a + b) * 0.5 + n.phase);
}

double log_sin_antiderivative(const LogSinusoidNode& n, double t) {
  double u = n.omega * std::log(t) + n.phase;
  return n.amplitude * t * (std::sin(u) - n.omega * std::cos(u)) /
         (1.0 + n.omega * n.omega);
}

}  // namespace

double FunctionSpec::integrate(double a, double b) const {
  double dmin = domain_min(node_->domain);
  if (!std::isfinite(a) || !std::isfinite(b) || a < dmin || b < a)
    throw DomainError("integrate: invalid interval");
  if (a == b) return 0.0;
  return std::visit(
      [a, b, this](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ConstantNode>) {
          return n.value * (b - a);
        } else if constexpr (std::is_same_v<T, PeriodicStepsNode>) {
          return steps_integral(n, a, b);
        } else if constexpr (std::is_same_v<T, LogBlocksNode>) {
          std::int64_t k_hi = floor_log(b, n.base, n.log_base);
          Accumulator acc;
          for (std::int64_t k = floor_log(a, n.base, n.log_base); k <= k_hi; ++k) {
            double v = n.value_at(k);
            if (v == 0.0) continue;
            double lo = std::max(a, std::pow(n.base, static_cast<double>(k)));
            double hi = std::min(b, std::pow(n.base, static_cast<double>(k + 1)));
            if (hi > lo) acc.add(v * (hi - lo));
          }
          return acc.value();
        } else if constexpr (std::is_same_v<T, SinusoidNode>) {
          return sin_integral(n, a, b);
        } else if constexpr (std::is_same_v<T, LogSinusoidNode>) {
          return log_sin_antiderivative(n, b) - log_sin_antiderivative(n, a);
        } else if constexpr (std::is_same_v<T, SumNode>) {
          return n.left.integrate(a, b) + n.right.integrate(a, b);
        } else if constexpr (std::is_same_v<T, ScaleNode>) {
          return n.factor * n.inner.integrate(a, b);
        } else if constexpr (std::is_same_v<T, ShiftNode>) {
          return n.inner.integrate(a + n.offset, b + n.offset);
        } else if constexpr (std::is_same_v<T, DilateNode>) {
          return n.inner.integrate(n.factor * a, n.factor * b) / n.factor;
        } else if constexpr (std::is_same_v<T, LiftedNode>) {
          if (b > kMaxLiftedArg)
            throw OverflowGuardError("lifted integration range exceeds exact integer range");
          auto na = static_cast<std::int64_t>(std::floor(a));
          auto nb = static_cast<std::int64_t>(std::floor(b));
          if (na == nb) return n.seq.value(na) * (b - a);
          double first = n.seq.value(na) * (static_cast<double>(na + 1) - a);
          double last = n.seq.value(nb) * (b - static_cast<double>(nb));
          return first + n.seq.sum_range(na + 1, nb - 1) + last;
        } else {
          // ∫_a^b inner(e^t) dt = ∫_{e^a}^{e^b} inner(s) ds/s
          if (b > kMaxExpArg)
            throw OverflowGuardError("exp_arg integration would overflow e^x");
          return n.inner.integrate_log(std::exp(a), std::exp(b));
        }
      },
      node_->v);
}

double FunctionSpec::integrate_log(double a, double b) const {
  if (node_->domain != Domain::Multiplicative)
    throw DomainError("integrate_log requires a multiplicative-domain function");
  if (!std::isfinite(a) || !std::isfinite(b) || a < 1.0 || b < a)
    throw DomainError("integrate_log: invalid interval");
  if (a == b) return 0.0;
  return std::visit(
      [a, b, this](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ConstantNode>) {
          return n.value * std::log1p((b - a) / a);
        } else if constexpr (std::is_same_v<T, LogBlocksNode>) {
          std::int64_t k_hi = floor_log(b, n.base, n.log_base);
          Accumulator acc;
          for (std::int64_t k = floor_log(a, n.base, n.log_base); k <= k_hi; ++k) {
            double v = n.value_at(k);
            if (v == 0.0) continue;
            double lo = std::max(a, std::pow(n.base, static_cast<double>(k)));
            double hi = std::min(b, std::pow(n.base, static_cast<double>(k + 1)));
            if (hi > lo) acc.add(v * std::log1p((hi - lo) / lo));
          }
          return acc.value();
        } else if constexpr (std::is_same_v<T, LogSinusoidNode>) {
          // substitute u = ln t
          double la = std::log(a), lb = std::log(b);
          return 2.0 * n.amplitude / n.omega * std::sin(n.omega * (lb - la) * 0.5) *
                 std::sin(n.omega * (la + lb) * 0.5 + n.phase);
        } else if constexpr (std::is_same_v<T, SumNode>) {
          return n.left.integrate_log(a, b) + n.right.integrate_log(a, b);
        } else if constexpr (std::is_same_v<T, ScaleNode>) {
          return n.factor * n.inner.integrate_log(a, b);
        } else if constexpr (std::is_same_v<T, DilateNode>) {
          return n.inner.integrate_log(n.factor * a, n.factor * b);
        } else if constexpr (std::is_same_v<T, LiftedNode>) {
          if (b > kMaxLiftedArg)
            throw OverflowGuardError("lifted integration range exceeds exact integer range");
          auto na = static_cast<std::int64_t>(std::floor(a));
          auto nb = static_cast<std::int64_t>(std::floor(b));
          if (na == nb) return n.seq.value(na) * std::log1p((b - a) / a);
          double first =
              n.seq.value(na) * std::log1p((static_cast<double>(na + 1) - a) / a);
          double last = n.seq.value(nb) *
                        std::log1p((b - static_cast<double>(nb)) / static_cast<double>(nb));
          return first + n.seq.log_weight_sum_range(na + 1, nb - 1) + last;
        } else {
          throw SpecError("node has no multiplicative-domain semantics");
        }
      },
      node_->v);
}

double FunctionSpec::integrate_expw(double x, double h) const {
  if (node_->domain != Domain::Additive)
    throw DomainError("integrate_expw requires an additive-domain function");
  if (!std::isfinite(x) || !std::isfinite(h) || x < 0.0 || h < 0.0)
    throw DomainError("integrate_expw: invalid window");
  if (h == 0.0) return 0.0;
  return std::visit(
      [x, h, this](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ConstantNode>) {
          return -n.value * std::expm1(-h);
        } else if constexpr (std::is_same_v<T, PeriodicStepsNode>) {
          // walk step pieces over [t0, x+h]; weight e^(t-x-h) on each piece.
          // pieces older than ~60 time units contribute below 1e-26 and are
          // dropped.
          double end = x + h;
          double t = std::max(x, end - 60.0);
          Accumulator acc;
          double w_lo = std::exp(t - end);
          while (t < end) {
            double q = std::floor(t / n.period);
            double phi = std::min(std::max(t - q * n.period, 0.0), n.period);
            auto it = std::upper_bound(n.breaks.begin(), n.breaks.end(), phi);
            auto i = static_cast<std::size_t>(it - n.breaks.begin() - 1);
            double piece_end =
                i + 1 < n.breaks.size() ? n.breaks[i + 1] : n.period;
            double t_next = std::min(end, t + (piece_end - phi));
            if (t_next <= t) t_next = std::min(end, std::nextafter(t, end));
            double w_hi = std::exp(t_next - end);
            acc.add(n.values[i] * (w_hi - w_lo));
            w_lo = w_hi;
            t = t_next;
          }
          return acc.value();
        } else if constexpr (std::is_same_v<T, SinusoidNode>) {
          // ∫_0^h A sin(w(x+u)+phi) e^(u-h) du, antiderivative of e^u sin(wu+psi)
          double psi = n.omega * x + n.phase;
          double w = n.omega;
          double at_h = std::sin(w * h + psi) - w * std::cos(w * h + psi);
          double at_0 = std::sin(psi) - w * std::cos(psi);
          return n.amplitude * (at_h - std::exp(-h) * at_0) / (1.0 + w * w);
        } else if constexpr (std::is_same_v<T, SumNode>) {
          return n.left.integrate_expw(x, h) + n.right.integrate_expw(x, h);
        } else if constexpr (std::is_same_v<T, ScaleNode>) {
          return n.factor * n.inner.integrate_expw(x, h);
        } else if constexpr (std::is_same_v<T, ShiftNode>) {
          return n.inner.integrate_expw(x + n.offset, h);
        } else if constexpr (std::is_same_v<T, ExpArgNode>) {
          // = e^(-(x+h)) ∫_{e^x}^{e^(x+h)} inner(s) ds
          if (x + h > kMaxExpArg)
            throw OverflowGuardError(
                "exp-weighted step too large for the shifted evaluation");
          double lo = std::exp(x), hi = std::exp(x + h);
          return std::exp(-(x + h)) * n.inner.integrate(lo, hi);
        } else {
          throw SpecError("node has no additive-domain semantics");
        }
      },
      node_->v);
}

// ---------------------------------------------------------------------------
// window support

double FunctionSpec::min_anchor(double window, bool is_ratio,
                                std::int64_t min_cells) const {
  return std::visit(
      [&](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, LiftedNode>) {
          // windows must clear any explicit transient, and for unit-scale
          // structure span min_cells integers; growing-run structure
          // (exponent blocks) is representative at every scale
          double lo = std::max(1.0, static_cast<double>(n.seq.transient_length()));
          if (!n.seq.has_unit_cells()) return lo;
          double r = window - 1.0;
          return r > 0.0 ? std::max(lo, static_cast<double>(min_cells) / r)
                         : kMaxLiftedArg;
        } else if constexpr (std::is_same_v<T, ExpArgNode>) {
          double inner = n.inner.min_anchor(std::exp(window), true, min_cells);
          return inner > 1.0 ? std::log(inner) : 0.0;
        } else if constexpr (std::is_same_v<T, SumNode>) {
          return std::max(n.left.min_anchor(window, is_ratio, min_cells),
                          n.right.min_anchor(window, is_ratio, min_cells));
        } else if constexpr (std::is_same_v<T, ScaleNode>) {
          return n.inner.min_anchor(window, is_ratio, min_cells);
        } else if constexpr (std::is_same_v<T, ShiftNode>) {
          return std::max(0.0, n.inner.min_anchor(window, is_ratio, min_cells) - n.offset);
        } else if constexpr (std::is_same_v<T, DilateNode>) {
          return std::max(1.0, n.inner.min_anchor(window, is_ratio, min_cells) / n.factor);
        } else {
          return domain_min(node_->domain);
        }
      },
      node_->v);
}

double FunctionSpec::max_anchor(double window, bool is_ratio) const {
  return std::visit(
      [&](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, LiftedNode>) {
          return kMaxLiftedArg / window * 0.98;
        } else if constexpr (std::is_same_v<T, ExpArgNode>) {
          double inner = n.inner.max_anchor(std::exp(window), true);
          double cap = inner >= 1e300 ? kMaxExpArg : std::log(inner);
          return std::min(cap, kMaxExpArg - 1.0) - window;
        } else if constexpr (std::is_same_v<T, SumNode>) {
          return std::min(n.left.max_anchor(window, is_ratio),
                          n.right.max_anchor(window, is_ratio));
        } else if constexpr (std::is_same_v<T, ScaleNode>) {
          return n.inner.max_anchor(window, is_ratio);
        } else if constexpr (std::is_same_v<T, ShiftNode>) {
          return n.inner.max_anchor(window, is_ratio) - n.offset;
        } else if constexpr (std::is_same_v<T, DilateNode>) {
          return n.inner.max_anchor(window, is_ratio) / n.factor;
        } else {
          return 1e300;
        }
      },
      node_->v);
}

bool FunctionSpec::has_integer_cells() const {
  return std::visit(
      [](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, LiftedNode>) {
          return true;
        } else if constexpr (std::is_same_v<T, ExpArgNode>) {
          return true;
        } else if constexpr (std::is_same_v<T, SumNode>) {
          return n.left.has_integer_cells() || n.right.has_integer_cells();
        } else if constexpr (std::is_same_v<T, ScaleNode>) {
          return n.inner.has_integer_cells();
        } else if constexpr (std::is_same_v<T, ShiftNode>) {
          return n.inner.has_integer_cells();
        } else if constexpr (std::is_same_v<T, DilateNode>) {
          return n.inner.has_integer_cells();
        } else {
          return false;
        }
      },
      node_->v);
}

namespace {

void push_clamped(double x, double lo, double hi, std::vector<double>& out) {
  if (x >= lo && x <= hi && std::isfinite(x)) out.push_back(x);
}

void add_scale(double s, std::vector<double>& scales) {
  for (double v : scales)
    if (std::abs(v - s) <= 1e-9 * std::max(std::abs(v), std::abs(s))) return;
  scales.push_back(s);
}

}  // namespace

void FunctionSpec::collect_scales(std::vector<double>& scales) const {
  std::visit(
      [&scales](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, PeriodicStepsNode>) {
          add_scale(n.period, scales);
        } else if constexpr (std::is_same_v<T, LogBlocksNode>) {
          add_scale(static_cast<double>(n.pattern.size()) * n.log_base, scales);
        } else if constexpr (std::is_same_v<T, SinusoidNode>) {
          add_scale(n.period, scales);
        } else if constexpr (std::is_same_v<T, LogSinusoidNode>) {
          add_scale(n.log_ratio, scales);
        } else if constexpr (std::is_same_v<T, SumNode>) {
          n.left.collect_scales(scales);
          n.right.collect_scales(scales);
        } else if constexpr (std::is_same_v<T, ScaleNode>) {
          n.inner.collect_scales(scales);
        } else if constexpr (std::is_same_v<T, ShiftNode>) {
          n.inner.collect_scales(scales);
        } else if constexpr (std::is_same_v<T, DilateNode>) {
          n.inner.collect_scales(scales);
        } else if constexpr (std::is_same_v<T, LiftedNode>) {
          add_scale(1.0, scales);
        } else if constexpr (std::is_same_v<T, ExpArgNode>) {
          n.inner.collect_scales(scales);
        }
      },
      node_->v);
}

int FunctionSpec::oscillatory_scale_count() const {
  std::vector<double> scales;
  collect_scales(scales);
  return static_cast<int>(scales.size());
}

void FunctionSpec::critical_anchors(double window, bool is_ratio, double lo, double hi,
                                    std::size_t budget, std::vector<double>& out) const {
  if (!(hi > lo) || budget == 0) return;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, PeriodicStepsNode>) {
          // windows starting or ending at a breakpoint, last periods first
          auto periods = static_cast<std::int64_t>(
              std::min<double>(64.0, static_cast<double>(budget) /
                                         (2.0 * n.breaks.size() + 1.0)));
          periods = std::max<std::int64_t>(periods, 1);
          double q_hi = std::floor(hi / n.period);
          for (std::int64_t k = 0; k <= periods; ++k) {
            double base = (q_hi - static_cast<double>(k)) * n.period;
            if (base + n.period < lo) break;
            for (double c : n.breaks) {
              push_clamped(base + c, lo, hi, out);
              push_clamped(base + c - window, lo, hi, out);
            }
          }
          for (double c : n.breaks) {  // a couple near the low end too
            double base = std::ceil(lo / n.period) * n.period;
            push_clamped(base + c, lo, hi, out);
          }
        } else if constexpr (std::is_same_v<T, SinusoidNode>) {
          // extremum-centred windows: anchors at extremum - window/2
          double q = std::floor((n.omega * hi + n.phase) / std::numbers::pi);
          auto count = static_cast<std::int64_t>(std::min<std::size_t>(budget, 64));
          for (std::int64_t k = 0; k < count; ++k) {
            double xe = ((q - static_cast<double>(k)) * std::numbers::pi +
                         std::numbers::pi / 2.0 - n.phase) / n.omega;
            if (xe + n.period < lo) break;
            push_clamped(xe - window * 0.5, lo, hi, out);
          }
        } else if constexpr (std::is_same_v<T, LogBlocksNode>) {
          std::int64_t k_hi = floor_log(hi, n.base, n.log_base);
          auto count = static_cast<std::int64_t>(std::min<std::size_t>(budget, 128));
          for (std::int64_t k = k_hi; k >= 0 && count > 0; --k, --count) {
            double bp = std::pow(n.base, static_cast<double>(k));
            if (bp * n.base < lo) break;
            push_clamped(bp, lo, hi, out);
            push_clamped(bp / window, lo, hi, out);
          }
        } else if constexpr (std::is_same_v<T, LogSinusoidNode>) {
          double lh = std::log(hi);
          double q = std::floor((n.omega * lh + n.phase) / std::numbers::pi);
          auto count = static_cast<std::int64_t>(std::min<std::size_t>(budget, 64));
          double half = std::sqrt(window);
          for (std::int64_t k = 0; k < count; ++k) {
            double le = ((q - static_cast<double>(k)) * std::numbers::pi +
                         std::numbers::pi / 2.0 - n.phase) / n.omega;
            double xe = std::exp(le);
            if (xe * n.ratio < lo) break;
            push_clamped(xe / half, lo, hi, out);
          }
        } else if constexpr (std::is_same_v<T, SumNode>) {
          n.left.critical_anchors(window, is_ratio, lo, hi, budget / 2, out);
          n.right.critical_anchors(window, is_ratio, lo, hi, budget / 2, out);
        } else if constexpr (std::is_same_v<T, ScaleNode>) {
          n.inner.critical_anchors(window, is_ratio, lo, hi, budget, out);
        } else if constexpr (std::is_same_v<T, ShiftNode>) {
          std::vector<double> tmp;
          n.inner.critical_anchors(window, is_ratio, lo + n.offset, hi + n.offset,
                                   budget, tmp);
          for (double t : tmp) push_clamped(t - n.offset, lo, hi, out);
        } else if constexpr (std::is_same_v<T, DilateNode>) {
          std::vector<double> tmp;
          n.inner.critical_anchors(window, is_ratio, lo * n.factor, hi * n.factor,
                                   budget, tmp);
          for (double t : tmp) push_clamped(t / n.factor, lo, hi, out);
        } else if constexpr (std::is_same_v<T, LiftedNode>) {
          std::vector<std::int64_t> ints;
          auto ilo = static_cast<std::int64_t>(std::ceil(lo));
          auto ihi = static_cast<std::int64_t>(std::floor(std::min(hi, kMaxLiftedArg)));
          n.seq.critical_anchors(ilo, ihi, budget, ints);
          for (std::int64_t v : ints) {
            push_clamped(static_cast<double>(v), lo, hi, out);
            push_clamped(static_cast<double>(v) / window, lo, hi, out);
          }
        } else if constexpr (std::is_same_v<T, ExpArgNode>) {
          std::vector<double> tmp;
          double ihi = std::exp(std::min(hi, 700.0));
          double ilo = std::exp(std::min(lo, 700.0));
          n.inner.critical_anchors(std::exp(std::min(window, 1.0)), true, ilo, ihi,
                                   budget, tmp);
          for (double t : tmp)
            if (t >= 1.0) push_clamped(std::log(t), lo, hi, out);
        }
      },
      node_->v);
}

// ---------------------------------------------------------------------------
// transforms

FunctionSpec transform_W(const FunctionSpec& f) {
  if (f.domain() != Domain::Multiplicative)
    throw DomainError("transform_W expects a multiplicative-domain function");
  return std::visit(
      [&f](const auto& n) -> FunctionSpec {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ConstantNode>) {
          return FunctionSpec::constant(Domain::Additive, n.value);
        } else if constexpr (std::is_same_v<T, LogBlocksNode>) {
          // blocks [b^k, b^(k+1)) become unit steps of width ln b
          auto p = n.pattern.size();
          std::vector<double> breaks(p), values(p);
          for (std::size_t i = 0; i < p; ++i) {
            breaks[i] = static_cast<double>(i) * n.log_base;
            values[i] = n.pattern[i] == '1' ? 1.0 : 0.0;
          }
          return FunctionSpec::additive_periodic(static_cast<double>(p) * n.log_base,
                                                 std::move(breaks), std::move(values));
        } else if constexpr (std::is_same_v<T, LogSinusoidNode>) {
          return FunctionSpec::sinusoid(n.amplitude, n.log_ratio, n.phase);
        } else if constexpr (std::is_same_v<T, SumNode>) {
          return FunctionSpec::sum(transform_W(n.left), transform_W(n.right));
        } else if constexpr (std::is_same_v<T, ScaleNode>) {
          return FunctionSpec::scale(n.factor, transform_W(n.inner));
        } else if constexpr (std::is_same_v<T, DilateNode>) {
          return FunctionSpec::shift(std::log(n.factor), transform_W(n.inner));
        } else if constexpr (std::is_same_v<T, LiftedNode>) {
          return FunctionSpec::exp_arg(f);
        } else {
          throw SpecError("node has no additive image under W");
        }
      },
      f.node_->v);
}

DiscretizedSequence::DiscretizedSequence(FunctionSpec f) : f_(std::move(f)) {
  if (f_.domain() != Domain::Multiplicative)
    throw DomainError("discretize_V1 expects a multiplicative-domain function");
}

double DiscretizedSequence::value(std::int64_t n) const {
  if (n < 0) throw DomainError("sequence index must be nonnegative");
  if (n == 0) return 0.0;
  return f_.integrate(static_cast<double>(n), static_cast<double>(n + 1));
}

double DiscretizedSequence::bound() const { return f_.bound(); }

DiscretizedSequence discretize_V1(const FunctionSpec& f) { return DiscretizedSequence(f); }

// ---------------------------------------------------------------------------
// serialization

nlohmann::json FunctionSpec::to_json() const {
  return std::visit(
      [](const auto& n) -> nlohmann::json {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ConstantNode>) {
          return {{"kind", "constant"}, {"value", n.value}};
        } else if constexpr (std::is_same_v<T, PeriodicStepsNode>) {
          return {{"kind", "additive_periodic"},
                  {"period", n.period},
                  {"breakpoints", n.breaks},
                  {"values", n.values}};
        } else if constexpr (std::is_same_v<T, LogBlocksNode>) {
          return {{"kind", "log_periodic_blocks"}, {"base", n.base}, {"pattern", n.pattern}};
        } else if constexpr (std::is_same_v<T, SinusoidNode>) {
          return {{"kind", "sinusoid"},
                  {"amplitude", n.amplitude},
                  {"period", n.period},
                  {"phase", n.phase}};
        } else if constexpr (std::is_same_v<T, LogSinusoidNode>) {
          return {{"kind", "log_sinusoid"},
                  {"amplitude", n.amplitude},
                  {"ratio", n.ratio},
                  {"phase", n.phase}};
        } else if constexpr (std::is_same_v<T, SumNode>) {
          return {{"kind", "sum"}, {"left", n.left.to_json()}, {"right", n.right.to_json()}};
        } else if constexpr (std::is_same_v<T, ScaleNode>) {
          return {{"kind", "scale"}, {"factor", n.factor}, {"inner", n.inner.to_json()}};
        } else if constexpr (std::is_same_v<T, ShiftNode>) {
          return {{"kind", "shift"}, {"offset", n.offset}, {"inner", n.inner.to_json()}};
        } else if constexpr (std::is_same_v<T, DilateNode>) {
          return {{"kind", "dilate"}, {"factor", n.factor}, {"inner", n.inner.to_json()}};
        } else if constexpr (std::is_same_v<T, LiftedNode>) {
          return {{"kind", "lifted_sequence"}, {"sequence", n.seq.to_json()}};
        } else {
          return {{"kind", "exp_arg"}, {"inner", n.inner.to_json()}};
        }
      },
      node_->v);
}

namespace {

template <typename T>
T get_field(const nlohmann::json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end())
    throw ParseError(std::string("missing field \"") + name + "\" in " + j.dump());
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError(std::string("bad type for field \"") + name + "\" in " + j.dump());
  }
}

}  // namespace

FunctionSpec FunctionSpec::from_json(const nlohmann::json& j, Domain domain) {
  if (!j.is_object()) throw ParseError("function node must be an object");
  auto kind = get_field<std::string>(j, "kind");
  try {
    if (kind == "constant") return constant(domain, get_field<double>(j, "value"));
    if (kind == "additive_periodic") {
      if (domain != Domain::Additive)
        throw SpecError("additive_periodic node in a multiplicative tree");
      return additive_periodic(get_field<double>(j, "period"),
                               get_field<std::vector<double>>(j, "breakpoints"),
                               get_field<std::vector<double>>(j, "values"));
    }
    if (kind == "log_periodic_blocks") {
      if (domain != Domain::Multiplicative)
        throw SpecError("log_periodic_blocks node in an additive tree");
      return log_periodic_blocks(get_field<double>(j, "base"),
                                 get_field<std::string>(j, "pattern"));
    }
    if (kind == "sinusoid") {
      if (domain != Domain::Additive) throw SpecError("sinusoid node in a multiplicative tree");
      return sinusoid(get_field<double>(j, "amplitude"), get_field<double>(j, "period"),
                      get_field<double>(j, "phase"));
    }
    if (kind == "log_sinusoid") {
      if (domain != Domain::Multiplicative)
        throw SpecError("log_sinusoid node in an additive tree");
      return log_sinusoid(get_field<double>(j, "amplitude"), get_field<double>(j, "ratio"),
                          get_field<double>(j, "phase"));
    }
    if (kind == "sum")
      return sum(from_json(j.at("left"), domain), from_json(j.at("right"), domain));
    if (kind == "scale")
      return scale(get_field<double>(j, "factor"), from_json(j.at("inner"), domain));
    if (kind == "shift") {
      if (domain != Domain::Additive) throw SpecError("shift node in a multiplicative tree");
      return shift(get_field<double>(j, "offset"), from_json(j.at("inner"), Domain::Additive));
    }
    if (kind == "dilate") {
      if (domain != Domain::Multiplicative) throw SpecError("dilate node in an additive tree");
      return dilate(get_field<double>(j, "factor"),
                    from_json(j.at("inner"), Domain::Multiplicative));
    }
    if (kind == "lifted_sequence") {
      if (domain != Domain::Multiplicative)
        throw SpecError("lifted_sequence node in an additive tree");
      return lift_V(SequenceSpec::from_json(j.at("sequence")));
    }
    if (kind == "exp_arg") {
      if (domain != Domain::Additive) throw SpecError("exp_arg node in a multiplicative tree");
      return exp_arg(from_json(j.at("inner"), Domain::Multiplicative));
    }
  } catch (const SpecError& e) {
    throw ParseError(std::string("invalid function node: ") + e.what());
  }
  throw ParseError("unknown function node kind \"" + kind + "\"");
}

bool FunctionSpec::tree_equal(const FunctionSpec& other) const {
  const auto& a = node_->v;
  const auto& b = other.node_->v;
  if (node_->domain != other.node_->domain || a.index() != b.index()) return false;
  if (const auto* c = std::get_if<ConstantNode>(&a))
    return c->value == std::get<ConstantNode>(b).value;
  if (const auto* s = std::get_if<PeriodicStepsNode>(&a)) {
    const auto& o = std::get<PeriodicStepsNode>(b);
    return s->period == o.period && s->breaks == o.breaks && s->values == o.values;
  }
  if (const auto* l = std::get_if<LogBlocksNode>(&a)) {
    const auto& o = std::get<LogBlocksNode>(b);
    return l->base == o.base && l->pattern == o.pattern;
  }
  if (const auto* s = std::get_if<SinusoidNode>(&a)) {
    const auto& o = std::get<SinusoidNode>(b);
    return s->amplitude == o.amplitude && s->period == o.period && s->phase == o.phase;
  }
  if (const auto* s = std::get_if<LogSinusoidNode>(&a)) {
    const auto& o = std::get<LogSinusoidNode>(b);
    return s->amplitude == o.amplitude && s->ratio == o.ratio && s->phase == o.phase;
  }
  if (const auto* s = std::get_if<SumNode>(&a)) {
    const auto& o = std::get<SumNode>(b);
    return s->left.tree_equal(o.left) && s->right.tree_equal(o.right);
  }
  if (const auto* s = std::get_if<ScaleNode>(&a)) {
    const auto& o = std::get<ScaleNode>(b);
    return s->factor == o.factor && s->inner.tree_equal(o.inner);
  }
  if (const auto* s = std::get_if<ShiftNode>(&a)) {
    const auto& o = std::get<ShiftNode>(b);
    return s->offset == o.offset && s->inner.tree_equal(o.inner);
  }
  if (const auto* s = std::get_if<DilateNode>(&a)) {
    const auto& o = std::get<DilateNode>(b);
    return s->factor == o.factor && s->inner.tree_equal(o.inner);
  }
  if (const auto* s = std::get_if<LiftedNode>(&a))
    return s->seq.tree_equal(std::get<LiftedNode>(b).seq);
  return std::get<ExpArgNode>(a).inner.tree_equal(std::get<ExpArgNode>(b).inner);
}

SpecInput SpecInput::from_file_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("spec file must hold a JSON object");
  if (j.contains("function")) {
    const auto& f = j.at("function");
    if (!f.is_object()) throw ParseError("\"function\" must be an object");
    auto ds = get_field<std::string>(f, "domain");
    Domain d;
    if (ds == "additive")
      d = Domain::Additive;
    else if (ds == "multiplicative")
      d = Domain::Multiplicative;
    else
      throw ParseError("domain must be \"additive\" or \"multiplicative\"");
    if (!f.contains("root")) throw ParseError("function spec needs a \"root\" node");
    return SpecInput{FunctionSpec::from_json(f.at("root"), d)};
  }
  if (j.contains("sequence")) return SpecInput{SequenceSpec::from_json(j.at("sequence"))};
  throw ParseError("spec file must contain a \"function\" or \"sequence\" entry");
}

nlohmann::json SpecInput::to_file_json() const {
  if (is_function()) {
    return {{"function",
             {{"domain", to_string(function().domain())}, {"root", function().to_json()}}}};
  }
  return {{"sequence", sequence().to_json()}};
}

}  // namespace ameans
