#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ameans/errors.hpp"

namespace ameans {

/// Ambient space of a function: Additive is L^inf([0,inf)) under translation
/// x -> x+s, Multiplicative is L^inf([1,inf)) under dilation x -> r*x.
enum class Domain { Additive, Multiplicative };

std::string to_string(Domain d);

/// Bounded real sequence on the nonnegative integers, given by a closed set
/// of generators. Values are exact and deterministic; `bound()` certifies
/// |value(n)| <= bound for all n.
class SequenceSpec {
 public:
  static SequenceSpec periodic_word(std::vector<double> values);
  static SequenceSpec arithmetic_indicator(std::int64_t residue, std::int64_t modulus);
  static SequenceSpec exponent_blocks(std::int64_t base, std::string pattern);
  static SequenceSpec explicit_then_periodic(std::vector<double> prefix,
                                             std::vector<double> tail);
  static SequenceSpec affine(double scale, SequenceSpec inner, double offset);

  double value(std::int64_t n) const;
  double bound() const;

  /// Sum of value(i) over lo <= i <= hi (0 when lo > hi). Closed forms per
  /// generator; never iterates over the range.
  double sum_range(std::int64_t lo, std::int64_t hi) const;

  /// Sum of value(i)/i over lo <= i <= hi, lo >= 1.
  double harmonic_sum_range(std::int64_t lo, std::int64_t hi) const;

  /// Sum of value(i) * ln((i+1)/i) over lo <= i <= hi, lo >= 1. This is the
  /// exact integral of the lifted step function against dt/t.
  double log_weight_sum_range(std::int64_t lo, std::int64_t hi) const;

  /// Integer anchors where window sups of the lifted function are likely to
  /// be attained (block starts, residue-aligned points, word-period starts).
  void critical_anchors(std::int64_t lo, std::int64_t hi, std::size_t budget,
                        std::vector<std::int64_t>& out) const;

  /// True when the sequence has structure at the unit-integer scale (words,
  /// residue indicators): window estimates then need many integers per
  /// window. Exponent blocks have runs growing like n and report false.
  bool has_unit_cells() const;

  /// Indices below this are an explicit transient (prefix values); window
  /// anchors must start beyond it, since the limsup ignores any finite head.
  std::int64_t transient_length() const;

  nlohmann::json to_json() const;
  static SequenceSpec from_json(const nlohmann::json& j);
  bool tree_equal(const SequenceSpec& other) const;

 private:
  struct Node;
  explicit SequenceSpec(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
  friend class FunctionSpec;
};

/// Bounded measurable function on [0,inf) (additive) or [1,inf)
/// (multiplicative), as an expression tree with exact pointwise evaluation
/// and exact (breakpoint-splitting / antiderivative) integration.
class FunctionSpec {
 public:
  // Leaves. Constants live in either domain; step profiles and sinusoids in
  // x are additive; geometric blocks and sinusoids in ln x are multiplicative.
  static FunctionSpec constant(Domain domain, double value);
  static FunctionSpec additive_periodic(double period, std::vector<double> breakpoints,
                                        std::vector<double> values);
  static FunctionSpec log_periodic_blocks(double base, std::string pattern);
  static FunctionSpec sinusoid(double amplitude, double period, double phase = 0.0);
  static FunctionSpec log_sinusoid(double amplitude, double ratio, double phase = 0.0);

  // Composites.
  static FunctionSpec sum(FunctionSpec left, FunctionSpec right);
  static FunctionSpec scale(double factor, FunctionSpec inner);
  static FunctionSpec shift(double offset, FunctionSpec inner);   // additive only
  static FunctionSpec dilate(double factor, FunctionSpec inner);  // multiplicative only

  /// f(x) = inner(e^x): the additive-domain view of a multiplicative spec.
  /// Closes the tree language under the W transform; integrates exactly via
  /// the substitution  ∫ inner(e^t) dt = ∫ inner(s) ds/s.
  static FunctionSpec exp_arg(FunctionSpec multiplicative_inner);

  Domain domain() const;
  double bound() const;

  double evaluate(double x) const;

  /// ∫_a^b f(t) dt, exact for every tree in the language (step nodes split at
  /// breakpoints, sinusoids use antiderivatives).
  double integrate(double a, double b) const;

  /// ∫_a^b f(t) dt/t, multiplicative domain, 1 <= a <= b.
  double integrate_log(double a, double b) const;

  /// ∫_0^h f(x+u) e^(u-h) du, additive domain. The shifted exponent keeps
  /// every factor <= 1, so this never overflows regardless of x.
  double integrate_expw(double x, double h) const;

  /// Smallest anchor X such that a window starting at X (length `window` if
  /// !is_ratio, [X, window*X] otherwise) spans at least `min_cells` unit
  /// cells of any integer-step structure in the tree. 0/1 when no such
  /// structure is present.
  double min_anchor(double window, bool is_ratio, std::int64_t min_cells) const;

  /// Largest anchor keeping every evaluation inside the exactly representable
  /// range (floor() in int64, e^x finite). Effectively unbounded for trees
  /// without integer-step or exp-reparametrized nodes.
  double max_anchor(double window, bool is_ratio) const;

  /// Window-start candidates in [lo, hi] where the sliding-window average is
  /// likely maximal or minimal: step breakpoints (window aligned at either
  /// end) and sinusoid extremum-centred windows.
  void critical_anchors(double window, bool is_ratio, double lo, double hi,
                        std::size_t budget, std::vector<double>& out) const;

  /// True when the tree contains a lifted sequence (directly or behind
  /// exp_arg), i.e. window estimates carry a 1/min_cells resolution term.
  bool has_integer_cells() const;

  /// Number of distinct oscillation scales in the tree (periods of steps and
  /// sinusoids, log-periods of their multiplicative counterparts). Sums of
  /// incommensurate components make the window sup harder to locate, which
  /// widens the reported sweep tolerance.
  int oscillatory_scale_count() const;

  nlohmann::json to_json() const;
  static FunctionSpec from_json(const nlohmann::json& j, Domain domain);
  bool tree_equal(const FunctionSpec& other) const;

  friend FunctionSpec transform_W(const FunctionSpec& f);
  friend FunctionSpec lift_V(const SequenceSpec& s);

 private:
  struct Node;
  explicit FunctionSpec(std::shared_ptr<const Node> node);
  void collect_scales(std::vector<double>& scales) const;
  std::shared_ptr<const Node> node_;
};

/// W: L^inf([1,inf)) -> L^inf([0,inf)), (Wf)(x) = f(e^x). Structure-mapped
/// where possible (blocks -> periodic steps, log-sinusoid -> sinusoid,
/// dilation -> translation); lifted sequences map to exp_arg.
FunctionSpec transform_W(const FunctionSpec& f);

/// V: sequences -> L^inf([1,inf)), (Vf)(x) = f(floor(x)).
FunctionSpec lift_V(const SequenceSpec& s);

/// V1: L^inf([1,inf)) -> sequences, (V1 f)(n) = ∫_n^(n+1) f. Defined for
/// n >= 1; n = 0 yields 0 by convention. Satisfies V1(V(f)) = f exactly.
class DiscretizedSequence {
 public:
  explicit DiscretizedSequence(FunctionSpec f);
  double value(std::int64_t n) const;
  double bound() const;

 private:
  FunctionSpec f_;
};

DiscretizedSequence discretize_V1(const FunctionSpec& f);

/// A parsed input: either a function or a sequence. File forms:
///   {"function": {"domain": "additive"|"multiplicative", "root": <node>}}
///   {"sequence": <node>}
struct SpecInput {
  std::variant<FunctionSpec, SequenceSpec> value;

  bool is_function() const { return std::holds_alternative<FunctionSpec>(value); }
  const FunctionSpec& function() const { return std::get<FunctionSpec>(value); }
  const SequenceSpec& sequence() const { return std::get<SequenceSpec>(value); }

  static SpecInput from_file_json(const nlohmann::json& j);
  nlohmann::json to_file_json() const;
};

}  // namespace ameans
