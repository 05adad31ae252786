#include <algorithm>
#include <cmath>
#include <utility>
#include <variant>

#include "ameans/fnspec.hpp"
#include "ameans/numeric.hpp"

namespace ameans {

namespace {

struct WordData {
  std::vector<double> values;
  std::vector<double> psum;  // psum[i] = sum of values[0..i-1], size p+1
  double period_sum = 0.0;
  double max_abs = 0.0;

  explicit WordData(std::vector<double> v) : values(std::move(v)) {
    psum.resize(values.size() + 1, 0.0);
    for (std::size_t i = 0; i < values.size(); ++i) {
      psum[i + 1] = psum[i] + values[i];
      max_abs = std::max(max_abs, std::abs(values[i]));
    }
    period_sum = psum.back();
  }

  std::int64_t period() const { return static_cast<std::int64_t>(values.size()); }

  double at(std::int64_t n) const { return values[static_cast<std::size_t>(n % period())]; }

  // sum of at(i) for 0 <= i < n
  double prefix(std::int64_t n) const {
    std::int64_t p = period();
    std::int64_t full = n / p, rem = n % p;
    return static_cast<double>(full) * period_sum + psum[static_cast<std::size_t>(rem)];
  }
};

struct WordNode {
  WordData word;
};

struct IndicatorNode {
  std::int64_t residue;
  std::int64_t modulus;
};

struct ExponentBlocksNode {
  std::int64_t base;
  std::string pattern;
};

struct PrefixNode {
  std::vector<double> prefix;
  WordData tail;
  double prefix_psum_total = 0.0;
  std::vector<double> prefix_psum;  // size len+1
};

struct AffineNode {
  double scale;
  SequenceSpec inner;
  double offset;
};

using SeqVariant =
    std::variant<WordNode, IndicatorNode, ExponentBlocksNode, PrefixNode, AffineNode>;

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw SpecError(std::string("non-finite value in ") + what);
}

// Sum of ln((k+c0+dc)/(k+c0)) over integer k in [k0, k1], via a short direct
// prefix and Euler-Maclaurin on the smooth tail. Stable: every term is of the
// size of the result, no large-argument cancellation.
double log_ratio_em(std::int64_t k0, std::int64_t k1, double c0, double dc) {
  Accumulator acc;
  std::int64_t k = k0;
  for (; k <= k1 && static_cast<double>(k) + c0 < 256.0; ++k)
    acc.add(std::log1p(dc / (static_cast<double>(k) + c0)));
  if (k > k1) return acc.value();
  double lo = static_cast<double>(k), hi = static_cast<double>(k1);
  auto g = [&](double x) { return std::log1p(dc / (x + c0)); };
  auto gp = [&](double x) { return -dc / ((x + c0 + dc) * (x + c0)); };
  // antiderivative of g: F(x) = (x+c0) log1p(dc/(x+c0)) + dc ln(x+c0+dc)
  auto F = [&](double x) {
    return (x + c0) * std::log1p(dc / (x + c0)) + dc * std::log(x + c0 + dc);
  };
  acc.add(F(hi) - F(lo));
  acc.add(0.5 * (g(lo) + g(hi)));
  acc.add((gp(hi) - gp(lo)) / 12.0);
  return acc.value();
}

// Sum of ln((i+1)/i) over i in [lo, hi] with i ≡ residue (mod modulus), lo >= 1.
double log_ratio_residue_sum(std::int64_t lo, std::int64_t hi, std::int64_t residue,
                             std::int64_t modulus) {
  if (lo < 1) lo = 1;
  if (hi < lo) return 0.0;
  std::int64_t r = residue % modulus;
  if (r < 0) r += modulus;
  if (modulus == 1) {
    // telescopes exactly
    return std::log(static_cast<double>(hi + 1)) - std::log(static_cast<double>(lo));
  }
  std::int64_t first = lo + ((r - lo) % modulus + modulus) % modulus;
  if (first > hi) return 0.0;
  std::int64_t count = (hi - first) / modulus + 1;
  if (count <= 4096) {
    Accumulator acc;
    for (std::int64_t i = first, c = 0; c < count; ++c, i += modulus)
      acc.add(std::log1p(1.0 / static_cast<double>(i)));
    return acc.value();
  }
  // i = modulus*k + r: ln((i+1)/i) = ln((k + (r+1)/m)/(k + r/m))
  double m = static_cast<double>(modulus);
  std::int64_t k0 = (first - r) / modulus;
  return log_ratio_em(k0, k0 + count - 1, static_cast<double>(r) / m, 1.0 / m);
}

}  // namespace

struct SequenceSpec::Node {
  double bound;
  SeqVariant v;
};

SequenceSpec::SequenceSpec(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

SequenceSpec SequenceSpec::periodic_word(std::vector<double> values) {
  if (values.empty()) throw SpecError("periodic_word: empty value list");
  for (double v : values) require_finite(v, "periodic_word");
  WordData w(std::move(values));
  double b = w.max_abs;
  return SequenceSpec(std::make_shared<Node>(Node{b, WordNode{std::move(w)}}));
}

SequenceSpec SequenceSpec::arithmetic_indicator(std::int64_t residue, std::int64_t modulus) {
  if (modulus <= 0) throw SpecError("arithmetic_indicator: modulus must be positive");
  if (residue < 0) throw SpecError("arithmetic_indicator: residue must be nonnegative");
  return SequenceSpec(
      std::make_shared<Node>(Node{1.0, IndicatorNode{residue % modulus, modulus}}));
}

SequenceSpec SequenceSpec::exponent_blocks(std::int64_t base, std::string pattern) {
  if (base < 2) throw SpecError("exponent_blocks: base must be >= 2");
  if (pattern.empty()) throw SpecError("exponent_blocks: empty pattern");
  bool any = false;
  for (char c : pattern) {
    if (c != '0' && c != '1') throw SpecError("exponent_blocks: pattern must be 0/1 word");
    any = any || c == '1';
  }
  double b = any ? 1.0 : 0.0;
  return SequenceSpec(
      std::make_shared<Node>(Node{b, ExponentBlocksNode{base, std::move(pattern)}}));
}

SequenceSpec SequenceSpec::explicit_then_periodic(std::vector<double> prefix,
                                                  std::vector<double> tail) {
  if (tail.empty()) throw SpecError("explicit_then_periodic: empty tail word");
  for (double v : prefix) require_finite(v, "explicit_then_periodic");
  for (double v : tail) require_finite(v, "explicit_then_periodic");
  PrefixNode n{std::move(prefix), WordData(std::move(tail)), 0.0, {}};
  n.prefix_psum.resize(n.prefix.size() + 1, 0.0);
  double b = n.tail.max_abs;
  for (std::size_t i = 0; i < n.prefix.size(); ++i) {
    n.prefix_psum[i + 1] = n.prefix_psum[i] + n.prefix[i];
    b = std::max(b, std::abs(n.prefix[i]));
  }
  n.prefix_psum_total = n.prefix_psum.back();
  return SequenceSpec(std::make_shared<Node>(Node{b, std::move(n)}));
}

SequenceSpec SequenceSpec::affine(double scale, SequenceSpec inner, double offset) {
  require_finite(scale, "affine");
  require_finite(offset, "affine");
  double b = std::abs(scale) * inner.bound() + std::abs(offset);
  return SequenceSpec(
      std::make_shared<Node>(Node{b, AffineNode{scale, std::move(inner), offset}}));
}

double SequenceSpec::bound() const { return node_->bound; }

double SequenceSpec::value(std::int64_t n) const {
  if (n < 0) throw DomainError("sequence index must be nonnegative");
  return std::visit(
      [n](const auto& node) -> double {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, WordNode>) {
          return node.word.at(n);
        } else if constexpr (std::is_same_v<T, IndicatorNode>) {
          return n % node.modulus == node.residue ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<T, ExponentBlocksNode>) {
          if (n == 0) return 0.0;
          std::int64_t k = floor_log_int(n, node.base);
          auto p = static_cast<std::int64_t>(node.pattern.size());
          return node.pattern[static_cast<std::size_t>(k % p)] == '1' ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<T, PrefixNode>) {
          auto len = static_cast<std::int64_t>(node.prefix.size());
          if (n < len) return node.prefix[static_cast<std::size_t>(n)];
          return node.tail.at(n - len);
        } else {
          return node.scale * node.inner.value(n) + node.offset;
        }
      },
      node_->v);
}

double SequenceSpec::sum_range(std::int64_t lo, std::int64_t hi) const {
  if (lo < 0) lo = 0;
  if (hi < lo) return 0.0;
  return std::visit(
      [lo, hi, this](const auto& node) -> double {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, WordNode>) {
          return node.word.prefix(hi + 1) - node.word.prefix(lo);
        } else if constexpr (std::is_same_v<T, IndicatorNode>) {
          auto count_upto = [&node](std::int64_t x) -> std::int64_t {
            return x < node.residue ? 0 : (x - node.residue) / node.modulus + 1;
          };
          return static_cast<double>(count_upto(hi) - count_upto(lo - 1));
        } else if constexpr (std::is_same_v<T, ExponentBlocksNode>) {
          std::int64_t a = std::max<std::int64_t>(lo, 1);
          if (hi < a) return 0.0;
          auto p = static_cast<std::int64_t>(node.pattern.size());
          std::int64_t k_hi = floor_log_int(hi, node.base);
          Accumulator acc;
          for (std::int64_t k = floor_log_int(a, node.base); k <= k_hi; ++k) {
            if (node.pattern[static_cast<std::size_t>(k % p)] != '1') continue;
            std::int64_t blo = ipow_saturating(node.base, k);
            std::int64_t bhi = ipow_saturating(node.base, k + 1) - 1;
            std::int64_t c = std::min(hi, bhi) - std::max(a, blo) + 1;
            if (c > 0) acc.add(static_cast<double>(c));
          }
          return acc.value();
        } else if constexpr (std::is_same_v<T, PrefixNode>) {
          auto len = static_cast<std::int64_t>(node.prefix.size());
          double s = 0.0;
          if (lo < len) {
            std::int64_t a = lo, b = std::min(hi, len - 1);
            s += node.prefix_psum[static_cast<std::size_t>(b + 1)] -
                 node.prefix_psum[static_cast<std::size_t>(a)];
          }
          if (hi >= len) {
            std::int64_t a = std::max(lo, len) - len, b = hi - len;
            s += node.tail.prefix(b + 1) - node.tail.prefix(a);
          }
          return s;
        } else {
          double c = static_cast<double>(hi - lo + 1);
          return node.scale * node.inner.sum_range(lo, hi) + node.offset * c;
        }
      },
      node_->v);
}

double SequenceSpec::harmonic_sum_range(std::int64_t lo, std::int64_t hi) const {
  if (lo < 1) lo = 1;
  if (hi < lo) return 0.0;
  return std::visit(
      [lo, hi](const auto& node) -> double {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, WordNode>) {
          std::int64_t p = node.word.period();
          Accumulator acc;
          for (std::int64_t r = 0; r < p; ++r) {
            double v = node.word.values[static_cast<std::size_t>(r)];
            if (v != 0.0) acc.add(v * harmonic_residue_sum(lo, hi, r, p));
          }
          return acc.value();
        } else if constexpr (std::is_same_v<T, IndicatorNode>) {
          std::int64_t first = std::max<std::int64_t>(lo, node.residue == 0 ? node.modulus : 1);
          return harmonic_residue_sum(first, hi, node.residue, node.modulus);
        } else if constexpr (std::is_same_v<T, ExponentBlocksNode>) {
          auto p = static_cast<std::int64_t>(node.pattern.size());
          std::int64_t k_hi = floor_log_int(hi, node.base);
          Accumulator acc;
          for (std::int64_t k = floor_log_int(lo, node.base); k <= k_hi; ++k) {
            if (node.pattern[static_cast<std::size_t>(k % p)] != '1') continue;
            std::int64_t blo = ipow_saturating(node.base, k);
            std::int64_t bhi = ipow_saturating(node.base, k + 1) - 1;
            acc.add(harmonic_residue_sum(std::max(lo, blo), std::min(hi, bhi), 0, 1));
          }
          return acc.value();
        } else if constexpr (std::is_same_v<T, PrefixNode>) {
          auto len = static_cast<std::int64_t>(node.prefix.size());
          Accumulator acc;
          for (std::int64_t i = lo; i <= std::min(hi, len - 1); ++i)
            acc.add(node.prefix[static_cast<std::size_t>(i)] / static_cast<double>(i));
          if (hi >= len) {
            std::int64_t p = node.tail.period();
            std::int64_t a = std::max(lo, len);
            for (std::int64_t r = 0; r < p; ++r) {
              double v = node.tail.values[static_cast<std::size_t>(r)];
              if (v != 0.0) acc.add(v * harmonic_residue_sum(a, hi, (len + r) % p, p));
            }
          }
          return acc.value();
        } else {
          return node.scale * node.inner.harmonic_sum_range(lo, hi) +
                 node.offset * harmonic_residue_sum(lo, hi, 0, 1);
        }
      },
      node_->v);
}

double SequenceSpec::log_weight_sum_range(std::int64_t lo, std::int64_t hi) const {
  if (lo < 1) lo = 1;
  if (hi < lo) return 0.0;
  return std::visit(
      [lo, hi](const auto& node) -> double {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, WordNode>) {
          std::int64_t p = node.word.period();
          Accumulator acc;
          for (std::int64_t r = 0; r < p; ++r) {
            double v = node.word.values[static_cast<std::size_t>(r)];
            if (v != 0.0) acc.add(v * log_ratio_residue_sum(lo, hi, r, p));
          }
          return acc.value();
        } else if constexpr (std::is_same_v<T, IndicatorNode>) {
          std::int64_t first = std::max<std::int64_t>(lo, node.residue == 0 ? node.modulus : 1);
          return log_ratio_residue_sum(first, hi, node.residue, node.modulus);
        } else if constexpr (std::is_same_v<T, ExponentBlocksNode>) {
          auto p = static_cast<std::int64_t>(node.pattern.size());
          std::int64_t k_hi = floor_log_int(hi, node.base);
          Accumulator acc;
          for (std::int64_t k = floor_log_int(lo, node.base); k <= k_hi; ++k) {
            if (node.pattern[static_cast<std::size_t>(k % p)] != '1') continue;
            std::int64_t blo = ipow_saturating(node.base, k);
            std::int64_t bhi = ipow_saturating(node.base, k + 1) - 1;
            acc.add(log_ratio_residue_sum(std::max(lo, blo), std::min(hi, bhi), 0, 1));
          }
          return acc.value();
        } else if constexpr (std::is_same_v<T, PrefixNode>) {
          auto len = static_cast<std::int64_t>(node.prefix.size());
          Accumulator acc;
          for (std::int64_t i = lo; i <= std::min(hi, len - 1); ++i)
            acc.add(node.prefix[static_cast<std::size_t>(i)] *
                    std::log1p(1.0 / static_cast<double>(i)));
          if (hi >= len) {
            std::int64_t p = node.tail.period();
            std::int64_t a = std::max(lo, len);
            for (std::int64_t r = 0; r < p; ++r) {
              double v = node.tail.values[static_cast<std::size_t>(r)];
              if (v != 0.0) acc.add(v * log_ratio_residue_sum(a, hi, (len + r) % p, p));
            }
          }
          return acc.value();
        } else {
          return node.scale * node.inner.log_weight_sum_range(lo, hi) +
                 node.offset * log_ratio_residue_sum(lo, hi, 0, 1);
        }
      },
      node_->v);
}

void SequenceSpec::critical_anchors(std::int64_t lo, std::int64_t hi, std::size_t budget,
                                    std::vector<std::int64_t>& out) const {
  if (lo < 1) lo = 1;
  if (hi < lo || budget == 0) return;
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, WordNode>) {
          std::int64_t p = node.word.period();
          for (std::int64_t n : geometric_integers(lo, hi, 12)) {
            std::int64_t snapped = n - n % p;
            if (snapped >= lo && snapped <= hi) out.push_back(snapped);
          }
        } else if constexpr (std::is_same_v<T, IndicatorNode>) {
          for (std::int64_t n : geometric_integers(lo, hi, 12)) {
            std::int64_t snapped = n - ((n - node.residue) % node.modulus +
                                        node.modulus) % node.modulus;
            if (snapped >= lo && snapped <= hi) out.push_back(snapped);
          }
        } else if constexpr (std::is_same_v<T, ExponentBlocksNode>) {
          for (std::int64_t k = floor_log_int(lo, node.base);; ++k) {
            std::int64_t b = ipow_saturating(node.base, k);
            if (b > hi) break;
            if (b >= lo) out.push_back(b);
            std::int64_t next = ipow_saturating(node.base, k + 1);
            if (next - 1 >= lo && next - 1 <= hi) out.push_back(next - 1);
          }
        } else if constexpr (std::is_same_v<T, PrefixNode>) {
          auto len = static_cast<std::int64_t>(node.prefix.size());
          std::int64_t p = node.tail.period();
          for (std::int64_t n : geometric_integers(std::max(lo, len), hi, 12)) {
            std::int64_t snapped = n - (n - len) % p;
            if (snapped >= lo && snapped <= hi) out.push_back(snapped);
          }
        } else {
          node.inner.critical_anchors(lo, hi, budget, out);
        }
      },
      node_->v);
}

bool SequenceSpec::has_unit_cells() const {
  return std::visit(
      [](const auto& node) -> bool {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, WordNode>) {
          return node.word.period() > 1;
        } else if constexpr (std::is_same_v<T, IndicatorNode>) {
          return node.modulus > 1;
        } else if constexpr (std::is_same_v<T, ExponentBlocksNode>) {
          return false;  // runs grow like n
        } else if constexpr (std::is_same_v<T, PrefixNode>) {
          return node.tail.period() > 1;
        } else {
          return node.inner.has_unit_cells();
        }
      },
      node_->v);
}

std::int64_t SequenceSpec::transient_length() const {
  return std::visit(
      [](const auto& node) -> std::int64_t {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, PrefixNode>) {
          return static_cast<std::int64_t>(node.prefix.size());
        } else if constexpr (std::is_same_v<T, AffineNode>) {
          return node.inner.transient_length();
        } else {
          return 0;
        }
      },
      node_->v);
}

bool SequenceSpec::tree_equal(const SequenceSpec& other) const {
  const auto& a = node_->v;
  const auto& b = other.node_->v;
  if (a.index() != b.index()) return false;
  if (const auto* w = std::get_if<WordNode>(&a))
    return w->word.values == std::get<WordNode>(b).word.values;
  if (const auto* i = std::get_if<IndicatorNode>(&a)) {
    const auto& o = std::get<IndicatorNode>(b);
    return i->residue == o.residue && i->modulus == o.modulus;
  }
  if (const auto* e = std::get_if<ExponentBlocksNode>(&a)) {
    const auto& o = std::get<ExponentBlocksNode>(b);
    return e->base == o.base && e->pattern == o.pattern;
  }
  if (const auto* p = std::get_if<PrefixNode>(&a)) {
    const auto& o = std::get<PrefixNode>(b);
    return p->prefix == o.prefix && p->tail.values == o.tail.values;
  }
  const auto& x = std::get<AffineNode>(a);
  const auto& y = std::get<AffineNode>(b);
  return x.scale == y.scale && x.offset == y.offset && x.inner.tree_equal(y.inner);
}

nlohmann::json SequenceSpec::to_json() const {
  return std::visit(
      [](const auto& node) -> nlohmann::json {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, WordNode>) {
          return {{"kind", "periodic_word"}, {"values", node.word.values}};
        } else if constexpr (std::is_same_v<T, IndicatorNode>) {
          return {{"kind", "arithmetic_indicator"},
                  {"residue", node.residue},
                  {"modulus", node.modulus}};
        } else if constexpr (std::is_same_v<T, ExponentBlocksNode>) {
          return {{"kind", "exponent_blocks"}, {"base", node.base}, {"pattern", node.pattern}};
        } else if constexpr (std::is_same_v<T, PrefixNode>) {
          return {{"kind", "explicit_then_periodic"},
                  {"prefix", node.prefix},
                  {"tail", node.tail.values}};
        } else {
          return {{"kind", "affine"},
                  {"scale", node.scale},
                  {"inner", node.inner.to_json()},
                  {"offset", node.offset}};
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

SequenceSpec SequenceSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("sequence node must be an object");
  auto kind = get_field<std::string>(j, "kind");
  try {
    if (kind == "periodic_word")
      return periodic_word(get_field<std::vector<double>>(j, "values"));
    if (kind == "arithmetic_indicator")
      return arithmetic_indicator(get_field<std::int64_t>(j, "residue"),
                                  get_field<std::int64_t>(j, "modulus"));
    if (kind == "exponent_blocks")
      return exponent_blocks(get_field<std::int64_t>(j, "base"),
                             get_field<std::string>(j, "pattern"));
    if (kind == "explicit_then_periodic")
      return explicit_then_periodic(get_field<std::vector<double>>(j, "prefix"),
                                    get_field<std::vector<double>>(j, "tail"));
    if (kind == "affine")
      return affine(get_field<double>(j, "scale"), from_json(j.at("inner")),
                    get_field<double>(j, "offset"));
  } catch (const SpecError& e) {
    throw ParseError(std::string("invalid sequence node: ") + e.what());
  }
  throw ParseError("unknown sequence node kind \"" + kind + "\"");
}

}  // namespace ameans
