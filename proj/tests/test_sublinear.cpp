#include <algorithm>
#include <cmath>
#include <numbers>

#include <doctest.h>

#include "ameans/sublinear.hpp"
#include "oracles.hpp"

using namespace ameans;

namespace {

FunctionSpec blocks4_10() { return FunctionSpec::log_periodic_blocks(4.0, "10"); }
FunctionSpec square_wave() {
  return FunctionSpec::additive_periodic(2.0, {0.0, 1.0}, {1.0, 0.0});
}
SequenceSpec evens() { return SequenceSpec::arithmetic_indicator(0, 2); }

}  // namespace

TEST_CASE("k_upper: constant") {
  auto rep = k_upper(FunctionSpec::constant(Domain::Additive, 0.7),
                     SweepParams::defaults_additive());
  CHECK(rep.value == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(rep.monotone_ok);
}

TEST_CASE("k_upper: square wave windows fit inside on-intervals") {
  auto rep = k_upper(square_wave(), SweepParams::defaults_additive());
  CHECK(rep.value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rep.monotone_ok);

  // oracle: exhaustive anchor scan over one period at the finest theta
  auto sq = square_wave();
  double theta = rep.per_theta.back().theta;
  double scan = oracles::window_scan_max(
      [&](double a, double b) { return sq.integrate(a, b); }, 100.0, 102.0, theta, 20000);
  CHECK(rep.value == doctest::Approx(scan).epsilon(1e-9));
}

TEST_CASE("k_upper: sinusoid approaches the peak through the sinc factor") {
  auto rep = k_upper(FunctionSpec::sinusoid(1.0, 1.0), SweepParams::defaults_additive());
  CHECK(rep.value == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(rep.monotone_ok);
  // closed-form oracle: (2/(w theta)) sin(w theta / 2) at the centred peak
  double theta = rep.per_theta.back().theta;
  double w = 2.0 * std::numbers::pi;
  double sinc = 2.0 / (w * theta) * std::sin(w * theta / 2.0);
  CHECK(rep.value == doctest::Approx(sinc).epsilon(1e-7));
}

TEST_CASE("p_upper: constant, blocks, lifted evens") {
  auto p = SweepParams::defaults_multiplicative();
  CHECK(p_upper(FunctionSpec::constant(Domain::Multiplicative, 0.7), p).value ==
        doctest::Approx(0.7).epsilon(1e-12));

  // windows [4^2k, theta 4^2k] sit inside on-blocks
  auto rb = p_upper(blocks4_10(), p);
  CHECK(rb.value == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(rb.monotone_ok);

  auto re = p_upper(lift_V(evens()), p);
  CHECK(re.value == doctest::Approx(0.5).epsilon(2e-2));
  // direct window-sum oracle at x = 2^20 for the finest theta
  double theta = re.per_theta.back().theta;
  double x = 1048576.0;
  double direct = lift_V(evens()).integrate(x, theta * x) / ((theta - 1.0) * x);
  CHECK(direct == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(re.value >= direct - 1e-12);
}

TEST_CASE("q_upper: constant is exact, blocks and log-sinusoid reach 1") {
  auto p = SweepParams::defaults_multiplicative();
  CHECK(q_upper(FunctionSpec::constant(Domain::Multiplicative, 0.7), p).value ==
        doctest::Approx(0.7).epsilon(1e-12));

  CHECK(q_upper(blocks4_10(), p).value == doctest::Approx(1.0).epsilon(1e-3));

  // in log coordinates this is k_upper of a sinusoid with period ln 4
  auto rl = q_upper(FunctionSpec::log_sinusoid(1.0, 4.0), p);
  CHECK(rl.value == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("p_upper_seq / q_upper_seq: words, indicators, blocks") {
  auto p = SweepParams::defaults_discrete();
  CHECK(p_upper_seq(SequenceSpec::periodic_word({0.7}), p).value ==
        doctest::Approx(0.7).epsilon(1e-12));
  CHECK(q_upper_seq(SequenceSpec::periodic_word({0.7}), p).value ==
        doctest::Approx(0.7).epsilon(1e-12));

  auto pe = p_upper_seq(evens(), p);
  CHECK(pe.value == doctest::Approx(0.5).epsilon(1e-2));
  auto qe = q_upper_seq(evens(), p);
  CHECK(qe.value == doctest::Approx(0.5).epsilon(1e-2));

  auto pb = p_upper_seq(SequenceSpec::exponent_blocks(4, "10"), p);
  CHECK(pb.value == doctest::Approx(1.0).epsilon(1e-2));
  auto qb = q_upper_seq(SequenceSpec::exponent_blocks(4, "10"), p);
  CHECK(qb.value == doctest::Approx(1.0).epsilon(1e-2));

  // direct-summation oracle: the reported argmax window really has that mean
  auto n = static_cast<std::int64_t>(pe.per_theta.back().argmax_anchor);
  double theta = pe.per_theta.back().theta;
  auto m = static_cast<std::int64_t>(std::floor(theta * static_cast<double>(n)));
  double direct = oracles::direct_sum([&](std::int64_t i) { return evens().value(i); },
                                      n, m) /
                  static_cast<double>(m - n + 1);
  CHECK(pe.value == doctest::Approx(direct).epsilon(1e-12));

  auto nq = static_cast<std::int64_t>(qe.per_theta.back().argmax_anchor);
  double thq = qe.per_theta.back().theta;
  auto mq = static_cast<std::int64_t>(std::floor(thq * static_cast<double>(nq)));
  double hnum = oracles::direct_harmonic_sum(
      [&](std::int64_t i) { return evens().value(i); }, nq, mq);
  double hden =
      oracles::direct_harmonic_sum([](std::int64_t) { return 1.0; }, nq, mq);
  CHECK(qe.value == doctest::Approx(hnum / hden).epsilon(1e-10));
}

TEST_CASE("lower variants mirror the upper ones on the negated input") {
  auto p = SweepParams::defaults_multiplicative();
  auto lo = p_lower(blocks4_10(), p);
  CHECK(lo.value == doctest::Approx(0.0).epsilon(1e-3));  // windows in off-blocks
  CHECK(lo.is_lower);
  CHECK(lo.monotone_ok);

  auto a = SweepParams::defaults_additive();
  auto ls = k_lower(FunctionSpec::sinusoid(1.0, 1.0), a);
  CHECK(ls.value == doctest::Approx(-1.0).epsilon(1e-3));

  CHECK(k_lower(FunctionSpec::constant(Domain::Additive, 0.7), a).value ==
        doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("functional_range: collapse and spread") {
  auto p = SweepParams::defaults_multiplicative();
  auto rc = functional_range(Variant::P,
                             SpecInput{FunctionSpec::constant(Domain::Multiplicative, 0.7)},
                             p);
  CHECK(rc.lo() == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(rc.hi() == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(rc.lo() <= rc.hi() + 1e-9);

  auto rb = functional_range(Variant::P, SpecInput{blocks4_10()}, p);
  CHECK(rb.lo() == doctest::Approx(0.0).epsilon(1e-3));
  CHECK(rb.hi() == doctest::Approx(1.0).epsilon(1e-3));

  auto rd = functional_range(Variant::Pd, SpecInput{evens()},
                             SweepParams::defaults_discrete());
  CHECK(rd.lo() == doctest::Approx(0.5).epsilon(2e-2));
  CHECK(rd.hi() == doctest::Approx(0.5).epsilon(2e-2));
}

TEST_CASE("sublinearity, homogeneity, monotonicity") {
  auto p = SweepParams::defaults_multiplicative();
  auto f = blocks4_10();
  auto g = FunctionSpec::log_sinusoid(0.8, 3.0, 0.5);
  auto uf = p_upper(f, p);
  auto ug = p_upper(g, p);
  auto ufg = p_upper(FunctionSpec::sum(f, g), p);
  double tol = uf.tolerance + ug.tolerance + ufg.tolerance;
  CHECK(ufg.value <= uf.value + ug.value + 3.0 * tol);

  // positive homogeneity: identical anchor sets make this exact
  for (double k : {0.0, 0.5, 3.0}) {
    auto uk = p_upper(FunctionSpec::scale(k, f), p);
    CHECK(uk.value == doctest::Approx(k * uf.value).epsilon(1e-12));
  }

  // upper(1) = 1
  CHECK(p_upper(FunctionSpec::constant(Domain::Multiplicative, 1.0), p).value ==
        doctest::Approx(1.0).epsilon(1e-12));

  // monotone: f <= f + c for c >= 0
  auto uplus = p_upper(
      FunctionSpec::sum(f, FunctionSpec::constant(Domain::Multiplicative, 0.25)), p);
  CHECK(uf.value <= uplus.value + uf.tolerance + uplus.tolerance);
}

TEST_CASE("translation and dilation invariance") {
  auto a = SweepParams::defaults_additive();
  auto base = k_upper(square_wave(), a);
  for (double s : {0.3, 1.0, 7.0}) {
    auto shifted = k_upper(FunctionSpec::shift(s, square_wave()), a);
    CHECK(shifted.value ==
          doctest::Approx(base.value).epsilon(base.tolerance + shifted.tolerance));
  }
  auto m = SweepParams::defaults_multiplicative();
  auto pb = p_upper(blocks4_10(), m);
  auto qb = q_upper(blocks4_10(), m);
  for (double r : {2.0, std::exp(1.0), 10.0}) {
    auto pd = p_upper(FunctionSpec::dilate(r, blocks4_10()), m);
    auto qd = q_upper(FunctionSpec::dilate(r, blocks4_10()), m);
    CHECK(pd.value == doctest::Approx(pb.value).epsilon(5e-3));
    CHECK(qd.value == doctest::Approx(qb.value).epsilon(5e-3));
  }
}

TEST_CASE("estimates never exceed the certified bound") {
  auto p = SweepParams::defaults_multiplicative();
  auto specs = {blocks4_10(), lift_V(evens()),
                FunctionSpec::sum(FunctionSpec::scale(-1.5, blocks4_10()),
                                  FunctionSpec::log_sinusoid(0.5, 2.0, 0.1))};
  for (const auto& f : specs) {
    auto up = p_upper(f, p);
    auto lo = p_lower(f, p);
    auto uq = q_upper(f, p);
    CHECK(std::abs(up.value) <= f.bound() + 1e-12);
    CHECK(std::abs(lo.value) <= f.bound() + 1e-12);
    CHECK(std::abs(uq.value) <= f.bound() + 1e-12);
  }
  auto pd = SweepParams::defaults_discrete();
  for (const auto& s :
       {evens(), SequenceSpec::exponent_blocks(4, "10"),
        SequenceSpec::affine(-2.0, SequenceSpec::periodic_word({1.0, 0.0}), 0.5)}) {
    CHECK(std::abs(p_upper_seq(s, pd).value) <= s.bound() + 1e-12);
    CHECK(std::abs(q_upper_seq(s, pd).value) <= s.bound() + 1e-12);
  }
}

TEST_CASE("theta refinement is monotone across the suite specs") {
  auto p = SweepParams::defaults_multiplicative();
  auto a = SweepParams::defaults_additive();
  for (const auto& f : {blocks4_10(), lift_V(evens()),
                        FunctionSpec::log_sinusoid(1.0, 4.0),
                        FunctionSpec::dilate(3.0, blocks4_10())}) {
    CHECK(p_upper(f, p).monotone_ok);
    CHECK(q_upper(f, p).monotone_ok);
  }
  for (const auto& f : {square_wave(), FunctionSpec::sinusoid(1.0, 1.0),
                        transform_W(lift_V(evens()))}) {
    CHECK(k_upper(f, a).monotone_ok);
  }
  auto pd = SweepParams::defaults_discrete();
  for (const auto& s : {evens(), SequenceSpec::exponent_blocks(4, "10"),
                        SequenceSpec::periodic_word({1.0, 0.0, 1.0})}) {
    CHECK(p_upper_seq(s, pd).monotone_ok);
    CHECK(q_upper_seq(s, pd).monotone_ok);
  }
}

TEST_CASE("schedule validation and skip exhaustion") {
  SweepParams bad = SweepParams::defaults_multiplicative();
  bad.theta_schedule = {1.25, 1.5};  // too few, wrong order
  CHECK_THROWS_AS(p_upper(blocks4_10(), bad), ScheduleError);

  SweepParams k_for_p = SweepParams::defaults_additive();
  CHECK_THROWS_AS(p_upper(blocks4_10(), k_for_p), ScheduleError);

  // theta so close to 1 that no window holds min_cells integers below n_max
  SweepParams tight = SweepParams::defaults_discrete(14);
  tight.n_max = 100000;
  CHECK_THROWS_AS(p_upper_seq(evens(), tight), ScheduleError);

  // same exhaustion on the continuous side for lifted steps
  SweepParams tightc = SweepParams::defaults_multiplicative(14);
  tightc.x_max = 100000.0;
  CHECK_THROWS_AS(p_upper(lift_V(evens()), tightc), ScheduleError);

  CHECK_THROWS_AS(k_upper(square_wave(), SweepParams::defaults_multiplicative()),
                  ScheduleError);
}

TEST_CASE("variant dispatch checks input type") {
  CHECK_THROWS_AS(upper_variant(Variant::P, SpecInput{evens()},
                                SweepParams::defaults_multiplicative()),
                  DomainError);
  CHECK_THROWS_AS(upper_variant(Variant::Pd, SpecInput{blocks4_10()},
                                SweepParams::defaults_discrete()),
                  DomainError);
}

TEST_CASE("SweepReport serialization") {
  auto rep = p_upper(blocks4_10(), SweepParams::defaults_multiplicative());
  auto j = rep.to_json();
  CHECK(j.at("value").get<double>() == rep.value);
  CHECK(j.at("per_theta").size() == rep.per_theta.size());
  auto csv = rep.to_csv();
  CHECK(csv.rfind("theta,limsup_estimate,argmax_anchor\n", 0) == 0);
  // one line per theta plus header
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + rep.per_theta.size());
}
