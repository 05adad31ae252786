#include <cmath>

#include <doctest.h>

#include "ameans/means.hpp"
#include "oracles.hpp"

using namespace ameans;

namespace {

FunctionSpec blocks4_10() { return FunctionSpec::log_periodic_blocks(4.0, "10"); }
SequenceSpec evens() { return SequenceSpec::arithmetic_indicator(0, 2); }

}  // namespace

TEST_CASE("cesaro_mean: constants converge exactly") {
  auto est = cesaro_mean(FunctionSpec::constant(Domain::Multiplicative, 0.7));
  CHECK(est.converged);
  // partial averages are c(1 - 1/x); the band collapses onto c
  CHECK(est.lo == doctest::Approx(0.7).epsilon(1e-4));
  CHECK(est.hi == doctest::Approx(0.7).epsilon(1e-6));
  CHECK(est.lo <= 0.7);
}

TEST_CASE("cesaro_mean: lifted even indicator converges to 1/2") {
  auto est = cesaro_mean(lift_V(evens()));
  CHECK(est.converged);
  CHECK(est.midpoint() == doctest::Approx(0.5).epsilon(2e-2));
  CHECK(est.hi - est.lo <= est.band_tol);
}

TEST_CASE("cesaro_mean: geometric blocks oscillate in [0.2, 0.8]") {
  // closed-form oracle: partial mass up to 4^(2m) is (16^m - 1)/5, so the
  // ratio at off-block ends tends to 1/5 and at on-block ends to 4/5.
  auto est = cesaro_mean(blocks4_10());
  CHECK(!est.converged);
  CHECK(est.lo == doctest::Approx(0.2).epsilon(1e-4));
  CHECK(est.hi == doctest::Approx(0.7955).epsilon(1e-2));
  CHECK(est.lo >= 0.18);
  CHECK(est.hi <= 0.82);

  // cross-check a couple of partial averages against brute quadrature
  auto b = blocks4_10();
  for (double x : {300.0, 5000.0}) {
    double brute = oracles::midpoint_quadrature(
        [&](double t) { return b.evaluate(t); }, 1.0, x, 400000) / x;
    CHECK(b.integrate(1.0, x) / x == doctest::Approx(brute).epsilon(1e-3));
  }
}

TEST_CASE("cesaro_mean: sample abscissas strictly increase and lo <= hi") {
  auto est = cesaro_mean(blocks4_10());
  CHECK(est.lo <= est.hi);
  for (std::size_t i = 1; i < est.tail_samples.size(); ++i)
    CHECK(est.tail_samples[i].first > est.tail_samples[i - 1].first);
  CHECK(est.tail_samples.front().first == 16.0);
  CHECK(est.tail_samples.back().first == 16777216.0);
}

TEST_CASE("exp_mean: constant converges to c") {
  auto est = exp_mean(FunctionSpec::constant(Domain::Additive, 0.7));
  CHECK(est.converged);
  // S(x) = c(1 - e^-x): the tail is within the transient of c
  CHECK(est.midpoint() == doctest::Approx(0.7).epsilon(1e-3));
  CHECK(est.hi == doctest::Approx(0.7).epsilon(1e-6));
}

TEST_CASE("exp_mean: square wave oscillates between 1/(1+e) and e/(1+e)") {
  // two-point recurrence fixed points: at on-block ends S -> e/(1+e),
  // at off-block ends S -> 1/(1+e)
  auto sq = FunctionSpec::additive_periodic(2.0, {0.0, 1.0}, {1.0, 0.0});
  MeanCriterion c;
  c.x_min = 4.0;
  c.x_max = 40.0;
  c.n_samples = 73;  // spacing 0.5 hits integer phases exactly
  c.band_tol = 1e-2;
  auto est = exp_mean(sq, c);
  double e = std::exp(1.0);
  CHECK(!est.converged);
  CHECK(est.lo == doctest::Approx(1.0 / (1.0 + e)).epsilon(1e-6));
  CHECK(est.hi == doctest::Approx(e / (1.0 + e)).epsilon(1e-6));
  CHECK(est.lo > 0.0);
  CHECK(est.hi < 1.0);
}

TEST_CASE("exp_mean: W-image of the lifted even indicator converges to 1/2") {
  // oracle: the Cesaro mean on the multiplicative side
  auto est = exp_mean(transform_W(lift_V(evens())));
  CHECK(est.converged);
  CHECK(est.midpoint() == doctest::Approx(0.5).epsilon(2e-2));
}

TEST_CASE("M and R partial values agree through W sample by sample") {
  // S(ln x) telescopes to (1/x) ∫_1^x f: the two estimators compute the same
  // quantity along two different exact routes.
  auto specs = {blocks4_10(), lift_V(evens()),
                FunctionSpec::scale(0.5, FunctionSpec::log_sinusoid(1.0, 4.0, 0.2))};
  for (const auto& f : specs) {
    auto m = cesaro_mean(f);
    auto r = exp_mean(transform_W(f));
    REQUIRE(m.tail_samples.size() == r.tail_samples.size());
    for (std::size_t i = 0; i < m.tail_samples.size(); ++i) {
      CHECK(std::log(m.tail_samples[i].first) ==
            doctest::Approx(r.tail_samples[i].first).epsilon(1e-12));
      CHECK(m.tail_samples[i].second ==
            doctest::Approx(r.tail_samples[i].second).epsilon(1e-9));
    }
    CHECK(m.converged == r.converged);
  }
}

TEST_CASE("cesaro_mean of a lifted sequence agrees with the discrete mean") {
  auto seqs = {evens(), SequenceSpec::periodic_word({1.0, 0.0, 1.0}),
               SequenceSpec::exponent_blocks(4, "10")};
  for (const auto& s : seqs) {
    auto cont = cesaro_mean(lift_V(s));
    auto disc = cesaro_mean_seq(s);
    CHECK(cont.converged == disc.converged);
    if (cont.converged)
      CHECK(std::abs(cont.midpoint() - disc.midpoint()) <=
            cont.band_tol + disc.band_tol);
  }
}

TEST_CASE("cesaro_mean: linearity on convergent inputs") {
  auto f = FunctionSpec::constant(Domain::Multiplicative, 0.3);
  auto g = lift_V(evens());
  auto ef = cesaro_mean(f);
  auto eg = cesaro_mean(g);
  auto es = cesaro_mean(FunctionSpec::sum(f, g));
  REQUIRE(ef.converged);
  REQUIRE(eg.converged);
  REQUIRE(es.converged);
  CHECK(std::abs(es.midpoint() - ef.midpoint() - eg.midpoint()) <= 2.0 * es.band_tol);
}

TEST_CASE("cesaro_mean: dilation leaves verdict and value alone") {
  for (double r : {2.0, std::exp(1.0), 10.0}) {
    auto base = lift_V(evens());
    auto dil = FunctionSpec::dilate(r, base);
    auto e0 = cesaro_mean(base);
    auto e1 = cesaro_mean(dil);
    CHECK(e0.converged == e1.converged);
    CHECK(e0.midpoint() == doctest::Approx(e1.midpoint()).epsilon(2e-2));

    auto b0 = cesaro_mean(blocks4_10());
    auto b1 = cesaro_mean(FunctionSpec::dilate(r, blocks4_10()));
    CHECK(b0.converged == b1.converged);  // both false
  }
}

TEST_CASE("cesaro_mean_seq: words and indicators") {
  auto w = cesaro_mean_seq(SequenceSpec::periodic_word({2.5}), std::int64_t{100000});
  CHECK(w.converged);
  CHECK(w.midpoint() == doctest::Approx(2.5).epsilon(1e-12));

  auto e = cesaro_mean_seq(evens());
  CHECK(e.converged);
  CHECK(e.midpoint() == doctest::Approx(0.5).epsilon(1e-2));

  auto w101 = cesaro_mean_seq(SequenceSpec::periodic_word({1.0, 0.0, 1.0}));
  CHECK(w101.converged);
  CHECK(w101.midpoint() == doctest::Approx(2.0 / 3.0).epsilon(1e-2));
}

TEST_CASE("cesaro_mean_seq: exponent blocks oscillate in [0.2, 0.8]") {
  auto est = cesaro_mean_seq(SequenceSpec::exponent_blocks(4, "10"));
  CHECK(!est.converged);
  CHECK(est.lo == doctest::Approx(0.2).epsilon(1e-3));
  CHECK(est.hi == doctest::Approx(0.7956).epsilon(1e-2));

  // direct-summation oracle at n = 4^10
  double direct = oracles::direct_sum(
      [s = SequenceSpec::exponent_blocks(4, "10")](std::int64_t i) { return s.value(i); },
      1, 1048576);
  CHECK(est.tail_samples.back().second ==
        doctest::Approx(direct / 1048576.0).epsilon(1e-12));
}

TEST_CASE("exp_mean: overflow guard on exp-reparametrized inputs") {
  // pushing the grid past e^709 must fail loudly, not silently overflow
  MeanCriterion c;
  c.x_min = 16.0;
  c.x_max = 800.0;
  c.n_samples = 8;
  c.band_tol = 1e-2;
  CHECK_THROWS_AS(exp_mean(transform_W(lift_V(evens())), c), OverflowGuardError);
}

TEST_CASE("means: domain and criterion validation") {
  CHECK_THROWS_AS(cesaro_mean(FunctionSpec::constant(Domain::Additive, 1.0)), DomainError);
  CHECK_THROWS_AS(exp_mean(FunctionSpec::constant(Domain::Multiplicative, 1.0)),
                  DomainError);
  CHECK_THROWS_AS(cesaro_mean_seq(evens(), std::int64_t{8}), DomainError);
  MeanCriterion bad;
  bad.x_min = 10.0;
  bad.x_max = 5.0;
  CHECK_THROWS_AS(cesaro_mean(blocks4_10(), bad), DomainError);
}

TEST_CASE("LimitEstimate JSON shape") {
  auto est = cesaro_mean(FunctionSpec::constant(Domain::Multiplicative, 1.0));
  auto j = est.to_json();
  CHECK(j.contains("lo"));
  CHECK(j.contains("hi"));
  CHECK(j.contains("converged"));
  CHECK(j.at("samples").is_array());
  CHECK(j.at("samples").size() == est.tail_samples.size());
}
