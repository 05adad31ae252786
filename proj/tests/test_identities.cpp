#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <doctest.h>

#include "ameans/identities.hpp"

using namespace ameans;

namespace {

FunctionSpec blocks4_10() { return FunctionSpec::log_periodic_blocks(4.0, "10"); }
SequenceSpec evens() { return SequenceSpec::arithmetic_indicator(0, 2); }

const SuiteParams& params() {
  static SuiteParams p;
  return p;
}

}  // namespace

TEST_CASE("p_equals_kw on the multiplicative fixtures") {
  for (const auto& f : {FunctionSpec::constant(Domain::Multiplicative, 0.7), blocks4_10(),
                        FunctionSpec::log_sinusoid(1.0, 4.0), lift_V(evens())}) {
    auto r = check_p_equals_kw(f, params());
    CHECK(r.passed);
    CHECK(std::abs(r.lhs - r.rhs) <= 5e-3);
  }
  auto r = check_p_equals_kw(blocks4_10(), params());
  CHECK(r.lhs == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("q_equals_kw and p_equals_q") {
  for (const auto& f :
       {FunctionSpec::constant(Domain::Multiplicative, 0.7), blocks4_10(),
        FunctionSpec::log_sinusoid(1.0, 4.0), lift_V(evens()),
        FunctionSpec::dilate(3.0, blocks4_10())}) {
    auto rq = check_q_equals_kw(f, params());
    CHECK(rq.passed);
    CHECK(std::abs(rq.lhs - rq.rhs) <= 5e-3);
    auto rpq = check_p_equals_q(f, params());
    CHECK(rpq.passed);
  }
}

TEST_CASE("mean_collapse passes where the mean exists and skips elsewhere") {
  auto c = SpecInput{FunctionSpec::constant(Domain::Multiplicative, 0.7)};
  CHECK(check_mean_collapse(c, Variant::P, params()).passed);
  CHECK(check_mean_collapse(c, Variant::Q, params()).passed);

  auto ev = SpecInput{lift_V(evens())};
  auto rp = check_mean_collapse(ev, Variant::P, params());
  CHECK(rp.passed);
  CHECK(rp.diagnostics.at("range").at(0).get<double>() == doctest::Approx(0.5).epsilon(2e-2));

  // W-image collapse through R on the additive side
  auto wev = SpecInput{transform_W(lift_V(evens()))};
  CHECK(check_mean_collapse(wev, Variant::K, params()).passed);

  // oscillating input: vacuous, must be Skip, not Pass
  auto rb = check_mean_collapse(SpecInput{blocks4_10()}, Variant::P, params());
  CHECK(rb.status == CheckStatus::Skip);
  CHECK(!rb.passed);

  auto rsq = check_mean_collapse(
      SpecInput{FunctionSpec::additive_periodic(2.0, {0.0, 1.0}, {1.0, 0.0})}, Variant::K,
      params());
  CHECK(rsq.status == CheckStatus::Skip);

  // discrete collapse
  auto w101 = SpecInput{SequenceSpec::periodic_word({1.0, 0.0, 1.0})};
  auto rw = check_mean_collapse(w101, Variant::Pd, params());
  CHECK(rw.passed);
  CHECK(rw.diagnostics.at("mean_value").get<double>() ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-2));
  CHECK(check_mean_collapse(w101, Variant::Qd, params()).passed);
  CHECK(check_mean_collapse(SpecInput{SequenceSpec::exponent_blocks(4, "10")}, Variant::Pd,
                            params())
            .status == CheckStatus::Skip);
}

TEST_CASE("window_sum_identity: exact on the lemma grid") {
  for (const auto& s : {evens(), SequenceSpec::exponent_blocks(4, "10"),
                        SequenceSpec::periodic_word({1.0, 0.0, 1.0})}) {
    auto r = check_window_sum_identity(s, params());
    CHECK(r.passed);
    CHECK(r.lhs <= 1e-9);
  }
  // hand count: evens in [10, 15] with theta = 1.5 -> {10, 12, 14}
  auto lifted = lift_V(evens());
  CHECK(lifted.integrate(10.0, 16.0) == 3.0);
  CHECK(evens().sum_range(10, 15) == 3.0);
}

TEST_CASE("discrete window sup matches the lifted continuous one") {
  for (const auto& s : {evens(), SequenceSpec::exponent_blocks(4, "10"),
                        SequenceSpec::periodic_word({1.0, 0.0, 1.0})}) {
    auto r = check_discrete_continuous(s, params());
    CHECK(r.passed);
  }
}

TEST_CASE("logsum_bound: pinned value at PeriodicWord([1]), n=1, theta=2") {
  auto ones = SequenceSpec::periodic_word({1.0});
  auto r = check_logsum_bound(ones, 1, 2.0);
  CHECK(r.passed);
  // |ln 3 - (1 + 1/2)| and pi^2/12, both to 1e-9
  CHECK(r.lhs == doctest::Approx(0.4013877113318902).epsilon(1e-9));
  CHECK(r.rhs == doctest::Approx(0.8224670334241132).epsilon(1e-12));

  auto zeros = SequenceSpec::periodic_word({0.0});
  auto rz = check_logsum_bound(zeros, 1, 2.0);
  CHECK(rz.passed);
  CHECK(rz.lhs == 0.0);

  // tail-sum oracle: discrepancy at n=100 is below 0.5 * sum_{i>=100} 1/i^2
  auto re = check_logsum_bound(evens(), 100, 1.1);
  CHECK(re.passed);
  CHECK(re.lhs <= 0.005);
  CHECK(re.diagnostics.at("within_sharper").get<bool>());
}

TEST_CASE("logsum_bound holds across the whole lemma grid") {
  for (const auto& s : {evens(), SequenceSpec::exponent_blocks(4, "10"),
                        SequenceSpec::periodic_word({1.0, 0.0, 1.0}),
                        SequenceSpec::periodic_word({1.0})}) {
    auto r = check_logsum_bound_grid(s, params());
    CHECK(r.passed);
    CHECK(r.diagnostics.at("all_within_sharper").get<bool>());
  }
}

TEST_CASE("qd_equals_pd") {
  for (const auto& s : {evens(), SequenceSpec::exponent_blocks(4, "10"),
                        SequenceSpec::periodic_word({1.0, 0.0, 1.0}),
                        SequenceSpec::periodic_word({0.7})}) {
    CHECK(check_qd_equals_pd(s, params()).passed);
  }
}

TEST_CASE("reports are self-verifying") {
  auto r1 = check_p_equals_kw(blocks4_10(), params());
  CHECK(r1.passed == r1.recompute_passed());
  auto r2 = check_logsum_bound(evens(), 10, 1.5);
  CHECK(r2.passed == r2.recompute_passed());
  auto r3 = check_mean_collapse(SpecInput{blocks4_10()}, Variant::P, params());
  CHECK(r3.status == CheckStatus::Skip);
  CHECK(!r3.recompute_passed());
}

TEST_CASE("run_suite: empty corpus, ordering, determinism") {
  CHECK(run_suite({}, params()).empty());

  std::vector<CorpusEntry> corpus;
  corpus.push_back({"blocks", SpecInput{blocks4_10()}});
  corpus.push_back({"evens_seq", SpecInput{evens()}});
  corpus.push_back({"word", SpecInput{SequenceSpec::periodic_word({1.0, 0.0, 1.0})}});

  auto reports = run_suite(corpus, params());
  REQUIRE(!reports.empty());
  // ordering by (check name, input index)
  for (std::size_t i = 1; i < reports.size(); ++i) {
    CHECK(reports[i - 1].name <= reports[i].name);
  }
  auto summary = summarize(reports);
  CHECK(summary.failed == 0);
  CHECK(summary.errors == 0);

  // determinism: a second run yields identical JSON
  auto reports2 = run_suite(corpus, params());
  REQUIRE(reports.size() == reports2.size());
  for (std::size_t i = 0; i < reports.size(); ++i)
    CHECK(reports[i].to_json().dump() == reports2[i].to_json().dump());
}

TEST_CASE("run_suite_on_dir: default corpus is green; malformed files are captured") {
  auto reports = run_suite_on_dir(AMEANS_CORPUS_DIR, params());
  auto summary = summarize(reports);
  CHECK(summary.failed == 0);
  CHECK(summary.errors == 0);
  CHECK(summary.passed > 0);

  // corpus with one malformed JSON: one parse report, the rest still run
  namespace fs = std::filesystem;
  auto tmp = fs::temp_directory_path() / "ameans_corpus_test";
  fs::create_directories(tmp);
  {
    std::ofstream good(tmp / "good.json");
    good << SpecInput{FunctionSpec::constant(Domain::Multiplicative, 0.5)}
                .to_file_json()
                .dump();
    std::ofstream bad(tmp / "broken.json");
    bad << "{ not json";
  }
  auto rep2 = run_suite_on_dir(tmp.string(), params());
  int parse_errors = 0, passed = 0;
  for (const auto& r : rep2) {
    if (r.name == "parse" && r.status == CheckStatus::Error) ++parse_errors;
    if (r.status == CheckStatus::Pass) ++passed;
  }
  CHECK(parse_errors == 1);
  CHECK(passed > 0);
  fs::remove_all(tmp);
}
