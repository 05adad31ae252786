// End-to-end checks of the command-line tool via popen.

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "ameans/fnspec.hpp"

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  std::string cmd = std::string(AMEANS_CLI_PATH) + " " + args + " 2>/dev/null";
  CliResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string corpus(const std::string& name) {
  return std::string(AMEANS_CORPUS_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("upper --kind P on the geometric blocks fixture") {
  auto r = run_cli("upper --kind P " + corpus("blocks4.json"));
  REQUIRE(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("value").get<double>() == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(j.at("monotone_ok").get<bool>());
  CHECK(j.at("per_theta").is_array());
}

TEST_CASE("mean --kind Md on a sequence fixture") {
  auto r = run_cli("mean --kind Md " + corpus("periodic_word_101.json"));
  REQUIRE(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("converged").get<bool>());
  CHECK(0.5 * (j.at("lo").get<double>() + j.at("hi").get<double>()) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-2));
}

TEST_CASE("density of the even numbers") {
  auto r = run_cli("density " + corpus("extra/evens_seq.json"));
  REQUIRE(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("natural_density").get<double>() == doctest::Approx(0.5).epsilon(1e-2));
  CHECK(j.at("polya_upper").get<double>() == doctest::Approx(0.5).epsilon(1e-2));
  CHECK(j.at("polya_lower").get<double>() == doctest::Approx(0.5).epsilon(1e-2));
}

TEST_CASE("sweep emits CSV with the fixed column order") {
  auto r = run_cli("sweep --kind Q " + corpus("log_sinusoid4.json") + " --csv -");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.rfind("theta,limsup_estimate,argmax_anchor\n", 0) == 0);
}

TEST_CASE("invalid inputs exit with code 2") {
  CHECK(run_cli("upper --kind P /nonexistent.json").exit_code == 2);
  CHECK(run_cli("upper --kind Z " + corpus("blocks4.json")).exit_code == 2);
  // kind/input mismatch: K needs an additive function
  CHECK(run_cli("upper --kind K " + corpus("blocks4.json")).exit_code == 2);
  // unknown flags are errors, not warnings
  CHECK(run_cli("upper --kind P --frobnicate " + corpus("blocks4.json")).exit_code != 0);
}

TEST_CASE("shipped corpus files round-trip through parse and print") {
  for (const char* name :
       {"blocks4.json", "constant_0p7.json", "evens_lifted.json", "exponent_blocks4.json",
        "log_sinusoid4.json", "periodic_word_101.json", "sinusoid_1_1.json",
        "square_wave.json", "extra/evens_seq.json"}) {
    std::ifstream in(corpus(name));
    REQUIRE(in.good());
    nlohmann::json j;
    in >> j;
    auto parsed = ameans::SpecInput::from_file_json(j);
    auto printed = parsed.to_file_json();
    auto reparsed = ameans::SpecInput::from_file_json(printed);
    if (parsed.is_function())
      CHECK(parsed.function().tree_equal(reparsed.function()));
    else
      CHECK(parsed.sequence().tree_equal(reparsed.sequence()));
    CHECK(printed.dump() == reparsed.to_file_json().dump());
  }
}
