#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ameans/fnspec.hpp"
#include "ameans/means.hpp"
#include "ameans/sublinear.hpp"

namespace ameans {

enum class CheckStatus { Pass, Fail, Skip, Error };

std::string to_string(CheckStatus s);

/// Outcome of one identity or bound check. Self-verifying: `passed` can be
/// recomputed from lhs/rhs/tolerance and the comparison kind.
///   "equality": passed iff |lhs - rhs| <= tolerance
///   "bound":    passed iff lhs <= rhs + 1e-9
struct IdentityReport {
  std::string name;
  std::string input_name;
  double lhs = 0.0;
  double rhs = 0.0;
  double tolerance = 0.0;
  std::string comparison = "equality";
  CheckStatus status = CheckStatus::Error;
  bool passed = false;
  nlohmann::json inputs;
  nlohmann::json diagnostics;

  bool recompute_passed() const;
  nlohmann::json to_json() const;
};

/// Parameter bundle for the whole suite. The additive sweep used by the
/// W-conjugation checks is derived from the multiplicative one through the
/// change of variables (theta_add = ln theta_mult, x -> ln x), so both sides
/// probe corresponding windows.
struct SuiteParams {
  SweepParams mult = SweepParams::defaults_multiplicative();
  SweepParams additive = SweepParams::defaults_additive();
  SweepParams discrete = SweepParams::defaults_discrete();
  MeanCriterion cesaro;
  MeanCriterion expw = exp_mean_default_criterion();
  SeqMeanCriterion seq_mean;
  std::vector<std::int64_t> lemma_n = {1, 2, 3, 5, 8, 13, 21, 34, 50};
  std::vector<double> lemma_theta = {1.1, 1.5, 2.0, 4.0};

  static SuiteParams from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// P(f) = K(Wf): multiplicative window sup versus additive window sup of the
/// exponentially reparametrized function.
IdentityReport check_p_equals_kw(const FunctionSpec& f, const SuiteParams& p);

/// Q(f) = K(Wf): the log-weighted window sup equals the same additive sup.
IdentityReport check_q_equals_kw(const FunctionSpec& f, const SuiteParams& p);

/// P(f) = Q(f).
IdentityReport check_p_equals_q(const FunctionSpec& f, const SuiteParams& p);

/// When the matching mean (M, R or M_d) converges to a, the full
/// [lower, upper] range of the given variant collapses to a. Skipped (not
/// passed) when the mean does not converge.
IdentityReport check_mean_collapse(const SpecInput& input, Variant v, const SuiteParams& p);

/// Exact finite identity ∫_n^(floor(theta n)+1) (Vf) = Σ_{i=n..floor(theta n)} f(i)
/// over the (n, theta) grid; tolerance 1e-9, step integration is exact.
IdentityReport check_window_sum_identity(const SequenceSpec& s, const SuiteParams& p);

/// Asymptotic agreement of the discrete window sup with the continuous
/// window sup of the lifted function.
IdentityReport check_discrete_continuous(const SequenceSpec& s, const SuiteParams& p);

/// |∫_n^(floor(theta n)+1) (Vf) dt/t - Σ f(i)/i| <= bound * pi^2/12, with the
/// sharper per-term tail bound reported in diagnostics.
IdentityReport check_logsum_bound(const SequenceSpec& s, std::int64_t n, double theta);

/// Aggregated logsum bound over the suite grid (worst discrepancy reported).
IdentityReport check_logsum_bound_grid(const SequenceSpec& s, const SuiteParams& p);

/// Pd(f) = Qd(f).
IdentityReport check_qd_equals_pd(const SequenceSpec& s, const SuiteParams& p);

struct CorpusEntry {
  std::string name;
  SpecInput input;
};

struct SuiteSummary {
  int passed = 0;
  int failed = 0;
  int skipped = 0;
  int errors = 0;
};

/// Runs every applicable check on every corpus element; per-item errors are
/// captured as Error reports and never abort the suite. Reports are ordered
/// by (check name, input index) and the output is deterministic.
std::vector<IdentityReport> run_suite(const std::vector<CorpusEntry>& corpus,
                                      const SuiteParams& p);

SuiteSummary summarize(const std::vector<IdentityReport>& reports);

/// Loads every *.json file in a directory (sorted by filename) as a corpus.
/// Throws ParseError on the first malformed file.
std::vector<CorpusEntry> load_corpus_dir(const std::string& dir);

/// Lenient loader: malformed files become Error reports (name "parse") so a
/// suite over the directory can continue past them.
struct CorpusLoad {
  std::vector<CorpusEntry> entries;
  std::vector<IdentityReport> parse_errors;
};
CorpusLoad load_corpus_dir_lenient(const std::string& dir);

/// run_suite over a directory, parse failures included as Error reports.
std::vector<IdentityReport> run_suite_on_dir(const std::string& dir, const SuiteParams& p);

}  // namespace ameans
