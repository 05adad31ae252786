#include "ameans/identities.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "ameans/numeric.hpp"

namespace ameans {

namespace {

constexpr double kBoundSlack = 1e-9;

IdentityReport make_equality(std::string name, double lhs, double rhs, double tol) {
  IdentityReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.tolerance = tol;
  r.comparison = "equality";
  r.status = std::abs(lhs - rhs) <= tol ? CheckStatus::Pass : CheckStatus::Fail;
  r.passed = r.status == CheckStatus::Pass;
  return r;
}

IdentityReport make_bound(std::string name, double lhs, double rhs) {
  IdentityReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.tolerance = 0.0;
  r.comparison = "bound";
  r.status = lhs <= rhs + kBoundSlack ? CheckStatus::Pass : CheckStatus::Fail;
  r.passed = r.status == CheckStatus::Pass;
  return r;
}

IdentityReport make_skip(std::string name, std::string reason) {
  IdentityReport r;
  r.name = std::move(name);
  r.status = CheckStatus::Skip;
  r.passed = false;
  r.comparison = "equality";
  r.diagnostics["reason"] = std::move(reason);
  return r;
}

nlohmann::json theta_table(const SweepReport& rep) {
  nlohmann::json t = nlohmann::json::array();
  for (const auto& e : rep.per_theta)
    t.push_back({{"theta", e.theta}, {"estimate", e.estimate}, {"anchor", e.argmax_anchor}});
  return t;
}

// Additive sweep corresponding to a multiplicative one under x -> ln x:
// window ratios become window lengths, the anchor range maps through ln.
SweepParams log_image(const SweepParams& mult) {
  SweepParams a = mult;
  a.theta_schedule.clear();
  for (double t : mult.theta_schedule) a.theta_schedule.push_back(std::log1p(t - 1.0));
  a.x_min = std::max(std::log(std::max(mult.x_min, 1.0)), 1e-3);
  a.x_max = std::log(mult.x_max);
  return a;
}

}  // namespace

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skip: return "skip";
    default: return "error";
  }
}

bool IdentityReport::recompute_passed() const {
  if (status == CheckStatus::Skip || status == CheckStatus::Error) return false;
  if (comparison == "bound") return lhs <= rhs + kBoundSlack;
  return std::abs(lhs - rhs) <= tolerance;
}

nlohmann::json IdentityReport::to_json() const {
  return {{"name", name},
          {"input", input_name},
          {"lhs", lhs},
          {"rhs", rhs},
          {"tolerance", tolerance},
          {"comparison", comparison},
          {"status", to_string(status)},
          {"passed", passed},
          {"inputs", inputs},
          {"diagnostics", diagnostics}};
}

SuiteParams SuiteParams::from_json(const nlohmann::json& j) {
  SuiteParams p;
  if (!j.is_object()) throw ParseError("params file must hold a JSON object");
  if (j.contains("theta_steps")) {
    int jmax = j.at("theta_steps").get<int>();
    if (jmax < 5) throw ParseError("theta_steps must be at least 5");
    p.mult = SweepParams::defaults_multiplicative(jmax);
    p.additive = SweepParams::defaults_additive(jmax);
    p.discrete = SweepParams::defaults_discrete(jmax);
  }
  if (j.contains("x_max")) {
    double v = j.at("x_max").get<double>();
    p.mult.x_max = v;
    p.additive.x_max = v;
    p.cesaro.x_max = v;
    p.expw = exp_mean_default_criterion();
    p.expw.x_max = std::log(v);
  }
  if (j.contains("n_max")) {
    auto v = j.at("n_max").get<std::int64_t>();
    p.discrete.n_max = v;
    p.seq_mean.n_max = v;
  }
  if (j.contains("anchors")) {
    int v = j.at("anchors").get<int>();
    p.mult.anchors_per_theta = p.additive.anchors_per_theta =
        p.discrete.anchors_per_theta = v;
  }
  if (j.contains("stride_fraction")) {
    double v = j.at("stride_fraction").get<double>();
    p.mult.stride_fraction = p.additive.stride_fraction = p.discrete.stride_fraction = v;
  }
  if (j.contains("min_cells")) {
    auto v = j.at("min_cells").get<std::int64_t>();
    p.mult.min_cells = p.additive.min_cells = p.discrete.min_cells = v;
  }
  if (j.contains("band_tol")) {
    double v = j.at("band_tol").get<double>();
    p.cesaro.band_tol = p.expw.band_tol = p.seq_mean.band_tol = v;
  }
  return p;
}

nlohmann::json SuiteParams::to_json() const {
  return {{"mult", mult.to_json()},
          {"additive", additive.to_json()},
          {"discrete", discrete.to_json()},
          {"cesaro",
           {{"x_min", cesaro.x_min},
            {"x_max", cesaro.x_max},
            {"n_samples", cesaro.n_samples},
            {"band_tol", cesaro.band_tol}}},
          {"lemma_n", lemma_n},
          {"lemma_theta", lemma_theta}};
}

IdentityReport check_p_equals_kw(const FunctionSpec& f, const SuiteParams& p) {
  SweepReport lhs = p_upper(f, p.mult);
  SweepReport rhs = k_upper(transform_W(f), log_image(p.mult));
  auto r = make_equality("p_equals_kw", lhs.value, rhs.value,
                         lhs.tolerance + rhs.tolerance);
  r.diagnostics["lhs_per_theta"] = theta_table(lhs);
  r.diagnostics["rhs_per_theta"] = theta_table(rhs);
  return r;
}

IdentityReport check_q_equals_kw(const FunctionSpec& f, const SuiteParams& p) {
  SweepReport lhs = q_upper(f, p.mult);
  SweepReport rhs = k_upper(transform_W(f), log_image(p.mult));
  auto r = make_equality("q_equals_kw", lhs.value, rhs.value,
                         lhs.tolerance + rhs.tolerance);
  r.diagnostics["lhs_per_theta"] = theta_table(lhs);
  r.diagnostics["rhs_per_theta"] = theta_table(rhs);
  return r;
}

IdentityReport check_p_equals_q(const FunctionSpec& f, const SuiteParams& p) {
  SweepReport lhs = p_upper(f, p.mult);
  SweepReport rhs = q_upper(f, p.mult);
  auto r = make_equality("p_equals_q", lhs.value, rhs.value,
                         lhs.tolerance + rhs.tolerance);
  r.diagnostics["lhs_per_theta"] = theta_table(lhs);
  r.diagnostics["rhs_per_theta"] = theta_table(rhs);
  return r;
}

IdentityReport check_mean_collapse(const SpecInput& input, Variant v, const SuiteParams& p) {
  std::string name = "mean_collapse_" + to_string(v);
  LimitEstimate mean;
  const SweepParams* sweep = nullptr;
  switch (v) {
    case Variant::K:
      mean = exp_mean(input.function(), p.expw);
      sweep = &p.additive;
      break;
    case Variant::P:
    case Variant::Q:
      mean = cesaro_mean(input.function(), p.cesaro);
      sweep = &p.mult;
      break;
    default:
      mean = cesaro_mean_seq(input.sequence(), p.seq_mean);
      sweep = &p.discrete;
      break;
  }
  if (!mean.converged) {
    auto r = make_skip(name, "mean does not converge; identity is vacuous");
    r.diagnostics["mean_band"] = {mean.lo, mean.hi};
    return r;
  }
  double alpha = mean.midpoint();
  FunctionalRange range = functional_range(v, input, *sweep);
  double dev = std::max(std::abs(range.lo() - alpha), std::abs(range.hi() - alpha));
  double tol = 0.5 * (mean.hi - mean.lo) + mean.band_tol + range.lower.tolerance +
               range.upper.tolerance;
  auto r = make_equality(name, dev, 0.0, tol);
  r.diagnostics["mean_value"] = alpha;
  r.diagnostics["range"] = {range.lo(), range.hi()};
  return r;
}

IdentityReport check_window_sum_identity(const SequenceSpec& s, const SuiteParams& p) {
  FunctionSpec lifted = lift_V(s);
  double worst = 0.0;
  std::int64_t worst_n = 0;
  double worst_theta = 0.0;
  for (std::int64_t n : p.lemma_n) {
    for (double theta : p.lemma_theta) {
      auto m = static_cast<std::int64_t>(std::floor(theta * static_cast<double>(n)));
      double integral =
          lifted.integrate(static_cast<double>(n), static_cast<double>(m + 1));
      double sum = s.sum_range(n, m);
      double d = std::abs(integral - sum);
      if (d > worst) {
        worst = d;
        worst_n = n;
        worst_theta = theta;
      }
    }
  }
  auto r = make_equality("window_sum_identity", worst, 0.0, 1e-9);
  r.diagnostics["grid_points"] = p.lemma_n.size() * p.lemma_theta.size();
  r.diagnostics["worst_n"] = worst_n;
  r.diagnostics["worst_theta"] = worst_theta;
  return r;
}

IdentityReport check_discrete_continuous(const SequenceSpec& s, const SuiteParams& p) {
  IdentityReport grid = check_window_sum_identity(s, p);
  SweepReport lhs = p_upper_seq(s, p.discrete);
  SweepReport rhs = p_upper(lift_V(s), p.mult);
  auto r = make_equality("pd_matches_continuous", lhs.value, rhs.value,
                         lhs.tolerance + rhs.tolerance);
  r.diagnostics["finite_identity_worst"] = grid.lhs;
  r.diagnostics["lhs_per_theta"] = theta_table(lhs);
  r.diagnostics["rhs_per_theta"] = theta_table(rhs);
  if (!grid.passed) {
    r.status = CheckStatus::Fail;
    r.passed = false;
    r.diagnostics["finite_identity_failed"] = true;
  }
  return r;
}

IdentityReport check_logsum_bound(const SequenceSpec& s, std::int64_t n, double theta) {
  if (n < 1 || !(theta > 1.0)) throw DomainError("logsum bound needs n >= 1, theta > 1");
  auto m = static_cast<std::int64_t>(std::floor(theta * static_cast<double>(n)));
  FunctionSpec lifted = lift_V(s);
  double integral =
      lifted.integrate_log(static_cast<double>(n), static_cast<double>(m + 1));
  double sum = s.harmonic_sum_range(n, m);
  double lhs = std::abs(integral - sum);
  double rhs = s.bound() * std::numbers::pi * std::numbers::pi / 12.0;
  auto r = make_bound("logsum_bound", lhs, rhs);
  // sharper per-term estimate: sum over the window of (1/i - ln(1+1/i))
  // is at most (1/2) sum 1/i^2
  Accumulator tail;
  for (std::int64_t i = n; i <= m; ++i)
    tail.add(0.5 / (static_cast<double>(i) * static_cast<double>(i)));
  double sharper = s.bound() * tail.value();
  r.diagnostics["n"] = n;
  r.diagnostics["theta"] = theta;
  r.diagnostics["sharper_bound"] = sharper;
  r.diagnostics["within_sharper"] = lhs <= sharper + kBoundSlack;
  return r;
}

IdentityReport check_logsum_bound_grid(const SequenceSpec& s, const SuiteParams& p) {
  double worst = 0.0;
  std::int64_t worst_n = 0;
  double worst_theta = 0.0;
  bool sharper_ok = true;
  for (std::int64_t n : p.lemma_n) {
    for (double theta : p.lemma_theta) {
      auto one = check_logsum_bound(s, n, theta);
      if (one.lhs > worst) {
        worst = one.lhs;
        worst_n = n;
        worst_theta = theta;
      }
      sharper_ok = sharper_ok && one.diagnostics.at("within_sharper").get<bool>();
    }
  }
  double rhs = s.bound() * std::numbers::pi * std::numbers::pi / 12.0;
  auto r = make_bound("logsum_bound", worst, rhs);
  r.diagnostics["worst_n"] = worst_n;
  r.diagnostics["worst_theta"] = worst_theta;
  r.diagnostics["all_within_sharper"] = sharper_ok;
  return r;
}

IdentityReport check_qd_equals_pd(const SequenceSpec& s, const SuiteParams& p) {
  SweepReport lhs = p_upper_seq(s, p.discrete);
  SweepReport rhs = q_upper_seq(s, p.discrete);
  auto r = make_equality("qd_equals_pd", lhs.value, rhs.value,
                         lhs.tolerance + rhs.tolerance);
  r.diagnostics["lhs_per_theta"] = theta_table(lhs);
  r.diagnostics["rhs_per_theta"] = theta_table(rhs);
  return r;
}

namespace {

IdentityReport run_one(const char* name, const CorpusEntry& e, const SuiteParams& p,
                       IdentityReport (*fn)(const CorpusEntry&, const SuiteParams&)) {
  IdentityReport r;
  try {
    r = fn(e, p);
  } catch (const std::exception& ex) {
    r = IdentityReport{};
    r.name = name;
    r.status = CheckStatus::Error;
    r.passed = false;
    r.diagnostics["error"] = ex.what();
  }
  r.name = name;
  r.input_name = e.name;
  r.inputs = e.input.to_file_json();
  return r;
}

}  // namespace

std::vector<IdentityReport> run_suite(const std::vector<CorpusEntry>& corpus,
                                      const SuiteParams& p) {
  struct Item {
    std::string name;
    std::size_t index;
    IdentityReport report;
  };
  std::vector<Item> items;

  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const CorpusEntry& e = corpus[i];
    auto add = [&](const char* name,
                   IdentityReport (*fn)(const CorpusEntry&, const SuiteParams&)) {
      items.push_back({name, i, run_one(name, e, p, fn)});
    };
    if (e.input.is_function()) {
      if (e.input.function().domain() == Domain::Multiplicative) {
        add("p_equals_kw", [](const CorpusEntry& c, const SuiteParams& sp) {
          return check_p_equals_kw(c.input.function(), sp);
        });
        add("q_equals_kw", [](const CorpusEntry& c, const SuiteParams& sp) {
          return check_q_equals_kw(c.input.function(), sp);
        });
        add("p_equals_q", [](const CorpusEntry& c, const SuiteParams& sp) {
          return check_p_equals_q(c.input.function(), sp);
        });
        add("mean_collapse_P", [](const CorpusEntry& c, const SuiteParams& sp) {
          return check_mean_collapse(c.input, Variant::P, sp);
        });
        add("mean_collapse_Q", [](const CorpusEntry& c, const SuiteParams& sp) {
          return check_mean_collapse(c.input, Variant::Q, sp);
        });
      } else {
        add("mean_collapse_K", [](const CorpusEntry& c, const SuiteParams& sp) {
          return check_mean_collapse(c.input, Variant::K, sp);
        });
      }
    } else {
      add("window_sum_identity", [](const CorpusEntry& c, const SuiteParams& sp) {
        return check_window_sum_identity(c.input.sequence(), sp);
      });
      add("pd_matches_continuous", [](const CorpusEntry& c, const SuiteParams& sp) {
        return check_discrete_continuous(c.input.sequence(), sp);
      });
      add("logsum_bound", [](const CorpusEntry& c, const SuiteParams& sp) {
        return check_logsum_bound_grid(c.input.sequence(), sp);
      });
      add("qd_equals_pd", [](const CorpusEntry& c, const SuiteParams& sp) {
        return check_qd_equals_pd(c.input.sequence(), sp);
      });
      add("mean_collapse_Pd", [](const CorpusEntry& c, const SuiteParams& sp) {
        return check_mean_collapse(c.input, Variant::Pd, sp);
      });
      add("mean_collapse_Qd", [](const CorpusEntry& c, const SuiteParams& sp) {
        return check_mean_collapse(c.input, Variant::Qd, sp);
      });
    }
  }

  std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    if (a.name != b.name) return a.name < b.name;
    return a.index < b.index;
  });
  std::vector<IdentityReport> out;
  out.reserve(items.size());
  for (auto& it : items) out.push_back(std::move(it.report));
  return out;
}

SuiteSummary summarize(const std::vector<IdentityReport>& reports) {
  SuiteSummary s;
  for (const auto& r : reports) {
    switch (r.status) {
      case CheckStatus::Pass: ++s.passed; break;
      case CheckStatus::Fail: ++s.failed; break;
      case CheckStatus::Skip: ++s.skipped; break;
      default: ++s.errors; break;
    }
  }
  return s;
}

namespace {

std::vector<std::filesystem::path> corpus_files(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ParseError("not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  return files;
}

CorpusEntry load_one(const std::filesystem::path& f) {
  std::ifstream in(f);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(f.string() + ": " + e.what());
  }
  return CorpusEntry{f.stem().string(), SpecInput::from_file_json(j)};
}

}  // namespace

std::vector<CorpusEntry> load_corpus_dir(const std::string& dir) {
  std::vector<CorpusEntry> out;
  for (const auto& f : corpus_files(dir)) out.push_back(load_one(f));
  return out;
}

CorpusLoad load_corpus_dir_lenient(const std::string& dir) {
  CorpusLoad load;
  for (const auto& f : corpus_files(dir)) {
    try {
      load.entries.push_back(load_one(f));
    } catch (const ParseError& e) {
      IdentityReport r;
      r.name = "parse";
      r.input_name = f.stem().string();
      r.status = CheckStatus::Error;
      r.passed = false;
      r.diagnostics["error"] = e.what();
      load.parse_errors.push_back(std::move(r));
    }
  }
  return load;
}

std::vector<IdentityReport> run_suite_on_dir(const std::string& dir, const SuiteParams& p) {
  CorpusLoad load = load_corpus_dir_lenient(dir);
  std::vector<IdentityReport> reports = std::move(load.parse_errors);
  auto suite = run_suite(load.entries, p);
  reports.insert(reports.end(), std::make_move_iterator(suite.begin()),
                 std::make_move_iterator(suite.end()));
  return reports;
}

}  // namespace ameans
