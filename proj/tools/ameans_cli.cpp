// Command-line front end: parses spec files, runs the estimators and the
// identity suite, emits JSON (or CSV for sweeps).
//
// Exit codes: 0 success / all checks pass, 1 verification failure,
// 2 invalid input (parse or domain errors).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ameans/identities.hpp"

namespace {

using nlohmann::json;

ameans::SpecInput load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ameans::ParseError(path + ": cannot open file");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ameans::ParseError(path + ": " + e.what());
  }
  try {
    return ameans::SpecInput::from_file_json(j);
  } catch (const ameans::ParseError& e) {
    throw ameans::ParseError(path + ": " + e.what());
  }
}

struct CommonOpts {
  std::optional<double> x_max;
  std::optional<std::int64_t> n_max;
  std::optional<int> theta_steps;
  std::optional<double> band_tol;
  std::optional<int> anchors;
  std::optional<double> stride_fraction;
  std::string csv_path;
  std::string params_file;
};

void attach_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--x-max", o.x_max, "upper end of the continuous anchor range");
  cmd->add_option("--n-max", o.n_max, "upper end of the discrete anchor range");
  cmd->add_option("--theta-steps", o.theta_steps,
                  "finest schedule index j_max (theta down to 2^-j / 1+2^-j)");
  cmd->add_option("--band-tol", o.band_tol, "convergence band tolerance for means");
  cmd->add_option("--anchors", o.anchors, "geometric anchors per theta");
  cmd->add_option("--stride-fraction", o.stride_fraction,
                  "anchor densification stride as a fraction of the window");
  cmd->add_option("--csv", o.csv_path, "write sweep rows as CSV to this path");
  cmd->add_option("--params-file", o.params_file, "JSON file with suite parameters");
}

ameans::SuiteParams build_params(const CommonOpts& o) {
  json merged = json::object();
  if (!o.params_file.empty()) {
    std::ifstream in(o.params_file);
    if (!in) throw ameans::ParseError(o.params_file + ": cannot open params file");
    try {
      in >> merged;
    } catch (const json::exception& e) {
      throw ameans::ParseError(o.params_file + ": " + e.what());
    }
  }
  // explicit flags win over the params file
  if (o.theta_steps) merged["theta_steps"] = *o.theta_steps;
  if (o.x_max) merged["x_max"] = *o.x_max;
  if (o.n_max) merged["n_max"] = *o.n_max;
  if (o.anchors) merged["anchors"] = *o.anchors;
  if (o.stride_fraction) merged["stride_fraction"] = *o.stride_fraction;
  if (o.band_tol) merged["band_tol"] = *o.band_tol;
  return ameans::SuiteParams::from_json(merged);
}

ameans::Variant parse_variant(const std::string& kind) {
  if (kind == "K") return ameans::Variant::K;
  if (kind == "P") return ameans::Variant::P;
  if (kind == "Q") return ameans::Variant::Q;
  if (kind == "Pd") return ameans::Variant::Pd;
  if (kind == "Qd") return ameans::Variant::Qd;
  throw ameans::ParseError("unknown functional kind \"" + kind + "\"");
}

const ameans::SweepParams& sweep_for(const ameans::SuiteParams& p, ameans::Variant v) {
  switch (v) {
    case ameans::Variant::K: return p.additive;
    case ameans::Variant::P:
    case ameans::Variant::Q: return p.mult;
    default: return p.discrete;
  }
}

void emit_csv(const ameans::SweepReport& rep, const std::string& path) {
  if (path == "-") {
    std::cout << rep.to_csv();
    return;
  }
  std::ofstream out(path);
  if (!out) throw ameans::ParseError(path + ": cannot open for writing");
  out << rep.to_csv();
}

int cmd_mean(const std::string& file, const std::string& kind, const CommonOpts& o) {
  auto params = build_params(o);
  auto input = load_spec(file);
  ameans::LimitEstimate est;
  if (kind == "M")
    est = ameans::cesaro_mean(input.function(), params.cesaro);
  else if (kind == "R")
    est = ameans::exp_mean(input.function(), params.expw);
  else if (kind == "Md")
    est = ameans::cesaro_mean_seq(input.sequence(), params.seq_mean);
  else
    throw ameans::ParseError("unknown mean kind \"" + kind + "\" (use M, R or Md)");
  std::cout << est.to_json().dump(2) << "\n";
  return 0;
}

int cmd_upper(const std::string& file, const std::string& kind, const CommonOpts& o,
              bool csv_only) {
  auto params = build_params(o);
  auto input = load_spec(file);
  auto v = parse_variant(kind);
  auto rep = ameans::upper_variant(v, input, sweep_for(params, v));
  if (!o.csv_path.empty()) emit_csv(rep, o.csv_path);
  if (!csv_only) std::cout << rep.to_json().dump(2) << "\n";
  return 0;
}

int cmd_range(const std::string& file, const std::string& kind, const CommonOpts& o) {
  auto params = build_params(o);
  auto input = load_spec(file);
  auto v = parse_variant(kind);
  auto range = ameans::functional_range(v, input, sweep_for(params, v));
  json out = {{"kind", ameans::to_string(v)},
              {"lo", range.lo()},
              {"hi", range.hi()},
              {"lower", range.lower.to_json()},
              {"upper", range.upper.to_json()}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_density(const std::string& file, const CommonOpts& o) {
  auto params = build_params(o);
  auto input = load_spec(file);
  const auto& seq = input.sequence();
  auto mean = ameans::cesaro_mean_seq(seq, params.seq_mean);
  auto p_hi = ameans::p_upper_seq(seq, params.discrete);
  auto p_lo = ameans::p_lower_seq(seq, params.discrete);
  auto q_hi = ameans::q_upper_seq(seq, params.discrete);
  auto q_lo = ameans::q_lower_seq(seq, params.discrete);
  json out = {{"natural_density", mean.converged ? json(mean.midpoint()) : json(nullptr)},
              {"band", {mean.lo, mean.hi}},
              {"converged", mean.converged},
              {"polya_upper", p_hi.value},
              {"polya_lower", p_lo.value},
              {"log_polya_upper", q_hi.value},
              {"log_polya_lower", q_lo.value}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_verify(const std::string& dir, const CommonOpts& o) {
  auto params = build_params(o);
  auto reports = ameans::run_suite_on_dir(dir, params);
  auto summary = ameans::summarize(reports);
  json out;
  out["reports"] = json::array();
  for (const auto& r : reports) out["reports"].push_back(r.to_json());
  out["summary"] = {{"passed", summary.passed},
                    {"failed", summary.failed},
                    {"skipped", summary.skipped},
                    {"errors", summary.errors}};
  std::cout << out.dump(2) << "\n";
  if (summary.errors > 0) return 2;
  return summary.failed > 0 ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"asymptotic means, Polya-type sublinear functionals, and their identities"};
  app.require_subcommand(1);

  std::string spec_file, kind, corpus_dir;
  CommonOpts opts;

  auto* mean = app.add_subcommand("mean", "single-limit mean (M, R or Md)");
  mean->add_option("spec", spec_file, "spec JSON file")->required();
  mean->add_option("--kind", kind, "M | R | Md")->required();
  attach_common(mean, opts);

  auto* upper = app.add_subcommand("upper", "upper sublinear functional sweep");
  upper->add_option("spec", spec_file, "spec JSON file")->required();
  upper->add_option("--kind", kind, "K | P | Q | Pd | Qd")->required();
  attach_common(upper, opts);

  auto* range = app.add_subcommand("range", "lower and upper functional values");
  range->add_option("spec", spec_file, "spec JSON file")->required();
  range->add_option("--kind", kind, "K | P | Q | Pd | Qd")->required();
  attach_common(range, opts);

  auto* density = app.add_subcommand("density", "natural and Polya density of a sequence");
  density->add_option("spec", spec_file, "sequence spec JSON file")->required();
  attach_common(density, opts);

  auto* verify = app.add_subcommand("verify", "run the identity suite over a corpus dir");
  verify->add_option("corpus", corpus_dir, "directory of spec JSON files")->required();
  attach_common(verify, opts);

  auto* sweep = app.add_subcommand("sweep", "sweep a functional and write CSV");
  sweep->add_option("spec", spec_file, "spec JSON file")->required();
  sweep->add_option("--kind", kind, "K | P | Q | Pd | Qd")->required();
  attach_common(sweep, opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (mean->parsed()) return cmd_mean(spec_file, kind, opts);
    if (upper->parsed()) return cmd_upper(spec_file, kind, opts, false);
    if (range->parsed()) return cmd_range(spec_file, kind, opts);
    if (density->parsed()) return cmd_density(spec_file, opts);
    if (verify->parsed()) return cmd_verify(corpus_dir, opts);
    if (sweep->parsed()) {
      if (opts.csv_path.empty()) opts.csv_path = "-";
      return cmd_upper(spec_file, kind, opts, true);
    }
  } catch (const ameans::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ameans::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ameans::SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ameans::ScheduleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
