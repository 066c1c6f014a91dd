#include "bclab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "bclab/bc_lemmas.hpp"
#include "bclab/clayton_model.hpp"
#include "bclab/convergence_lab.hpp"
#include "bclab/errors.hpp"
#include "bclab/series_engine.hpp"
#include "bclab/table_io.hpp"

namespace bclab::cli {
namespace {

using Json = nlohmann::ordered_json;

constexpr std::int64_t kAnalyzeDefaultNMax = 1000000;
constexpr std::int64_t kSimulateDefaultNMax = 100000;
constexpr double kDefaultMargin = 0.1;

/// Writes records either as `kind: key=value ...` lines and aligned tables,
/// or as one JSON object per line carrying the schema version.
class Emitter {
 public:
  Emitter(std::ostream& out, OutputFormat format) : out_(out), format_(format) {}

  void record(std::string_view kind, const Json& fields) {
    if (format_ == OutputFormat::json_lines) {
      out_ << envelope(kind, fields).dump() << '\n';
      return;
    }
    out_ << kind << ':';
    for (const auto& [key, value] : fields.items()) out_ << ' ' << key << '=' << plain(value);
    out_ << '\n';
  }

  void table(std::string_view kind, const std::vector<Json>& rows) {
    if (rows.empty()) return;
    if (format_ == OutputFormat::json_lines) {
      for (const auto& row : rows) out_ << envelope(kind, row).dump() << '\n';
      return;
    }
    std::vector<std::string> header;
    for (const auto& [key, value] : rows.front().items()) header.push_back(key);
    std::vector<std::vector<std::string>> cells;
    std::vector<std::size_t> widths;
    for (const auto& h : header) widths.push_back(h.size());
    for (const auto& row : rows) {
      auto& line = cells.emplace_back();
      for (std::size_t c = 0; c < header.size(); ++c) {
        line.push_back(plain(row.at(header[c])));
        widths[c] = std::max(widths[c], line.back().size());
      }
    }
    out_ << "# " << kind << '\n';
    auto print = [&](const std::vector<std::string>& line) {
      for (std::size_t c = 0; c < line.size(); ++c) {
        out_ << fmt::format("{:>{}}", line[c], widths[c]) << (c + 1 < line.size() ? "  " : "\n");
      }
    };
    print(header);
    for (const auto& line : cells) print(line);
  }

 private:
  static Json envelope(std::string_view kind, const Json& fields) {
    Json record;
    record["schema_version"] = kSchemaVersion;
    record["record"] = kind;
    for (const auto& [key, value] : fields.items()) record[key] = value;
    return record;
  }

  static std::string plain(const Json& value) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_number_float()) return fmt::format("{:.6g}", value.get<double>());
    return value.dump();
  }

  std::ostream& out_;
  OutputFormat format_;
};

Json to_json(const SeriesVerdict& v) {
  Json j;
  j["class"] = std::string(to_string(v.classification));
  j["partial_sum"] = v.partial_sum;
  j["n_scanned"] = v.n_scanned;
  j["tail_exponent"] = v.tail_exponent ? Json(*v.tail_exponent) : Json(nullptr);
  j["tail_bound"] = v.tail_bound ? Json(*v.tail_bound) : Json(nullptr);
  j["evidence"] = v.evidence;
  return j;
}

void emit_verdict(Emitter& emit, const LemmaVerdict& verdict, const Json& context = Json::object()) {
  for (const auto& report : verdict.condition_reports) {
    Json row = context;
    row["condition"] = std::string(to_string(report.id));
    const Json fields = to_json(report.verdict);
    for (const auto& [key, value] : fields.items()) row[key] = value;
    emit.record("condition", row);
  }
  for (const auto& note : verdict.notes) {
    Json row = context;
    row["text"] = note;
    emit.record("note", row);
  }
  Json row = context;
  row["conclusion"] = std::string(to_string(verdict.conclusion));
  row["fired_by"] = std::string(to_string(verdict.fired_by));
  emit.record("verdict", row);
}

int verdict_exit(const LemmaVerdict& verdict) {
  return verdict.conclusion == Conclusion::unknown ? kInconclusive : kOk;
}

EventTable clayton_table(const ClaytonParams& params, const ScaledMaxEvent& ev, std::int64_t rows) {
  EventTable table;
  table.q.emplace();
  // Closed form: P(M_n^{n^alpha} <= x) -> 0 for x < 1 and alpha < 1.
  table.tends_to_zero = ZeroLimit::certified;
  table.p.reserve(static_cast<std::size_t>(rows));
  table.q->reserve(static_cast<std::size_t>(rows));
  for (std::int64_t n = 1; n <= rows; ++n) {
    table.p.push_back(scaled_max_cdf(params, n, ev));
    table.q->push_back(pair_joint_scaled(params, n, ev));
  }
  return table;
}

}  // namespace

int cmd_classify(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (!config.input_path) {
    err << "classify: --input is required\n";
    return kUsage;
  }
  std::ifstream in(*config.input_path);
  if (!in) {
    err << "classify: cannot open " << *config.input_path << '\n';
    return kFailure;
  }
  try {
    const EventTable table = read_event_table(in);
    // q(n) pairs A_n with A_{n+1}, so the last tabulated p only serves q(n_max).
    std::int64_t n_max = table.q ? table.rows() - 1 : table.rows();
    if (config.n_max) n_max = std::min(n_max, *config.n_max);
    if (n_max < 100) {
      err << fmt::format("classify: need at least 100 usable rows, got {}\n", n_max);
      return kFailure;
    }
    EvaluateOptions options;
    options.independent = config.independent;
    options.monotone_decreasing = config.monotone_decreasing;
    options.n_max = n_max;
    options.margin = kDefaultMargin;
    options.frechet_tolerance = config.frechet_tolerance;
    const auto verdict =
        evaluate(prob_seq_from_table(table), pair_seq_from_table(table), options);
    Emitter emit(out, config.output_format);
    emit_verdict(emit, verdict);
    return verdict_exit(verdict);
  } catch (const Error& e) {
    err << "classify: " << e.what() << '\n';
    return kFailure;
  }
}

int cmd_analyze(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const ClaytonParams params{config.theta};
  const ScaledMaxEvent ev{config.x.value_or(0.9), config.alpha};
  const std::int64_t n_max = config.n_max.value_or(kAnalyzeDefaultNMax);
  try {
    params.validate();
    ev.validate();
    if (n_max < 100) throw InsufficientRange(n_max);
    if (config.epsilons) LimitExperiment{1.0, *config.epsilons, n_max, 1, 0, kDefaultMargin}.validate();
  } catch (const Error& e) {
    err << "analyze: " << e.what() << '\n';
    return kUsage;
  }

  try {
    Emitter emit(out, config.output_format);
    const bool unscaled = ev.alpha == 0.0;
    emit.record("model", Json{{"family", "clayton"},
                              {"theta", params.theta},
                              {"x", ev.x},
                              {"alpha", ev.alpha},
                              {"n_max", n_max},
                              {"events", unscaled ? "M_n <= x (decreasing)" : "M_n^(n^alpha) <= x"}});

    const ProbSeq p{[params, ev](std::int64_t n) { return scaled_max_cdf(params, n, ev); },
                    ZeroLimit::certified, "Clayton scaled maximum"};
    const PairSeq q{[params, ev](std::int64_t n) { return pair_joint_scaled(params, n, ev); },
                    "Clayton pair joint"};
    EvaluateOptions options;
    options.monotone_decreasing = unscaled;
    options.n_max = n_max;
    options.margin = kDefaultMargin;
    const auto verdict = evaluate(p, q, options);

    if (!unscaled && params.theta == 1.0) {
      const auto n = static_cast<double>(n_max);
      const double c = -std::log(ev.x);
      emit.record("asymptotics",
                  Json{{"n", n_max},
                       {"cdf_ratio", scaled_max_cdf(params, n_max, ev) * std::pow(n, 1.0 - ev.alpha) * c},
                       {"diff_ratio", diff_term(params, n_max, ev) * std::pow(n, 2.0 - ev.alpha) * c}});
    }
    emit_verdict(emit, verdict);

    if (config.epsilons) {
      LimitExperiment exp;
      exp.epsilons = *config.epsilons;
      exp.n_max = n_max;
      const auto report = theorem31_report(clayton_scaled_max_model(params, ev.alpha), exp);
      for (const auto& row : report.per_epsilon) {
        emit.record("epsilon", Json{{"epsilon", row.epsilon},
                                    {"conclusion", std::string(to_string(row.verdict.conclusion))},
                                    {"fired_by", std::string(to_string(row.verdict.fired_by))}});
      }
      for (const auto& note : report.notes) emit.record("note", Json{{"text", note}});
      emit.record("as_report", Json{{"overall", std::string(to_string(report.overall))}});
    }

    if (config.emit_terms) {
      std::ofstream file(*config.emit_terms);
      if (!file) {
        err << "analyze: cannot write " << *config.emit_terms << '\n';
        return kFailure;
      }
      write_event_table(file, clayton_table(params, ev, n_max + 1));
    }
    return verdict_exit(verdict);
  } catch (const Error& e) {
    err << "analyze: " << e.what() << '\n';
    return kFailure;
  }
}

int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const ClaytonParams params{config.theta};
  LimitExperiment exp;
  exp.n_max = config.n_max.value_or(kSimulateDefaultNMax);
  exp.paths = config.paths;
  exp.seed = config.seed;
  const std::vector<double> xs =
      config.x ? std::vector<double>{*config.x} : std::vector<double>{0.1, 0.5, 0.9};
  try {
    params.validate();
    exp.validate();
    for (double x : xs) ScaledMaxEvent{x, config.alpha}.validate();
  } catch (const Error& e) {
    err << "simulate: " << e.what() << '\n';
    return kUsage;
  }
  if (static_cast<double>(exp.paths) * static_cast<double>(exp.n_max) > kResourceGuard &&
      !config.force) {
    err << fmt::format("simulate: paths * n_max = {:.3g} exceeds {:.0e}; pass --force\n",
                       static_cast<double>(exp.paths) * static_cast<double>(exp.n_max),
                       kResourceGuard);
    return kUsage;
  }

  std::vector<std::int64_t> checkpoints;
  for (std::int64_t c = 100; c < exp.n_max; c *= 10) checkpoints.push_back(c);
  if (checkpoints.size() < 2) {
    checkpoints.clear();
    for (std::int64_t c = 10; c < exp.n_max; c *= 10) checkpoints.push_back(c);
  }
  std::vector<std::int64_t> n_list;
  for (std::int64_t n : {10, 100, 1000}) {
    if (n <= exp.n_max) n_list.push_back(n);
  }

  try {
    Emitter emit(out, config.output_format);
    emit.record("experiment", Json{{"theta", params.theta},
                                   {"alpha", config.alpha},
                                   {"n_max", exp.n_max},
                                   {"paths", exp.paths},
                                   {"seed", exp.seed}});

    bool flagged = false;
    std::vector<Json> exact_rows;
    for (double x : xs) {
      for (const auto& row : empirical_vs_exact(params, n_list, x, config.alpha, exp)) {
        flagged = flagged || row.flagged;
        exact_rows.push_back(Json{{"n", row.n},
                                  {"x", row.x},
                                  {"empirical", row.empirical},
                                  {"exact", row.exact},
                                  {"se", row.standard_error},
                                  {"z", row.z},
                                  {"flag", row.flagged}});
      }
    }
    emit.table("empirical_vs_exact", exact_rows);

    bool monotone = true;
    std::vector<Json> tail_rows;
    for (double alpha : {config.alpha, 0.0}) {
      if (alpha == 0.0 && config.alpha == 0.0 && !tail_rows.empty()) break;
      const auto rows = empirical_tail_sup(params, alpha, exp, checkpoints);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (alpha == config.alpha && i > 0 && rows[i].median > rows[i - 1].median) monotone = false;
        tail_rows.push_back(Json{{"alpha", alpha},
                                 {"checkpoint", rows[i].checkpoint},
                                 {"median", rows[i].median},
                                 {"p90", rows[i].p90},
                                 {"role", alpha == config.alpha ? "probe" : "control"}});
      }
    }
    emit.table("tail_sup", tail_rows);
    emit.record("summary", Json{{"z_flags", flagged}, {"medians_monotone", monotone}});
    return !flagged && monotone ? kOk : kFailure;
  } catch (const Error& e) {
    err << "simulate: " << e.what() << '\n';
    return kFailure;
  }
}

namespace {

struct CheckResult {
  bool passed;
  std::string detail;
};

struct Check {
  std::string name;
  bool quick;
  std::function<CheckResult()> run;
};

// Long double evaluation of scaled_max_cdf - pair_joint_scaled at theta = 1.
long double extended_difference(std::int64_t n, double x, double alpha) {
  const long double log_x = std::log(static_cast<long double>(x));
  auto gap = [&](std::int64_t m) {
    return std::expm1(-std::pow(static_cast<long double>(m), -static_cast<long double>(alpha)) * log_x);
  };
  const long double a = static_cast<long double>(n) * gap(n);
  return 1.0L / (a + 1.0L) - 1.0L / (a + 1.0L + gap(n + 1));
}

std::vector<Check> verify_checks(double perturb) {
  std::vector<Check> checks;
  const ClaytonParams unit{};
  const std::vector<ScaledMaxEvent> grid = {{0.5, 0.3}, {0.5, 0.5}, {0.5, 0.7},
                                            {0.9, 0.3}, {0.9, 0.5}, {0.9, 0.7}};
  auto sparse_n = [] {
    std::vector<std::int64_t> ns;
    for (std::int64_t n = 1; n <= 10000; n += (n < 100 ? 1 : n / 50)) ns.push_back(n);
    return ns;
  };

  checks.push_back({"generator_roundtrip", true, [] {
    double worst = 0.0;
    for (double theta : {0.5, 1.0, 2.0}) {
      for (int k = 0; k <= 600; ++k) {
        const double u = k <= 300 ? std::pow(10.0, -6.0 + 6.0 * k / 300.0) * (1 - 1e-6)
                                  : 1.0 - std::pow(10.0, -6.0 + 6.0 * (600 - k) / 300.0) * (1 - 1e-6);
        const ClaytonParams p{theta};
        worst = std::max(worst, std::abs(generator(p, generator_inverse(p, u)) - u));
      }
    }
    return CheckResult{worst <= 1e-12, fmt::format("max |psi(psi^-1(u)) - u| = {:.3g}", worst)};
  }});

  checks.push_back({"joint_cdf_equals_max_cdf", true, [unit] {
    double worst = 0.0;
    for (double x : {0.1, 0.5, 0.9}) {
      for (std::int64_t n = 1; n <= 100; ++n) {
        const std::vector<double> xs(static_cast<std::size_t>(n), x);
        const double m = max_cdf(unit, n, x);
        worst = std::max(worst, std::abs(joint_cdf(unit, xs) - m) / m);
      }
    }
    return CheckResult{worst < 1e-12, fmt::format("max relative error {:.3g}", worst)};
  }});

  checks.push_back({"scaled_cdf_substitution", true, [unit, grid, sparse_n] {
    double worst = 0.0;
    for (const auto& ev : grid) {
      for (auto n : sparse_n()) {
        const double direct = scaled_max_cdf(unit, n, ev);
        const double substituted = max_cdf(unit, n, std::pow(ev.x, std::pow(double(n), -ev.alpha)));
        worst = std::max(worst, std::abs(direct - substituted) / direct);
      }
    }
    return CheckResult{worst < 1e-12, fmt::format("max relative error {:.3g}", worst)};
  }});

  checks.push_back({"diff_term_identity", true, [unit, grid, sparse_n] {
    double worst = 0.0;
    for (const auto& ev : grid) {
      for (auto n : sparse_n()) {
        const long double reference = extended_difference(n, ev.x, ev.alpha);
        const double d = diff_term(unit, n, ev);
        worst = std::max(worst, static_cast<double>(std::abs(d - reference) / reference));
      }
    }
    return CheckResult{worst < 1e-13, fmt::format("max relative error vs extended precision {:.3g}", worst)};
  }});

  checks.push_back({"clayton_frechet_bounds", true, [unit, grid, perturb] {
    for (const auto& ev : grid) {
      const ProbSeq p{[unit, ev](std::int64_t n) { return scaled_max_cdf(unit, n, ev); },
                      ZeroLimit::certified, "clayton"};
      const PairSeq q{[unit, ev, perturb](std::int64_t n) { return pair_joint_scaled(unit, n, ev) + perturb; },
                      "clayton"};
      const auto terms = cond_1_3(p, q);
      try {
        for (std::int64_t n = 1; n <= 10000; ++n) terms.eval(n);
      } catch (const FrechetViolation& e) {
        return CheckResult{false, fmt::format("x={} alpha={}: {}", ev.x, ev.alpha, e.what())};
      }
    }
    return CheckResult{true, fmt::format("q within bounds for n <= 10^4 (perturbation {:g})", perturb)};
  }});

  checks.push_back({"proof_identity", true, [unit, grid] {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const double p0 = uniform(rng);
      const double p1 = uniform(rng);
      const double lo = std::max(0.0, p0 + p1 - 1.0);
      const double q0 = lo + uniform(rng) * (std::min(p0, p1) - lo);
      const ProbSeq p{[p0, p1](std::int64_t n) { return n == 1 ? p0 : p1; }, ZeroLimit::check, ""};
      const PairSeq q{[q0](std::int64_t) { return q0; }, ""};
      worst = std::max(worst, std::abs(cond_1_3(p, q).eval(1) + q0 - p0));
    }
    for (const auto& ev : grid) {
      const ProbSeq p{[unit, ev](std::int64_t n) { return scaled_max_cdf(unit, n, ev); }, ZeroLimit::certified, ""};
      const PairSeq q{[unit, ev](std::int64_t n) { return pair_joint_scaled(unit, n, ev); }, ""};
      const auto terms = cond_1_3(p, q);
      for (std::int64_t n = 1; n <= 10000; ++n) {
        worst = std::max(worst, std::abs(terms.eval(n) + q.q(n) - p.p(n)));
      }
    }
    return CheckResult{worst <= 1e-15, fmt::format("max |(p - q) + q - p| = {:.3g}", worst)};
  }});

  checks.push_back({"frechet_property", true, [] {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    int false_alarms = 0;
    int missed = 0;
    for (int i = 0; i < 10000; ++i) {
      const double p0 = uniform(rng);
      const double p1 = uniform(rng);
      const double lo = std::max(0.0, p0 + p1 - 1.0);
      const double hi = std::min(p0, p1);
      const double valid = lo + uniform(rng) * (hi - lo);
      const double invalid = hi + 1e-6 + uniform(rng) * 1e-3;
      try {
        check_frechet(1, p0, p1, valid, kDefaultFrechetTolerance);
      } catch (const FrechetViolation&) {
        ++false_alarms;
      }
      try {
        check_frechet(1, p0, p1, invalid, kDefaultFrechetTolerance);
        ++missed;
      } catch (const FrechetViolation&) {
      }
    }
    return CheckResult{false_alarms == 0 && missed == 0,
                       fmt::format("false alarms {}, missed violations {}", false_alarms, missed)};
  }});

  checks.push_back({"classifier_calibration", true, [] {
    int wrong = 0;
    for (double s : {0.5, 0.8, 1.0, 1.3, 1.5, 2.0, 3.0}) {
      const TermSequence t{[s](std::int64_t n) { return std::pow(double(n), -s); }, ""};
      const auto expected = s > 1.0 ? SeriesClass::convergent : SeriesClass::divergent;
      if (classify(t, 100000, 0.1).classification != expected) ++wrong;
    }
    return CheckResult{wrong == 0, fmt::format("{} misclassified p-series", wrong)};
  }});

  checks.push_back({"sampler_determinism", true, [] {
    ClaytonPath a(42);
    ClaytonPath b(42);
    bool same = a.state().v == b.state().v;
    bool monotone = true;
    double last = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const auto sa = a.step();
      const auto sb = b.step();
      same = same && sa.x == sb.x && sa.maximum == sb.maximum;
      monotone = monotone && sa.maximum >= last;
      last = sa.maximum;
    }
    return CheckResult{same && monotone, fmt::format("identical streams {}, monotone maxima {}", same, monotone)};
  }});

  checks.push_back({"lemma21_clayton", false, [unit] {
    const ScaledMaxEvent ev{0.9, 0.5};
    const ProbSeq p{[unit, ev](std::int64_t n) { return scaled_max_cdf(unit, n, ev); }, ZeroLimit::certified, ""};
    const PairSeq q{[unit, ev](std::int64_t n) { return pair_joint_scaled(unit, n, ev); }, ""};
    EvaluateOptions options;
    options.n_max = 1000000;
    const auto v = evaluate(p, q, options);
    return CheckResult{v.conclusion == Conclusion::io_zero && v.fired_by == Rule::lemma21,
                       fmt::format("{} via {}", to_string(v.conclusion), to_string(v.fired_by))};
  }});

  checks.push_back({"sampler_distribution", false, [unit] {
    const std::int64_t paths = 100000;
    std::vector<double> first(paths);
    std::vector<double> max50(paths);
    for (std::int64_t i = 0; i < paths; ++i) {
      ClaytonPath path(path_seed(0, static_cast<std::uint64_t>(i)));
      first[static_cast<std::size_t>(i)] = path.step().x;
      double m = 0.0;
      for (int n = 2; n <= 50; ++n) m = path.step().maximum;
      max50[static_cast<std::size_t>(i)] = m;
    }
    const double ks_uniform = ks_statistic(first, [](double u) { return u; });
    const double ks_max = ks_statistic(max50, [unit](double x) {
      return x <= 0.0 ? 0.0 : x >= 1.0 ? 1.0 : max_cdf(unit, 50, x);
    });
    return CheckResult{ks_uniform < 0.006 && ks_max < 0.006,
                       fmt::format("KS X_1 vs uniform {:.4f}, KS M_50 vs exact {:.4f}", ks_uniform, ks_max)};
  }});
  return checks;
}

}  // namespace

int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& /*err*/) {
  Emitter emit(out, config.output_format);
  bool all = true;
  for (const auto& check : verify_checks(config.perturb)) {
    if (config.quick && !check.quick) continue;
    CheckResult result;
    try {
      result = check.run();
    } catch (const std::exception& e) {
      result = {false, fmt::format("threw: {}", e.what())};
    }
    all = all && result.passed;
    emit.record("check", Json{{"name", check.name},
                              {"status", result.passed ? "PASS" : "FAIL"},
                              {"detail", result.detail}});
  }
  emit.record("summary", Json{{"status", all ? "PASS" : "FAIL"}});
  return all ? kOk : kFailure;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  switch (config.command) {
    case Command::classify:
      return cmd_classify(config, out, err);
    case Command::analyze:
      return cmd_analyze(config, out, err);
    case Command::simulate:
      return cmd_simulate(config, out, err);
    case Command::verify:
      return cmd_verify(config, out, err);
  }
  return kUsage;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Borel-Cantelli verdicts and Clayton maxima experiments", "bclab"};
  app.require_subcommand(1);
  RunConfig config;

  double x = 0.0;
  std::int64_t n_max = 0;
  std::vector<double> epsilons;
  std::string input;
  std::string emit_terms;
  std::string format = "table";
  const std::map<std::string, OutputFormat> formats{{"table", OutputFormat::table},
                                                     {"json-lines", OutputFormat::json_lines}};

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--output-format", format, "table or json-lines")
        ->check(CLI::IsMember({"table", "json-lines"}));
  };
  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--x", x, "threshold in (0, 1)");
    sub->add_option("--alpha", config.alpha, "scaling exponent in [0, 1)");
    sub->add_option("--theta", config.theta, "Clayton parameter (default 1)");
  };

  auto* classify = app.add_subcommand("classify", "evaluate tabulated (n, p[, q]) columns");
  classify->add_option("--input", input, "table file")->required();
  classify->add_option("--n-max", n_max, "scan at most this many indices");
  classify->add_flag("--independent", config.independent, "events are mutually independent");
  classify->add_flag("--monotone-decreasing", config.monotone_decreasing, "events decrease in n");
  classify->add_option("--frechet-tolerance", config.frechet_tolerance, "absolute slack on pair bounds");
  add_format(classify);

  auto* analyze = app.add_subcommand("analyze", "closed-form analysis of the Clayton maxima");
  add_model(analyze);
  analyze->add_option("--n-max", n_max, "scan horizon (default 1e6)");
  analyze->add_option("--epsilons", epsilons, "epsilon grid for the a.s. report")->delimiter(',');
  analyze->add_option("--emit-terms", emit_terms, "write the (n, p, q) table here");
  add_format(analyze);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo check of the Clayton maxima");
  add_model(simulate);
  simulate->add_option("--n-max", n_max, "path length (default 1e5)");
  simulate->add_option("--paths", config.paths, "number of paths (default 1e4)");
  simulate->add_option("--seed", config.seed, "base seed (default 0)");
  simulate->add_flag("--force", config.force, "ignore the paths * n_max guard");
  add_format(simulate);

  auto* verify = app.add_subcommand("verify", "run the invariant checks");
  verify->add_flag("--quick", config.quick, "fast subset");
  verify->add_option("--perturb", config.perturb, "add this to every Clayton q before checking bounds");
  add_format(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream cli_out;
    std::ostringstream cli_err;
    const int code = app.exit(e, cli_out, cli_err);
    out << cli_out.str();
    err << cli_err.str();
    return code == 0 ? kOk : kUsage;
  }

  for (auto* sub : {classify, analyze, simulate}) {
    if (!sub->parsed()) continue;
    if (const auto* opt = sub->get_option_no_throw("--x"); opt && opt->count() > 0) config.x = x;
    if (sub->count("--n-max") > 0) config.n_max = n_max;
  }
  if (analyze->count("--epsilons") > 0) config.epsilons = epsilons;
  if (classify->parsed()) config.input_path = input;
  if (analyze->count("--emit-terms") > 0) config.emit_terms = emit_terms;
  config.output_format = formats.at(format);
  if (classify->parsed()) config.command = Command::classify;
  if (analyze->parsed()) config.command = Command::analyze;
  if (simulate->parsed()) config.command = Command::simulate;
  if (verify->parsed()) config.command = Command::verify;
  return run(config, out, err);
}

}  // namespace bclab::cli
