// Acceptance suite: one PASS/FAIL line per criterion, tolerances as pinned.
// Run with no arguments for all criteria or `--criterion N` for one.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"

#include "bclab/bc_lemmas.hpp"
#include "bclab/cli.hpp"
#include "bclab/clayton_model.hpp"
#include "bclab/convergence_lab.hpp"
#include "bclab/series_engine.hpp"
#include "bclab/table_io.hpp"

using namespace bclab;

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double time_limit_s;  // <= 0 means no runtime bound
  std::function<Outcome()> run;
};

const ClaytonParams kUnit{};
const std::vector<double> kXs{0.5, 0.9};
const std::vector<double> kAlphas{0.3, 0.5, 0.7};

Outcome formula_identity() {
  double worst = 0.0;
  for (double x : {0.1, 0.5, 0.9}) {
    for (std::int64_t n : {1, 2, 10, 100}) {
      const std::vector<double> xs(static_cast<std::size_t>(n), x);
      const double m = max_cdf(kUnit, n, x);
      worst = std::max(worst, std::abs(joint_cdf(kUnit, xs) - m) / m);
    }
  }
  return {worst < 1e-12, fmt::format("max relative error {:.3g} (< 1e-12)", worst)};
}

Outcome asymptotic_cdf() {
  const std::int64_t n = 1000000;
  double worst = 0.0;
  std::string where;
  for (double x : kXs) {
    for (double alpha : kAlphas) {
      const double scaled = scaled_max_cdf(kUnit, n, {x, alpha}) *
                            std::pow(static_cast<double>(n), 1.0 - alpha) / -std::log(x);
      const double err = std::abs(scaled - 1.0);
      if (err > worst) {
        worst = err;
        where = fmt::format("x={} alpha={} ratio={:.4g}", x, alpha, scaled);
      }
    }
  }
  return {worst < 0.02, fmt::format("max |ratio - 1| = {:.3g} (< 0.02) at {}", worst, where)};
}

Outcome asymptotic_diff() {
  const std::int64_t n = 1000000;
  double worst = 0.0;
  std::string where;
  for (double x : kXs) {
    for (double alpha : kAlphas) {
      const double scaled = diff_term(kUnit, n, {x, alpha}) *
                            std::pow(static_cast<double>(n), 2.0 - alpha) * -std::log(x);
      const double err = std::abs(scaled - 1.0);
      if (err > worst) {
        worst = err;
        where = fmt::format("x={} alpha={} ratio={:.4g}", x, alpha, scaled);
      }
    }
  }
  return {worst < 0.05, fmt::format("max |ratio - 1| = {:.3g} (< 0.05) at {}", worst, where)};
}

Outcome lemma21_verdicts() {
  int wrong = 0;
  std::string first_wrong;
  for (double x : kXs) {
    for (double alpha : kAlphas) {
      const ScaledMaxEvent ev{x, alpha};
      const ProbSeq p{[ev](std::int64_t n) { return scaled_max_cdf(kUnit, n, ev); }, ZeroLimit::certified, ""};
      const PairSeq q{[ev](std::int64_t n) { return pair_joint_scaled(kUnit, n, ev); }, ""};
      EvaluateOptions options;
      options.n_max = 1000000;
      const auto v = evaluate(p, q, options);
      const bool ok = v.report(ConditionId::c1_2)->verdict.classification == SeriesClass::divergent &&
                      v.report(ConditionId::c2_1)->verdict.classification == SeriesClass::divergent &&
                      v.report(ConditionId::c2_2)->verdict.classification == SeriesClass::convergent &&
                      v.conclusion == Conclusion::io_zero && v.fired_by == Rule::lemma21;
      if (!ok) {
        ++wrong;
        if (first_wrong.empty()) {
          first_wrong = fmt::format(" first at x={} alpha={}: {} via {}", x, alpha, to_string(v.conclusion),
                                    to_string(v.fired_by));
        }
      }
    }
  }
  return {wrong == 0, fmt::format("{} of 6 grid points off target{}", wrong, first_wrong)};
}

Outcome proof_identity() {
  std::mt19937_64 rng(2024);
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
  for (double x : kXs) {
    for (double alpha : kAlphas) {
      const ScaledMaxEvent ev{x, alpha};
      const ProbSeq p{[ev](std::int64_t n) { return scaled_max_cdf(kUnit, n, ev); }, ZeroLimit::certified, ""};
      const PairSeq q{[ev](std::int64_t n) { return pair_joint_scaled(kUnit, n, ev); }, ""};
      const auto terms = cond_1_3(p, q);
      for (std::int64_t n = 1; n <= 10000; ++n) {
        worst = std::max(worst, std::abs(terms.eval(n) + q.q(n) - p.p(n)));
      }
    }
  }
  return {worst <= 1e-15, fmt::format("max |term + q - p| = {:.3g} (<= 1e-15)", worst)};
}

Outcome sampler_correctness() {
  const std::size_t paths = 100000;
  const int horizon = 50;
  std::vector<std::vector<double>> columns(horizon, std::vector<double>(paths));
  std::vector<double> max50(paths);
  for (std::size_t i = 0; i < paths; ++i) {
    ClaytonPath path(path_seed(0, i));
    for (int n = 0; n < horizon; ++n) {
      const auto s = path.step();
      columns[static_cast<std::size_t>(n)][i] = s.x;
      max50[i] = s.maximum;
    }
  }
  double ks_marginal = 0.0;
  for (auto& column : columns) ks_marginal = std::max(ks_marginal, ks_statistic(column, [](double u) { return u; }));
  const double ks_max = ks_statistic(max50, [](double x) { return max_cdf(kUnit, 50, x); });
  const double exact = 1.0 / 51.0;
  const auto hits = std::count_if(max50.begin(), max50.end(), [](double m) { return m <= 0.5; });
  const double se = std::sqrt(exact * (1.0 - exact) / static_cast<double>(paths));
  const double z = (static_cast<double>(hits) / static_cast<double>(paths) - exact) / se;
  const bool ok = ks_max < 0.006 && ks_marginal < 0.006 && std::abs(z) <= 3.0;
  return {ok, fmt::format("KS M_50 {:.4f}, max KS X_1..X_50 {:.4f} (< 0.006), P(M_50 <= 0.5) z = {:.2f} (|z| <= 3)",
                          ks_max, ks_marginal, z)};
}

Outcome as_probe() {
  LimitExperiment exp;
  exp.paths = 1000;
  exp.n_max = 100000;
  exp.seed = 0;
  const std::vector<std::int64_t> checkpoints{100, 1000, 10000};
  const auto rows = empirical_tail_sup(kUnit, 0.5, exp, checkpoints);
  bool decreasing = true;
  for (std::size_t i = 1; i < rows.size(); ++i) decreasing = decreasing && rows[i].median < rows[i - 1].median;
  return {decreasing, fmt::format("medians {:.4g}, {:.4g}, {:.4g} (strictly decreasing)", rows[0].median,
                                  rows[1].median, rows[2].median)};
}

Outcome calibration() {
  int wrong = 0;
  std::string detail;
  for (double s : {0.5, 0.8, 1.0, 1.3, 1.5, 2.0, 3.0}) {
    const TermSequence t{[s](std::int64_t n) { return std::pow(static_cast<double>(n), -s); }, ""};
    const auto got = classify(t, 100000, 0.1).classification;
    const auto expected = s > 1.0 ? SeriesClass::convergent : SeriesClass::divergent;
    if (got != expected) ++wrong;
    detail += fmt::format(" s={}:{}", s, to_string(got));
  }
  return {wrong == 0, fmt::format("{} misclassified;{}", wrong, detail)};
}

struct CliRun {
  int code;
  std::string out;
};

CliRun cli_run(std::vector<std::string> args) {
  args.insert(args.begin(), "bclab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str()};
}

Outcome bc_sanity() {
  const auto dir = std::filesystem::temp_directory_path();
  auto write = [&](const std::string& name, const std::function<double(std::int64_t)>& p) {
    EventTable table;
    for (std::int64_t n = 1; n <= 100000; ++n) table.p.push_back(p(n));
    const auto path = (dir / name).string();
    std::ofstream file(path);
    write_event_table(file, table);
    return path;
  };
  const auto square = write("bclab_acceptance_square.txt", [](std::int64_t n) { return 1.0 / (double(n) * double(n)); });
  const auto harmonic = write("bclab_acceptance_harmonic.txt", [](std::int64_t n) { return 1.0 / double(n); });
  const auto a = cli_run({"classify", "--input", square});
  const auto b = cli_run({"classify", "--input", harmonic, "--independent"});
  const auto c = cli_run({"classify", "--input", harmonic});
  std::filesystem::remove(square);
  std::filesystem::remove(harmonic);
  const bool ok_a = a.code == 0 && a.out.find("conclusion=IOZero fired_by=BC1") != std::string::npos;
  const bool ok_b = b.code == 0 && b.out.find("conclusion=IOOne fired_by=BC2") != std::string::npos;
  const bool ok_c = c.code == 3 && c.out.find("conclusion=Unknown") != std::string::npos;
  return {ok_a && ok_b && ok_c,
          fmt::format("n^-2 -> {} (exit {}), 1/n independent -> {} (exit {}), 1/n -> {} (exit {})",
                      ok_a ? "IOZero/BC1" : "wrong", a.code, ok_b ? "IOOne/BC2" : "wrong", b.code,
                      ok_c ? "Unknown" : "wrong", c.code)};
}

Outcome determinism() {
  const std::vector<std::string> args{"simulate", "--paths", "1000", "--n-max", "100000", "--seed", "0"};
  const auto first = cli_run(args);
  const auto second = cli_run(args);
  const bool same = !first.out.empty() && first.out == second.out && first.code == second.code;
  return {same, fmt::format("two runs: {} bytes each, identical = {}", first.out.size(), same)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-10)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {1, "formula identity", 1.0, formula_identity},
      {2, "asymptotic equivalence of the scaled CDF", 1.0, asymptotic_cdf},
      {3, "asymptotic equivalence of the difference term", 1.0, asymptotic_diff},
      {4, "Lemma21 verdict on the Clayton grid", 60.0, lemma21_verdicts},
      {5, "proof identity", 0.0, proof_identity},
      {6, "sampler correctness", 30.0, sampler_correctness},
      {7, "a.s. convergence probe", 120.0, as_probe},
      {8, "classifier calibration", 0.0, calibration},
      {9, "BC1/BC2 sanity", 0.0, bc_sanity},
      {10, "simulate determinism", 0.0, determinism},
  };

  bool all = true;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, fmt::format("threw: {}", e.what())};
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.time_limit_s <= 0.0 || elapsed < c.time_limit_s;
    const bool passed = outcome.passed && in_time;
    all = all && passed;
    const std::string limit = c.time_limit_s > 0.0 ? fmt::format(" (limit {:g} s)", c.time_limit_s) : "";
    fmt::print("{} criterion {:>2} [{}]: {}; {:.2f} s{}\n", passed ? "PASS" : "FAIL", c.id, c.title,
               outcome.detail, elapsed, limit);
  }
  std::fflush(stdout);
  return all ? 0 : 1;
}
