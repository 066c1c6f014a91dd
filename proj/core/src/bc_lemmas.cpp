#include "bclab/bc_lemmas.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include <fmt/format.h>

#include "bclab/errors.hpp"

namespace bclab {
namespace {

double checked_probability(const ProbSeq& p, std::int64_t n) {
  const double value = p.p(n);
  if (!(value >= 0.0 && value <= 1.0)) throw OutOfRangeProbability(n);
  return value;
}

struct PairTerms {
  double p_n;
  double p_next;
  double q_n;
};

PairTerms checked_pair(const ProbSeq& p, const PairSeq& q, std::int64_t n, double tolerance) {
  PairTerms t{checked_probability(p, n), checked_probability(p, n + 1), q.q(n)};
  if (!std::isfinite(t.q_n)) throw NonFiniteTerm(n);
  check_frechet(n, t.p_n, t.p_next, t.q_n, tolerance);
  return t;
}

bool is(const std::optional<SeriesVerdict>& v, SeriesClass c) {
  return v && v->classification == c;
}

}  // namespace

void check_frechet(std::int64_t n, double p_n, double p_next, double q_n, double tolerance) {
  const double upper = std::min(p_n, p_next);
  const double lower = std::max(0.0, p_n + p_next - 1.0);
  if (q_n > upper + tolerance || q_n < lower - tolerance) throw FrechetViolation(n);
}

TermSequence cond_sum_p(const ProbSeq& p) {
  return {[p](std::int64_t n) { return checked_probability(p, n); },
          fmt::format("P(A_n) [{}]", p.label)};
}

TermSequence cond_1_3(const ProbSeq& p, const PairSeq& q, double frechet_tolerance) {
  return {[p, q, frechet_tolerance](std::int64_t n) {
            const auto t = checked_pair(p, q, n, frechet_tolerance);
            // Within tolerance q may exceed p by a rounding error.
            return std::max(0.0, t.p_n - t.q_n);
          },
          fmt::format("P(A_n) - P(A_n A_n+1) [{}; {}]", p.label, q.label)};
}

TermSequence cond_1_4(const ProbSeq& p, const PairSeq& q, double frechet_tolerance) {
  return {[p, q, frechet_tolerance](std::int64_t n) {
            const auto t = checked_pair(p, q, n, frechet_tolerance);
            return std::max(0.0, t.p_next - t.q_n);
          },
          fmt::format("P(A_n+1) - P(A_n A_n+1) [{}; {}]", p.label, q.label)};
}

TermSequence cond_2_1(const ProbSeq& p, const PairSeq& q, double frechet_tolerance) {
  return {[p, q, frechet_tolerance](std::int64_t n) {
            return std::max(0.0, checked_pair(p, q, n, frechet_tolerance).q_n);
          },
          fmt::format("P(A_n A_n+1) [{}]", q.label)};
}

std::string_view to_string(Conclusion c) noexcept {
  switch (c) {
    case Conclusion::io_zero:
      return "IOZero";
    case Conclusion::io_one:
      return "IOOne";
    case Conclusion::unknown:
      return "Unknown";
  }
  return "?";
}

std::string_view to_string(Rule r) noexcept {
  switch (r) {
    case Rule::bc1:
      return "BC1";
    case Rule::bc2:
      return "BC2";
    case Rule::barndorff_nielsen:
      return "BarndorffNielsen";
    case Rule::balakrishnan_stepanov:
      return "BalakrishnanStepanov";
    case Rule::lemma21:
      return "Lemma21";
    case Rule::remark21:
      return "Remark21";
    case Rule::monotone_prop31:
      return "MonotoneProp31";
    case Rule::none:
      return "None";
  }
  return "?";
}

std::string_view to_string(ConditionId id) noexcept {
  switch (id) {
    case ConditionId::c1_1:
      return "1.1";
    case ConditionId::c1_2:
      return "1.2";
    case ConditionId::c1_3:
      return "1.3";
    case ConditionId::c1_4:
      return "1.4";
    case ConditionId::c2_1:
      return "2.1";
    case ConditionId::c2_2:
      return "2.2";
    case ConditionId::c2_2_alt:
      return "2.2'";
  }
  return "?";
}

const ConditionReport* LemmaVerdict::report(ConditionId id) const {
  const auto it = std::find_if(condition_reports.begin(), condition_reports.end(),
                               [id](const ConditionReport& r) { return r.id == id; });
  return it == condition_reports.end() ? nullptr : &*it;
}

ZeroLimitCheck check_zero_limit(const ProbSeq& p, std::int64_t n_max, double tolerance) {
  if (p.tends_to_zero == ZeroLimit::certified) {
    return {true, "P(A_n) -> 0 certified by caller"};
  }
  const std::int64_t lo = std::max<std::int64_t>(1, n_max / 10);
  double last_max = 0.0;
  for (std::int64_t n = lo; n <= n_max; ++n) last_max = std::max(last_max, checked_probability(p, n));
  const double first = checked_probability(p, lo);
  const double last = checked_probability(p, n_max);
  const bool decreasing = last == 0.0 || last < first;
  ZeroLimitCheck check;
  check.holds = last_max < tolerance && decreasing;
  check.evidence = fmt::format(
      "heuristic: P(A_n) -> 0 {}: max over [{}, {}] = {:.3g} (tolerance {:.0e}), p({}) = {:.3g} vs "
      "p({}) = {:.3g}",
      check.holds ? "accepted" : "rejected", lo, n_max, last_max, tolerance, n_max, last, lo,
      first);
  return check;
}

LemmaVerdict evaluate(const ProbSeq& p, const std::optional<PairSeq>& q,
                      const EvaluateOptions& options) {
  if (options.n_max < 100) throw InsufficientRange(options.n_max);
  const auto n_max = options.n_max;
  const auto margin = options.margin;
  const auto tol = options.frechet_tolerance;

  // Condition series are independent; classify them concurrently and merge
  // in a fixed order so the verdict does not depend on completion order.
  auto run = [&](TermSequence terms) {
    return std::async(std::launch::async, [terms = std::move(terms), n_max, margin] {
      return classify(terms, n_max, margin);
    });
  };
  auto sum_p_job = run(cond_sum_p(p));
  std::optional<std::future<SeriesVerdict>> pair_job;
  std::optional<std::future<SeriesVerdict>> diff13_job;
  std::optional<std::future<SeriesVerdict>> diff14_job;
  if (q) {
    pair_job = run(cond_2_1(p, *q, tol));
    diff13_job = run(cond_1_3(p, *q, tol));
    diff14_job = run(cond_1_4(p, *q, tol));
  }
  auto zero_job = std::async(std::launch::async, [&] {
    return check_zero_limit(p, n_max, options.zero_limit_tolerance);
  });

  // Collect every future before rethrowing so no task outlives this frame.
  std::exception_ptr failure;
  auto take = [&failure](std::future<SeriesVerdict>& job) -> std::optional<SeriesVerdict> {
    try {
      return job.get();
    } catch (...) {
      if (!failure) failure = std::current_exception();
      return std::nullopt;
    }
  };
  const auto sum_p = take(sum_p_job);
  const auto pair = pair_job ? take(*pair_job) : std::nullopt;
  const auto diff13 = diff13_job ? take(*diff13_job) : std::nullopt;
  const auto diff14 = diff14_job ? take(*diff14_job) : std::nullopt;
  ZeroLimitCheck zero;
  try {
    zero = zero_job.get();
  } catch (...) {
    if (!failure) failure = std::current_exception();
  }
  if (failure) std::rethrow_exception(failure);

  LemmaVerdict verdict;
  verdict.condition_reports.push_back({ConditionId::c1_1, *sum_p});
  verdict.condition_reports.push_back({ConditionId::c1_2, *sum_p});
  if (q) {
    verdict.condition_reports.push_back({ConditionId::c1_3, *diff13});
    verdict.condition_reports.push_back({ConditionId::c1_4, *diff14});
    verdict.condition_reports.push_back({ConditionId::c2_1, *pair});
    verdict.condition_reports.push_back({ConditionId::c2_2, *diff13});
    verdict.condition_reports.push_back({ConditionId::c2_2_alt, *diff14});
  } else {
    verdict.notes.emplace_back(
        "pair sequence absent: skipped (1.3), (1.4), Lemma21 and Remark21 rules");
  }
  verdict.notes.push_back(zero.evidence);

  auto fire = [&verdict](Conclusion c, Rule r) {
    verdict.conclusion = c;
    verdict.fired_by = r;
    return verdict;
  };

  const bool sum_diverges = is(sum_p, SeriesClass::divergent);
  const bool pair_diverges = is(pair, SeriesClass::divergent);
  if (is(sum_p, SeriesClass::convergent)) return fire(Conclusion::io_zero, Rule::bc1);
  if (options.monotone_decreasing && zero.holds) {
    return fire(Conclusion::io_zero, Rule::monotone_prop31);
  }
  if (zero.holds && sum_diverges && pair_diverges) {
    if (is(diff13, SeriesClass::convergent)) return fire(Conclusion::io_zero, Rule::lemma21);
    if (is(diff14, SeriesClass::convergent)) return fire(Conclusion::io_zero, Rule::remark21);
  }
  if (zero.holds && is(diff13, SeriesClass::convergent)) {
    return fire(Conclusion::io_zero, Rule::barndorff_nielsen);
  }
  if (zero.holds && is(diff14, SeriesClass::convergent)) {
    return fire(Conclusion::io_zero, Rule::balakrishnan_stepanov);
  }
  if (options.independent && sum_diverges) return fire(Conclusion::io_one, Rule::bc2);
  if (!options.independent && sum_diverges) {
    verdict.notes.emplace_back("(1.2) diverges but independence was not asserted; BC2 not applied");
  }
  return verdict;
}

LemmaVerdict evaluate_monotone(const ProbSeq& p, const EvaluateOptions& options) {
  if (options.n_max < 100) throw InsufficientRange(options.n_max);
  LemmaVerdict verdict;
  verdict.condition_reports.push_back(
      {ConditionId::c1_2, classify(cond_sum_p(p), options.n_max, options.margin)});
  const auto zero = check_zero_limit(p, options.n_max, options.zero_limit_tolerance);
  verdict.notes.push_back(zero.evidence);
  verdict.notes.emplace_back("events asserted decreasing in n");
  if (zero.holds) {
    verdict.conclusion = Conclusion::io_zero;
    verdict.fired_by = Rule::monotone_prop31;
  }
  return verdict;
}

}  // namespace bclab
