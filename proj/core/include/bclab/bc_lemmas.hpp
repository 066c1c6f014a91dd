#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bclab/series_engine.hpp"

namespace bclab {

/// How the hypothesis P(A_n) -> 0 is established.
enum class ZeroLimit {
  check,     // numeric last-decade check (heuristic)
  certified  // asserted by the caller, e.g. from a closed-form limit
};

/// p(n) = P(A_n).
struct ProbSeq {
  std::function<double(std::int64_t)> p;
  ZeroLimit tends_to_zero = ZeroLimit::check;
  std::string label;
};

/// q(n) = P(A_n and A_{n+1}).
struct PairSeq {
  std::function<double(std::int64_t)> q;
  std::string label;
};

inline constexpr double kDefaultFrechetTolerance = 1e-12;
inline constexpr double kZeroLimitTolerance = 1e-3;

/// a_n = p(n); feeds both "sum < inf" and "sum = inf".
TermSequence cond_sum_p(const ProbSeq& p);

/// a_n = p(n) - q(n) = P(A_n A^c_{n+1}).
TermSequence cond_1_3(const ProbSeq& p, const PairSeq& q,
                      double frechet_tolerance = kDefaultFrechetTolerance);

/// a_n = p(n+1) - q(n) = P(A^c_n A_{n+1}).
TermSequence cond_1_4(const ProbSeq& p, const PairSeq& q,
                      double frechet_tolerance = kDefaultFrechetTolerance);

/// a_n = q(n), bounds-checked.
TermSequence cond_2_1(const ProbSeq& p, const PairSeq& q,
                      double frechet_tolerance = kDefaultFrechetTolerance);

/// Throws FrechetViolation(n) unless
/// max(0, p(n)+p(n+1)-1) - tol <= q(n) <= min(p(n), p(n+1)) + tol.
void check_frechet(std::int64_t n, double p_n, double p_next, double q_n,
                   double tolerance);

enum class Conclusion { io_zero, io_one, unknown };

enum class Rule {
  bc1,
  bc2,
  barndorff_nielsen,
  balakrishnan_stepanov,
  lemma21,
  remark21,
  monotone_prop31,
  none
};

enum class ConditionId { c1_1, c1_2, c1_3, c1_4, c2_1, c2_2, c2_2_alt };

std::string_view to_string(Conclusion c) noexcept;
std::string_view to_string(Rule r) noexcept;
std::string_view to_string(ConditionId id) noexcept;

struct ConditionReport {
  ConditionId id;
  SeriesVerdict verdict;
};

struct LemmaVerdict {
  Conclusion conclusion = Conclusion::unknown;
  Rule fired_by = Rule::none;
  std::vector<ConditionReport> condition_reports;
  std::vector<std::string> notes;

  const ConditionReport* report(ConditionId id) const;
};

struct EvaluateOptions {
  bool independent = false;
  bool monotone_decreasing = false;
  std::int64_t n_max = 100000;
  double margin = 0.1;
  double frechet_tolerance = kDefaultFrechetTolerance;
  double zero_limit_tolerance = kZeroLimitTolerance;
};

struct ZeroLimitCheck {
  bool holds = false;
  std::string evidence;
};

/// Certified limits pass outright; otherwise the last-decade maximum must be
/// below `tolerance` and p(n_max) < p(n_max/10) (or p(n_max) == 0).
ZeroLimitCheck check_zero_limit(const ProbSeq& p, std::int64_t n_max,
                                double tolerance = kZeroLimitTolerance);

/// Runs every applicable Borel-Cantelli style condition and returns the first
/// rule that fires, in this order: BC1, monotone shortcut, Lemma21 (with
/// its (1.2)/(2.1)/(2.2) hypotheses), its variant with (2.2'),
/// Barndorff-Nielsen (1.3), Balakrishnan-Stepanov (1.4), BC2. Every computed condition report is kept.
/// Branches that need q are skipped with a note when `q` is absent.
LemmaVerdict evaluate(const ProbSeq& p, const std::optional<PairSeq>& q,
                      const EvaluateOptions& options);

/// Decreasing events with P(A_n) -> 0: the monotone shortcut alone.
LemmaVerdict evaluate_monotone(const ProbSeq& p, const EvaluateOptions& options);

}  // namespace bclab
