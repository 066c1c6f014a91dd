#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bclab/bc_lemmas.hpp"
#include "bclab/clayton_model.hpp"

namespace bclab {

struct LimitExperiment {
  double mu = 1.0;
  std::vector<double> epsilons{0.5, 0.1, 0.05};  // strictly positive, descending
  std::int64_t n_max = 1000000;
  std::int64_t paths = 1000;
  std::uint64_t seed = 0;
  double margin = 0.1;

  void validate() const;
};

/// The events A_n(eps) = {X_n outside [mu - eps, mu + eps]} of a model.
struct EventFamily {
  ProbSeq p;
  std::optional<PairSeq> q;
  std::string reduction;  // how the two-sided event was reduced, if at all
};

using EventModel = std::function<EventFamily(double epsilon)>;

/// X_n = M_n^{n^alpha} for the Clayton sequence, mu = 1. X_n <= 1 always,
/// so A_n(eps) = {X_n <= 1 - eps} and the pair term is exact.
EventModel clayton_scaled_max_model(ClaytonParams params, double alpha);

struct EpsilonVerdict {
  double epsilon;
  LemmaVerdict verdict;
};

enum class ASOutcome { as_convergent, not_established };

std::string_view to_string(ASOutcome o) noexcept;

struct TailSupRow {
  std::int64_t checkpoint;
  double median;
  double p90;
};

struct ASReport {
  std::vector<EpsilonVerdict> per_epsilon;
  ASOutcome overall = ASOutcome::not_established;
  std::optional<std::vector<TailSupRow>> empirical;
  std::vector<std::string> notes;
};

/// Reduces "X_n -> mu a.s." to one Borel-Cantelli evaluation per epsilon of
/// the (finite) grid. ASConvergent iff every epsilon gives IOZero.
ASReport theorem31_report(const EventModel& model, const LimitExperiment& exp,
                          bool independent = false);

/// Ordered sequences: with decreasing events only P(A_n) -> 0 is needed.
/// Throws MonotonicityNotAsserted unless `decreasing_asserted`.
ASReport corollary31_check(const EventModel& model, const LimitExperiment& exp,
                           bool decreasing_asserted);

/// Median and 90th percentile over `exp.paths` Clayton paths of
/// sup_{N <= n <= n_max} |M_n^{n^alpha} - 1| for every checkpoint N.
std::vector<TailSupRow> empirical_tail_sup(const ClaytonParams& params, double alpha,
                                           const LimitExperiment& exp,
                                           std::span<const std::int64_t> checkpoints);

struct ExactComparisonRow {
  std::int64_t n;
  double x;
  double empirical;
  double exact;
  double standard_error;
  double z;
  bool flagged;  // |z| > 4
};

/// Empirical frequency of {M_n^{n^alpha} <= x} against scaled_max_cdf.
std::vector<ExactComparisonRow> empirical_vs_exact(const ClaytonParams& params,
                                                   std::span<const std::int64_t> n_list,
                                                   double x, double alpha,
                                                   const LimitExperiment& exp);

inline constexpr double kZScoreFlag = 4.0;

/// One-sample Kolmogorov-Smirnov statistic sup |F_N - F|. Sorts `sample`.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Type-7 (linear interpolation) quantile of sorted data.
double quantile_sorted(std::span<const double> sorted, double prob);

/// Runs body(path_index) for every path, spread over hardware threads.
/// Results must be written to per-path slots for a deterministic merge.
void for_each_path(std::int64_t paths, const std::function<void(std::int64_t)>& body);

}  // namespace bclab
