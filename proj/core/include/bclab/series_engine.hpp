#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace bclab {

/// A nonnegative term sequence a_1, a_2, ... evaluated on demand.
struct TermSequence {
  std::function<double(std::int64_t)> eval;
  std::string label;
};

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double value) noexcept;
  CompensatedSum& operator+=(double value) noexcept {
    add(value);
    return *this;
  }
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// Sum of a_1..a_n_max in ascending order with compensation.
/// Throws NegativeTerm / NonFiniteTerm on the first offending index.
double partial_sum(const TermSequence& terms, std::int64_t n_max);

enum class SeriesClass { convergent, divergent, inconclusive };

std::string_view to_string(SeriesClass c) noexcept;

struct SeriesVerdict {
  SeriesClass classification = SeriesClass::inconclusive;
  double partial_sum = 0.0;
  std::int64_t n_scanned = 0;
  // Negated least-squares slope of log a_n against log n over the last decade.
  std::optional<double> tail_exponent;
  // C * n_max^{1-s} / (s-1) for the fitted envelope a_n <= C n^{-s}.
  std::optional<double> tail_bound;
  std::string evidence;
};

/// Decides between "sum < inf" and "sum = inf" from the first n_max terms.
///
/// The rule is heuristic: a power law is fitted to the last decade
/// [n_max/10, n_max]. Exponent s > 1 + margin with a consistent envelope
/// gives Convergent; s < 1 - margin gives Divergent; near s = 1 the
/// per-decade increments of the partial sums decide (harmonic-like growth
/// keeps them from shrinking). Everything else is Inconclusive.
///
/// Requires n_max >= 100 (InsufficientRange) and 0 < margin < 0.5.
SeriesVerdict classify(const TermSequence& terms, std::int64_t n_max,
                       double margin = 0.1);

}  // namespace bclab
