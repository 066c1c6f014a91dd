#include "bclab/series_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

#include "bclab/errors.hpp"

namespace bclab {
namespace {

constexpr int kFitSamples = 256;
constexpr int kMaxDecades = 3;
constexpr double kZeroTailIncrement = 1e-15;

double checked_term(const TermSequence& terms, std::int64_t n) {
  const double a = terms.eval(n);
  if (!std::isfinite(a)) throw NonFiniteTerm(n);
  if (a < 0.0) throw NegativeTerm(n);
  return a;
}

// Log-spaced, deduplicated indices covering [lo, hi].
std::vector<std::int64_t> log_grid(std::int64_t lo, std::int64_t hi) {
  std::vector<std::int64_t> grid;
  grid.reserve(kFitSamples);
  const double log_lo = std::log(static_cast<double>(lo));
  const double log_hi = std::log(static_cast<double>(hi));
  for (int k = 0; k < kFitSamples; ++k) {
    const double t = static_cast<double>(k) / (kFitSamples - 1);
    auto n = static_cast<std::int64_t>(std::llround(std::exp(log_lo + t * (log_hi - log_lo))));
    n = std::clamp(n, lo, hi);
    if (grid.empty() || n > grid.back()) grid.push_back(n);
  }
  if (grid.back() != hi) grid.push_back(hi);
  return grid;
}

struct PowerFit {
  double exponent = 0.0;
  double envelope_growth = 0.0;  // log of (second-half envelope / first-half envelope)
  double log_envelope = 0.0;     // log C of a_n <= C n^{-s} over the whole window
};

PowerFit fit_power_law(const std::vector<std::int64_t>& grid,
                       const std::vector<double>& terms) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (auto n : grid) {
    const double a = terms[static_cast<std::size_t>(n - 1)];
    if (a > 0.0) {
      xs.push_back(std::log(static_cast<double>(n)));
      ys.push_back(std::log(a));
    }
  }
  const auto count = static_cast<double>(xs.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= count;
  mean_y /= count;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
    sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
  }
  PowerFit fit;
  fit.exponent = sxx > 0.0 ? -sxy / sxx : 0.0;

  const std::size_t half = xs.size() / 2;
  double first = -HUGE_VAL;
  double second = -HUGE_VAL;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double level = ys[i] + fit.exponent * xs[i];
    double& slot = i < half ? first : second;
    slot = std::max(slot, level);
  }
  fit.envelope_growth = second - first;
  fit.log_envelope = std::max(first, second);
  return fit;
}

}  // namespace

void CompensatedSum::add(double value) noexcept {
  const double t = sum_ + value;
  if (std::abs(sum_) >= std::abs(value)) {
    compensation_ += (sum_ - t) + value;
  } else {
    compensation_ += (value - t) + sum_;
  }
  sum_ = t;
}

double partial_sum(const TermSequence& terms, std::int64_t n_max) {
  if (n_max < 1) throw std::invalid_argument("partial_sum: n_max must be >= 1");
  CompensatedSum sum;
  for (std::int64_t n = 1; n <= n_max; ++n) sum += checked_term(terms, n);
  return sum.value();
}

std::string_view to_string(SeriesClass c) noexcept {
  switch (c) {
    case SeriesClass::convergent:
      return "Convergent";
    case SeriesClass::divergent:
      return "Divergent";
    case SeriesClass::inconclusive:
      return "Inconclusive";
  }
  return "?";
}

SeriesVerdict classify(const TermSequence& terms, std::int64_t n_max, double margin) {
  if (n_max < 100) throw InsufficientRange(n_max);
  if (!(margin > 0.0 && margin < 0.5)) {
    throw std::invalid_argument("classify: margin must lie in (0, 0.5)");
  }

  // Decade boundaries n_max, n_max/10, ... >= 1, stored ascending.
  std::vector<std::int64_t> bounds;
  for (std::int64_t b = n_max; b >= 1; b /= 10) bounds.push_back(b);
  std::reverse(bounds.begin(), bounds.end());

  std::vector<double> values(static_cast<std::size_t>(n_max));
  std::vector<double> bound_sums;
  bound_sums.reserve(bounds.size());
  CompensatedSum sum;
  auto next_bound = bounds.begin();
  for (std::int64_t n = 1; n <= n_max; ++n) {
    const double a = checked_term(terms, n);
    values[static_cast<std::size_t>(n - 1)] = a;
    sum += a;
    if (next_bound != bounds.end() && n == *next_bound) {
      bound_sums.push_back(sum.value());
      ++next_bound;
    }
  }

  SeriesVerdict verdict;
  verdict.partial_sum = sum.value();
  verdict.n_scanned = n_max;

  // Latest decade first.
  std::vector<double> increments;
  for (std::size_t j = bound_sums.size() - 1; j >= 1 && increments.size() < kMaxDecades; --j) {
    increments.push_back(bound_sums[j] - bound_sums[j - 1]);
  }

  const std::int64_t lo = std::max<std::int64_t>(1, n_max / 10);
  const auto grid = log_grid(lo, n_max);
  const auto zeros = std::count_if(grid.begin(), grid.end(), [&](std::int64_t n) {
    return values[static_cast<std::size_t>(n - 1)] == 0.0;
  });

  if (2 * static_cast<std::size_t>(zeros) > grid.size()) {
    if (increments.front() < kZeroTailIncrement) {
      verdict.classification = SeriesClass::convergent;
      verdict.evidence = fmt::format(
          "heuristic: {} of {} window samples are zero; last-decade increment {:.3g} < {:.0e}",
          zeros, grid.size(), increments.front(), kZeroTailIncrement);
    } else {
      verdict.evidence = fmt::format(
          "heuristic: {} of {} window samples are zero but last-decade increment is {:.3g}",
          zeros, grid.size(), increments.front());
    }
    return verdict;
  }

  const PowerFit fit = fit_power_law(grid, values);
  const double s = fit.exponent;
  verdict.tail_exponent = s;
  const std::string window = fmt::format("s={:.4f} over [{}, {}]", s, lo, n_max);

  const double envelope_slack = 0.5 * margin * std::log(10.0);
  if (s > 1.0 + margin) {
    if (fit.envelope_growth <= envelope_slack) {
      const double tail = std::exp(fit.log_envelope) *
                          std::pow(static_cast<double>(n_max), 1.0 - s) / (s - 1.0);
      verdict.tail_bound = tail;
      verdict.classification = SeriesClass::convergent;
      verdict.evidence = fmt::format(
          "heuristic: {} > 1+{}; envelope holds (growth {:.3g}); integral tail bound {:.3g}",
          window, margin, fit.envelope_growth, tail);
      return verdict;
    }
    // Faster than any power: the envelope drifts but the last decade adds nothing.
    if (increments.front() <= kZeroTailIncrement * std::abs(verdict.partial_sum)) {
      verdict.classification = SeriesClass::convergent;
      verdict.evidence = fmt::format(
          "heuristic: {} > 1+{}; envelope growth {:.3g} but last-decade increment {:.3g} is "
          "below {:.0e} of the partial sum",
          window, margin, fit.envelope_growth, increments.front(), kZeroTailIncrement);
      return verdict;
    }
  } else if (s < 1.0 - margin) {
    verdict.classification = SeriesClass::divergent;
    verdict.evidence = fmt::format("heuristic: {} < 1-{}", window, margin);
    return verdict;
  }

  // Harmonic-like growth: decade increments stay positive and do not shrink.
  bool growing = increments.size() >= 2;
  const double ratio_floor = 1.0 - margin / 10.0;
  for (std::size_t j = 0; growing && j < increments.size(); ++j) {
    if (!(increments[j] > 0.0)) growing = false;
    if (growing && j + 1 < increments.size() && increments[j] < ratio_floor * increments[j + 1]) {
      growing = false;
    }
  }
  std::string decades;
  for (auto d : increments) decades += fmt::format(" {:.4g}", d);
  if (growing) {
    verdict.classification = SeriesClass::divergent;
    verdict.evidence = fmt::format(
        "heuristic: {}; decade increments (latest first){} do not shrink below factor {}",
        window, decades, ratio_floor);
  } else {
    verdict.evidence = fmt::format(
        "heuristic: {} within margin {} of 1 or envelope growth {:.3g} too large; decade "
        "increments (latest first){}",
        window, margin, fit.envelope_growth, decades);
  }
  return verdict;
}

}  // namespace bclab
