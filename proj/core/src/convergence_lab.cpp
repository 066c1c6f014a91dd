#include "bclab/convergence_lab.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "bclab/errors.hpp"

namespace bclab {

void LimitExperiment::validate() const {
  if (epsilons.empty()) throw EmptyEpsilonGrid();
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0)) throw DomainError("epsilons must be strictly positive");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) {
      throw DomainError("epsilons must be sorted strictly descending");
    }
  }
  if (n_max < 100) throw InsufficientRange(n_max);
  if (paths < 1) throw DomainError("paths must be >= 1");
}

std::string_view to_string(ASOutcome o) noexcept {
  return o == ASOutcome::as_convergent ? "ASConvergent" : "NotEstablished";
}

EventModel clayton_scaled_max_model(ClaytonParams params, double alpha) {
  params.validate();
  ScaledMaxEvent{0.5, alpha}.validate();
  return [params, alpha](double epsilon) {
    EventFamily family;
    family.reduction =
        "X_n = M_n^{n^alpha} <= 1, so P(X_n > 1 + eps) = 0 and A_n(eps) = {X_n <= 1 - eps}";
    if (epsilon >= 1.0) {
      family.p = {[](std::int64_t) { return 0.0; }, ZeroLimit::certified,
                  fmt::format("P(X_n <= {}) = 0", 1.0 - epsilon)};
      family.q = PairSeq{[](std::int64_t) { return 0.0; }, "empty pair events"};
      return family;
    }
    const ScaledMaxEvent ev{1.0 - epsilon, alpha};
    family.p = {[params, ev](std::int64_t n) { return scaled_max_cdf(params, n, ev); },
                ZeroLimit::certified,
                fmt::format("Clayton P(M_n^(n^{}) <= {})", alpha, ev.x)};
    family.q = PairSeq{[params, ev](std::int64_t n) { return pair_joint_scaled(params, n, ev); },
                       fmt::format("Clayton pair joint, x={}, alpha={}", ev.x, alpha)};
    return family;
  };
}

ASReport theorem31_report(const EventModel& model, const LimitExperiment& exp, bool independent) {
  exp.validate();
  ASReport report;
  report.overall = ASOutcome::as_convergent;
  report.notes.push_back(fmt::format(
      "finite epsilon grid of {} values stands in for 'every small epsilon'", exp.epsilons.size()));
  EvaluateOptions options;
  options.independent = independent;
  options.n_max = exp.n_max;
  options.margin = exp.margin;
  for (double epsilon : exp.epsilons) {
    const EventFamily family = model(epsilon);
    if (!family.reduction.empty() &&
        std::find(report.notes.begin(), report.notes.end(), family.reduction) == report.notes.end()) {
      report.notes.push_back(family.reduction);
    }
    auto verdict = evaluate(family.p, family.q, options);
    if (verdict.conclusion != Conclusion::io_zero) report.overall = ASOutcome::not_established;
    report.per_epsilon.push_back({epsilon, std::move(verdict)});
  }
  return report;
}

ASReport corollary31_check(const EventModel& model, const LimitExperiment& exp,
                           bool decreasing_asserted) {
  if (!decreasing_asserted) throw MonotonicityNotAsserted();
  exp.validate();
  ASReport report;
  report.overall = ASOutcome::as_convergent;
  EvaluateOptions options;
  options.monotone_decreasing = true;
  options.n_max = exp.n_max;
  options.margin = exp.margin;
  for (double epsilon : exp.epsilons) {
    auto verdict = evaluate_monotone(model(epsilon).p, options);
    if (verdict.conclusion != Conclusion::io_zero) report.overall = ASOutcome::not_established;
    report.per_epsilon.push_back({epsilon, std::move(verdict)});
  }
  return report;
}

void for_each_path(std::int64_t paths, const std::function<void(std::int64_t)>& body) {
  const auto hw = static_cast<std::int64_t>(std::max(1u, std::thread::hardware_concurrency()));
  const std::int64_t workers = std::min(hw, paths);
  if (workers <= 1) {
    for (std::int64_t i = 0; i < paths; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  {
    std::vector<std::jthread> pool;
    for (std::int64_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::int64_t i = w; i < paths; i += workers) body(i);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double quantile_sorted(std::span<const double> sorted, double prob) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * std::clamp(prob, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("KS statistic of empty sample");
  std::sort(sample.begin(), sample.end());
  const auto count = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / count - f, f - static_cast<double>(i) / count});
  }
  return d;
}

std::vector<TailSupRow> empirical_tail_sup(const ClaytonParams& params, double alpha,
                                           const LimitExperiment& exp,
                                           std::span<const std::int64_t> checkpoints) {
  exp.validate();
  ScaledMaxEvent{0.5, alpha}.validate();
  if (checkpoints.empty()) throw DomainError("no checkpoints");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1 || (i > 0 && checkpoints[i] <= checkpoints[i - 1])) {
      throw DomainError("checkpoints must be positive and strictly increasing");
    }
  }
  if (checkpoints.back() > exp.n_max) throw DomainError("checkpoint beyond n_max");

  const std::size_t k = checkpoints.size();
  // sups[path * k + j] = sup over [checkpoints[j], checkpoints[j+1]) (last: up to n_max).
  std::vector<double> sups(static_cast<std::size_t>(exp.paths) * k, 0.0);
  // Between records of the running minimum, log M_n is constant and
  // |M_n^{n^alpha} - 1| is nondecreasing in n, so each segment's sup is
  // attained just before a record or at the segment end.
  auto deviation = [alpha](std::int64_t n, double log_max) {
    const double scale = alpha == 0.0 ? 1.0 : std::pow(static_cast<double>(n), alpha);
    return -std::expm1(scale * log_max);
  };
  auto segment_of = [&](std::int64_t n) {
    const auto it = std::upper_bound(checkpoints.begin(), checkpoints.end(), n);
    return static_cast<std::size_t>(it - checkpoints.begin()) - 1;
  };
  for_each_path(exp.paths, [&](std::int64_t path_index) {
    ClaytonPath path(path_seed(exp.seed, static_cast<std::uint64_t>(path_index)), params);
    double* segment = sups.data() + static_cast<std::size_t>(path_index) * k;
    std::size_t next = 0;  // index of the next checkpoint not yet reached
    double log_max = 0.0;
    for (std::int64_t n = 1; n <= exp.n_max; ++n) {
      const double previous_min = path.state().m;
      path.step();
      if (path.state().m < previous_min) {
        if (n - 1 >= checkpoints[0]) {
          double& slot = segment[segment_of(n - 1)];
          slot = std::max(slot, deviation(n - 1, log_max));
        }
        log_max = path.log_maximum();
      }
      while (next < k && n >= checkpoints[next]) ++next;
      const bool segment_end = n == exp.n_max || (next < k && n + 1 == checkpoints[next]);
      if (segment_end && n >= checkpoints[0]) {
        double& slot = segment[next - 1];
        slot = std::max(slot, deviation(n, log_max));
      }
    }
    for (std::size_t s = k - 1; s-- > 0;) segment[s] = std::max(segment[s], segment[s + 1]);
  });

  std::vector<TailSupRow> rows;
  std::vector<double> column(static_cast<std::size_t>(exp.paths));
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t p = 0; p < column.size(); ++p) column[p] = sups[p * k + j];
    std::sort(column.begin(), column.end());
    rows.push_back({checkpoints[j], quantile_sorted(column, 0.5), quantile_sorted(column, 0.9)});
  }
  return rows;
}

std::vector<ExactComparisonRow> empirical_vs_exact(const ClaytonParams& params,
                                                   std::span<const std::int64_t> n_list,
                                                   double x, double alpha,
                                                   const LimitExperiment& exp) {
  const ScaledMaxEvent ev{x, alpha};
  ev.validate();
  params.validate();
  if (exp.paths < 1) throw DomainError("paths must be >= 1");
  if (n_list.empty()) return {};
  std::vector<std::int64_t> ns(n_list.begin(), n_list.end());
  for (auto n : ns) {
    if (n < 1) throw DomainError("n must be >= 1");
  }
  const std::int64_t horizon = *std::max_element(ns.begin(), ns.end());
  const std::size_t k = ns.size();
  const double log_x = std::log(x);

  std::vector<std::uint8_t> hits(static_cast<std::size_t>(exp.paths) * k, 0);
  for_each_path(exp.paths, [&](std::int64_t path_index) {
    ClaytonPath path(path_seed(exp.seed, static_cast<std::uint64_t>(path_index)), params);
    std::uint8_t* out = hits.data() + static_cast<std::size_t>(path_index) * k;
    for (std::int64_t n = 1; n <= horizon; ++n) {
      path.step();
      for (std::size_t j = 0; j < k; ++j) {
        if (ns[j] != n) continue;
        const double scale = alpha == 0.0 ? 1.0 : std::pow(static_cast<double>(n), alpha);
        out[j] = scale * path.log_maximum() <= log_x ? 1 : 0;
      }
    }
  });

  std::vector<ExactComparisonRow> rows;
  const auto total = static_cast<double>(exp.paths);
  for (std::size_t j = 0; j < k; ++j) {
    std::int64_t count = 0;
    for (std::int64_t p = 0; p < exp.paths; ++p) count += hits[static_cast<std::size_t>(p) * k + j];
    ExactComparisonRow row{};
    row.n = ns[j];
    row.x = x;
    row.empirical = static_cast<double>(count) / total;
    row.exact = scaled_max_cdf(params, ns[j], ev);
    row.standard_error = std::sqrt(row.exact * (1.0 - row.exact) / total);
    const double diff = row.empirical - row.exact;
    row.z = row.standard_error > 0.0 ? diff / row.standard_error : (diff == 0.0 ? 0.0 : HUGE_VAL);
    row.flagged = std::abs(row.z) > kZScoreFlag;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace bclab
