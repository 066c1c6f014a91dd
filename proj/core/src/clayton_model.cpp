#include "bclab/clayton_model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "bclab/errors.hpp"

namespace bclab {
namespace {

void require_unit_open(double x, const char* what) {
  if (!(x > 0.0 && x < 1.0)) {
    throw DomainError(fmt::format("{} must lie in (0, 1), got {}", what, x));
  }
}

void require_positive_index(std::int64_t n) {
  if (n < 1) throw DomainError(fmt::format("index n must be >= 1, got {}", n));
}

}  // namespace

void ClaytonParams::validate() const {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw DomainError(fmt::format("theta must be positive, got {}", theta));
  }
}

void ScaledMaxEvent::validate() const {
  require_unit_open(x, "threshold x");
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw DomainError(fmt::format("alpha must lie in [0, 1), got {}", alpha));
  }
}

double generator(const ClaytonParams& params, double t) {
  if (params.theta == 1.0) return 1.0 / (1.0 + t);
  return std::exp(-std::log1p(t) / params.theta);
}

double generator_inverse(const ClaytonParams& params, double u) {
  return std::expm1(-params.theta * std::log(u));
}

double joint_cdf(const ClaytonParams& params, std::span<const double> xs) {
  params.validate();
  if (xs.empty()) throw DomainError("joint_cdf needs at least one argument");
  double t = 0.0;
  for (double x : xs) {
    require_unit_open(x, "copula argument");
    t += params.theta == 1.0 ? 1.0 / x - 1.0 : generator_inverse(params, x);
  }
  return generator(params, t);
}

double max_cdf(const ClaytonParams& params, std::int64_t n, double x) {
  params.validate();
  require_positive_index(n);
  require_unit_open(x, "threshold x");
  const double gap = params.theta == 1.0 ? 1.0 / x - 1.0 : generator_inverse(params, x);
  return generator(params, static_cast<double>(n) * gap);
}

double threshold_gap(const ClaytonParams& params, std::int64_t n, const ScaledMaxEvent& ev) {
  const double shrink = std::exp(-ev.alpha * std::log(static_cast<double>(n)));  // n^{-alpha}
  return std::expm1(-params.theta * shrink * std::log(ev.x));
}

double scaled_max_cdf(const ClaytonParams& params, std::int64_t n, const ScaledMaxEvent& ev) {
  params.validate();
  ev.validate();
  require_positive_index(n);
  return generator(params, static_cast<double>(n) * threshold_gap(params, n, ev));
}

double pair_joint_scaled(const ClaytonParams& params, std::int64_t n, const ScaledMaxEvent& ev) {
  params.validate();
  ev.validate();
  require_positive_index(n);
  // The thresholds x^{n^{-alpha}} increase in n, so the first n coordinates
  // are bounded by the n-th threshold and X_{n+1} by the (n+1)-th.
  const double t = static_cast<double>(n) * threshold_gap(params, n, ev) +
                   threshold_gap(params, n + 1, ev);
  return generator(params, t);
}

double diff_term(const ClaytonParams& params, std::int64_t n, const ScaledMaxEvent& ev) {
  params.validate();
  ev.validate();
  require_positive_index(n);
  const double a = 1.0 + static_cast<double>(n) * threshold_gap(params, n, ev);
  const double next = threshold_gap(params, n + 1, ev);
  if (params.theta == 1.0) return next / (a * (a + next));
  return std::exp(-std::log(a) / params.theta) *
         -std::expm1(-std::log1p(next / a) / params.theta);
}

ClaytonPath::ClaytonPath(std::uint64_t seed, ClaytonParams params)
    : params_(params), engine_(seed) {
  params_.validate();
  std::gamma_distribution<double> mixing(1.0 / params_.theta, 1.0);
  state_.v = mixing(engine_);
}

PathStep ClaytonPath::step() {
  const double mark = marks_(engine_);
  state_.m = std::min(state_.m, mark);
  ++state_.n;
  return {generator(params_, mark / state_.v), generator(params_, state_.m / state_.v)};
}

std::optional<double> ClaytonPath::maximum() const {
  if (state_.n == 0) return std::nullopt;
  return generator(params_, state_.m / state_.v);
}

double ClaytonPath::log_maximum() const {
  if (state_.n == 0) throw Error("log_maximum read before the first step");
  return -std::log1p(state_.m / state_.v) / params_.theta;
}

std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace bclab
