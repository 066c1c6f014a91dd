#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>

namespace bclab {

/// Clayton copula C(u) = psi(sum psi^{-1}(u_i)) with generator
/// psi(t) = (1 + t)^{-1/theta}. theta = 1 gives [sum 1/u_i - (n-1)]^{-1}.
struct ClaytonParams {
  double theta = 1.0;

  void validate() const;
};

/// The event {M_n^{n^alpha} <= x}. alpha = 0 selects the unscaled maximum.
struct ScaledMaxEvent {
  double x = 0.5;
  double alpha = 0.5;

  void validate() const;
};

double generator(const ClaytonParams& params, double t);          // psi
double generator_inverse(const ClaytonParams& params, double u);  // psi^{-1}

/// C(xs); every x_i must lie in (0, 1).
double joint_cdf(const ClaytonParams& params, std::span<const double> xs);

/// P(M_n <= x) = psi(n psi^{-1}(x)).
double max_cdf(const ClaytonParams& params, std::int64_t n, double x);

/// x^{-theta n^{-alpha}} - 1, evaluated as expm1 to survive n^{-alpha} -> 0.
double threshold_gap(const ClaytonParams& params, std::int64_t n, const ScaledMaxEvent& ev);

/// P(M_n^{n^alpha} <= x) = psi(n g(n)).
double scaled_max_cdf(const ClaytonParams& params, std::int64_t n, const ScaledMaxEvent& ev);

/// P(M_n^{n^alpha} <= x, M_{n+1}^{(n+1)^alpha} <= x) = psi(n g(n) + g(n+1)).
double pair_joint_scaled(const ClaytonParams& params, std::int64_t n, const ScaledMaxEvent& ev);

/// scaled_max_cdf(n) - pair_joint_scaled(n) without cancellation.
double diff_term(const ClaytonParams& params, std::int64_t n, const ScaledMaxEvent& ev);

/// Per-path sufficient statistic of the Marshall-Olkin construction
/// X_i = psi(E_i / V): the mixing variate, the running minimum of the
/// exponential marks and the step count.
struct ClaytonPathState {
  double v = 1.0;
  double m = std::numeric_limits<double>::infinity();
  std::int64_t n = 0;
};

struct PathStep {
  double x;        // X_n
  double maximum;  // M_n
};

/// One exchangeable Clayton path, generated incrementally with O(1) state.
class ClaytonPath {
 public:
  /// Draws V ~ Gamma(1/theta, 1) from a generator seeded by `seed`.
  explicit ClaytonPath(std::uint64_t seed, ClaytonParams params = {});

  PathStep step();

  const ClaytonPathState& state() const noexcept { return state_; }
  const ClaytonParams& params() const noexcept { return params_; }

  /// M_n, or nullopt before the first step.
  std::optional<double> maximum() const;

  /// log M_n, accurate when M_n is close to 1. Requires at least one step.
  double log_maximum() const;

 private:
  ClaytonParams params_;
  std::mt19937_64 engine_;
  std::exponential_distribution<double> marks_{1.0};
  ClaytonPathState state_;
};

/// Seed for path `index` of a run seeded with `seed` (splitmix64 mixing).
std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index) noexcept;

}  // namespace bclab
