#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bclab::cli {

/// Process exit codes; a stable contract for scripts.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kInconclusive = 3,
};

enum class Command { classify, analyze, simulate, verify };
enum class OutputFormat { table, json_lines };

inline constexpr int kSchemaVersion = 1;
inline constexpr double kResourceGuard = 1e10;  // paths * n_max without --force

struct RunConfig {
  Command command = Command::verify;
  std::optional<double> x;
  double alpha = 0.5;
  double theta = 1.0;
  std::optional<std::int64_t> n_max;
  std::int64_t paths = 10000;
  std::uint64_t seed = 0;
  std::optional<std::vector<double>> epsilons;
  std::optional<std::string> input_path;
  OutputFormat output_format = OutputFormat::table;
  double frechet_tolerance = 1e-12;
  std::optional<std::string> emit_terms;
  bool independent = false;
  bool monotone_decreasing = false;
  bool force = false;
  bool quick = false;
  double perturb = 0.0;
};

int cmd_classify(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_analyze(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err);

int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv with CLI11 and dispatches; returns the exit code.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bclab::cli
