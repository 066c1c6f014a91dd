#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "bclab/cli.hpp"
#include "bclab/table_io.hpp"

using namespace bclab;
using cli::main_entry;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "bclab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) { return std::string(BCLAB_TEST_TMP) + "/" + name; }

std::string write_p_table(const std::string& name, std::int64_t rows,
                          const std::function<double(std::int64_t)>& p) {
  EventTable table;
  for (std::int64_t n = 1; n <= rows; ++n) table.p.push_back(p(n));
  const std::string path = temp_path(name);
  std::ofstream file(path);
  write_event_table(file, table);
  return path;
}

std::vector<nlohmann::json> json_lines(const std::string& text) {
  std::vector<nlohmann::json> records;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) records.push_back(nlohmann::json::parse(line));
  return records;
}

const nlohmann::json* find_record(const std::vector<nlohmann::json>& records, const std::string& kind) {
  for (const auto& r : records) {
    if (r.at("record") == kind) return &r;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("classify reaches BC1, BC2 and Unknown with the right exit codes") {
  const auto square = write_p_table("inv_square.txt", 100000, [](std::int64_t n) { return 1.0 / (double(n) * double(n)); });
  const auto harmonic = write_p_table("harmonic.txt", 100000, [](std::int64_t n) { return 1.0 / double(n); });

  auto r = run({"classify", "--input", square});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("verdict: conclusion=IOZero fired_by=BC1") != std::string::npos);

  r = run({"classify", "--input", harmonic, "--independent"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("conclusion=IOOne fired_by=BC2") != std::string::npos);

  r = run({"classify", "--input", harmonic});
  CHECK(r.code == cli::kInconclusive);
  CHECK(r.out.find("conclusion=Unknown") != std::string::npos);
  CHECK(r.out.find("BC2 not applied") != std::string::npos);

  r = run({"classify", "--input", harmonic, "--monotone-decreasing"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("fired_by=MonotoneProp31") != std::string::npos);
}

TEST_CASE("classify input errors") {
  CHECK(run({"classify", "--input", temp_path("does_not_exist.txt")}).code == cli::kFailure);
  CHECK(run({"classify"}).code == cli::kUsage);
  const auto shorty = write_p_table("short.txt", 20, [](std::int64_t n) { return 1.0 / double(n); });
  CHECK(run({"classify", "--input", shorty}).code == cli::kFailure);
  const std::string bad = temp_path("bad.txt");
  std::ofstream(bad) << "1 0.5\n2 x\n";
  const auto r = run({"classify", "--input", bad});
  CHECK(r.code == cli::kFailure);
  CHECK(r.err.find("line 2") != std::string::npos);
  // q above min(p_n, p_{n+1}) is rejected.
  const std::string invalid = temp_path("invalid_pair.txt");
  {
    std::ofstream file(invalid);
    for (int n = 1; n <= 200; ++n) file << n << ' ' << 0.5 << ' ' << (n == 50 ? 0.6 : 0.25) << '\n';
  }
  const auto v = run({"classify", "--input", invalid});
  CHECK(v.code == cli::kFailure);
  CHECK(v.err.find("50") != std::string::npos);
}

TEST_CASE("analyze emits a table that classify reproduces") {
  const std::string terms = temp_path("clayton_terms.txt");
  const auto direct = run({"analyze", "--x", "0.9", "--alpha", "0.5", "--n-max", "1000000", "--emit-terms",
                           terms, "--output-format", "json-lines"});
  REQUIRE(direct.code == cli::kOk);
  const auto records = json_lines(direct.out);
  for (const auto& r : records) CHECK(r.at("schema_version") == cli::kSchemaVersion);
  const auto* verdict = find_record(records, "verdict");
  REQUIRE(verdict != nullptr);
  CHECK(verdict->at("conclusion") == "IOZero");
  CHECK(verdict->at("fired_by") == "Lemma21");
  const auto* asym = find_record(records, "asymptotics");
  REQUIRE(asym != nullptr);
  CHECK(std::abs(asym->at("diff_ratio").get<double>() - 1.0) < 0.05);

  std::ifstream in(terms);
  const auto table = read_event_table(in);
  CHECK(table.rows() == 1000001);
  CHECK(table.q.has_value());

  const auto replay = run({"classify", "--input", terms, "--output-format", "json-lines"});
  CHECK(replay.code == cli::kOk);
  const auto replay_records = json_lines(replay.out);
  const auto* again = find_record(replay_records, "verdict");
  REQUIRE(again != nullptr);
  CHECK(again->at("fired_by") == "Lemma21");
}

TEST_CASE("analyze variants") {
  auto r = run({"analyze", "--x", "0.5", "--alpha", "0", "--n-max", "10000"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("fired_by=MonotoneProp31") != std::string::npos);

  r = run({"analyze", "--x", "0.5", "--alpha", "0.5", "--n-max", "100000", "--epsilons", "0.5,0.1"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("as_report: overall=ASConvergent") != std::string::npos);
  CHECK(r.out.find("epsilon: epsilon=0.1") != std::string::npos);

  CHECK(run({"analyze", "--x", "1.5"}).code == cli::kUsage);
  CHECK(run({"analyze", "--alpha", "1.0"}).code == cli::kUsage);
  CHECK(run({"analyze", "--n-max", "10"}).code == cli::kUsage);
  CHECK(run({"analyze", "--epsilons", "0.1,0.5"}).code == cli::kUsage);
  CHECK(run({"analyze", "--theta", "-1"}).code == cli::kUsage);
}

TEST_CASE("simulate is deterministic and guarded") {
  const std::vector<std::string> args{"simulate", "--paths", "50", "--n-max", "2000", "--seed", "3",
                                      "--output-format", "json-lines"};
  const auto a = run(args);
  const auto b = run(args);
  CHECK(a.out == b.out);
  CHECK_FALSE(a.out.empty());
  for (const auto& r : json_lines(a.out)) CHECK(r.at("schema_version") == 1);
  const auto records = json_lines(a.out);
  const auto* summary = find_record(records, "summary");
  REQUIRE(summary != nullptr);
  CHECK(summary->contains("z_flags"));

  const auto guarded = run({"simulate", "--paths", "1000000", "--n-max", "100000"});
  CHECK(guarded.code == cli::kUsage);
  CHECK(guarded.err.find("--force") != std::string::npos);
  CHECK(run({"simulate", "--paths", "0"}).code == cli::kUsage);
  CHECK(run({"simulate", "--x", "0"}).code == cli::kUsage);
}

TEST_CASE("verify quick passes and detects perturbed pair probabilities") {
  const auto ok = run({"verify", "--quick"});
  CHECK(ok.code == cli::kOk);
  CHECK(ok.out.find("summary: status=PASS") != std::string::npos);
  const auto bad = run({"verify", "--quick", "--perturb", "1e-6"});
  CHECK(bad.code == cli::kFailure);
  CHECK(bad.out.find("name=clayton_frechet_bounds status=FAIL") != std::string::npos);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == cli::kUsage);
  CHECK(run({"frobnicate"}).code == cli::kUsage);
  CHECK(run({"verify", "--output-format", "xml"}).code == cli::kUsage);
  CHECK(run({"--help"}).code == cli::kOk);
}
