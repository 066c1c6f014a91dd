#include "bclab/table_io.hpp"

#include <charconv>
#include <istream>
#include <memory>
#include <ostream>
#include <string>

#include <fmt/format.h>

#include "bclab/errors.hpp"

namespace bclab {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  auto is_sep = [](char c) { return c == ' ' || c == '\t' || c == ',' || c == '\r'; };
  while (i < line.size()) {
    while (i < line.size() && is_sep(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_sep(line[i])) ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

std::optional<double> parse_number(std::string_view field) {
  double value = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return value;
}

// Parses rows of `min_cols`..`max_cols` numeric columns whose first column
// is the 1-based index. Returns the remaining columns.
std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

constexpr std::string_view kCertifiedDirective = "tends_to_zero: certified";

std::vector<std::vector<double>> read_rows(std::istream& in, std::size_t min_cols,
                                           std::size_t max_cols, ZeroLimit* zero_limit) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool header_allowed = true;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (view.starts_with("#!")) {
      const auto directive = trim(view.substr(2));
      if (directive != kCertifiedDirective) {
        throw ParseError(fmt::format("unknown directive '{}'", directive), line_no);
      }
      if (zero_limit == nullptr) throw ParseError("directive not allowed in a term table", line_no);
      *zero_limit = ZeroLimit::certified;
      continue;
    }
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    const auto fields = split_fields(view);
    if (fields.empty()) continue;
    if (header_allowed && !parse_number(fields.front())) {
      header_allowed = false;
      continue;
    }
    header_allowed = false;
    if (fields.size() < min_cols || fields.size() > max_cols) {
      throw ParseError(fmt::format("expected {} to {} columns, got {}", min_cols, max_cols,
                                   fields.size()),
                       line_no);
    }
    if (width == 0) width = fields.size();
    if (fields.size() != width) {
      throw ParseError(fmt::format("column count changed from {} to {}", width, fields.size()),
                       line_no);
    }
    std::vector<double> values;
    for (auto field : fields) {
      const auto value = parse_number(field);
      if (!value) throw ParseError(fmt::format("not a number: '{}'", field), line_no);
      values.push_back(*value);
    }
    const double expected = static_cast<double>(rows.size() + 1);
    if (values.front() != expected) {
      throw ParseError(fmt::format("index {} out of sequence (expected {})", fields.front(),
                                   rows.size() + 1),
                       line_no);
    }
    values.erase(values.begin());
    rows.push_back(std::move(values));
  }
  return rows;
}

}  // namespace

EventTable read_event_table(std::istream& in) {
  EventTable table;
  auto rows = read_rows(in, 2, 3, &table.tends_to_zero);
  table.p.reserve(rows.size());
  if (!rows.empty() && rows.front().size() == 2) table.q.emplace();
  for (const auto& row : rows) {
    table.p.push_back(row[0]);
    if (table.q) table.q->push_back(row[1]);
  }
  return table;
}

std::vector<double> read_term_table(std::istream& in) {
  auto rows = read_rows(in, 2, 2, nullptr);
  std::vector<double> terms;
  terms.reserve(rows.size());
  for (const auto& row : rows) terms.push_back(row[0]);
  return terms;
}

void write_event_table(std::ostream& out, const EventTable& table) {
  if (table.tends_to_zero == ZeroLimit::certified) out << "#! " << kCertifiedDirective << '\n';
  out << (table.q ? "n p q\n" : "n p\n");
  for (std::size_t i = 0; i < table.p.size(); ++i) {
    if (table.q) {
      out << fmt::format("{} {:.17g} {:.17g}\n", i + 1, table.p[i], (*table.q)[i]);
    } else {
      out << fmt::format("{} {:.17g}\n", i + 1, table.p[i]);
    }
  }
}

namespace {

std::function<double(std::int64_t)> lookup(std::shared_ptr<const std::vector<double>> column,
                                            const char* name) {
  return [column = std::move(column), name](std::int64_t n) {
    if (n < 1 || n > static_cast<std::int64_t>(column->size())) {
      throw Error(fmt::format("{}: index {} beyond tabulated range 1..{}", name, n,
                              column->size()));
    }
    return (*column)[static_cast<std::size_t>(n - 1)];
  };
}

}  // namespace

ProbSeq prob_seq_from_table(const EventTable& table) {
  return {lookup(std::make_shared<const std::vector<double>>(table.p), "p"), table.tends_to_zero,
          "tabulated p"};
}

std::optional<PairSeq> pair_seq_from_table(const EventTable& table) {
  if (!table.q) return std::nullopt;
  return PairSeq{lookup(std::make_shared<const std::vector<double>>(*table.q), "q"),
                 "tabulated q"};
}

TermSequence term_sequence_from_table(std::vector<double> terms) {
  return {lookup(std::make_shared<const std::vector<double>>(std::move(terms)), "term"),
          "tabulated terms"};
}

}  // namespace bclab
