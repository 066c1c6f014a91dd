#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "bclab/bc_lemmas.hpp"
#include "bclab/series_engine.hpp"

namespace bclab {

/// Rows (n, p[, q]) with n = 1, 2, ... in order.
struct EventTable {
  std::vector<double> p;
  std::optional<std::vector<double>> q;
  // Set by the `#! tends_to_zero: certified` directive: the producer vouches
  // that p(n) -> 0, so no numeric check is run.
  ZeroLimit tends_to_zero = ZeroLimit::check;

  std::int64_t rows() const noexcept { return static_cast<std::int64_t>(p.size()); }
};

/// Whitespace- or comma-separated columns; `#` starts a comment; the first
/// non-comment line may be a header. A comment of the form `#! key: value`
/// is a directive; only `tends_to_zero: certified` is recognised. Throws
/// ParseError with the line number.
EventTable read_event_table(std::istream& in);

/// Two columns (n, a_n) in the same format.
std::vector<double> read_term_table(std::istream& in);

/// Full-precision (n, p, q) rows with a header and any directive.
void write_event_table(std::ostream& out, const EventTable& table);

ProbSeq prob_seq_from_table(const EventTable& table);
std::optional<PairSeq> pair_seq_from_table(const EventTable& table);
TermSequence term_sequence_from_table(std::vector<double> terms);

}  // namespace bclab
