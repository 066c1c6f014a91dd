#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bclab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// An error tied to a specific sequence index.
class IndexedError : public Error {
 public:
  IndexedError(const std::string& what, std::int64_t index)
      : Error(what + " at n=" + std::to_string(index)), index_(index) {}

  std::int64_t index() const noexcept { return index_; }

 private:
  std::int64_t index_;
};

class NegativeTerm : public IndexedError {
 public:
  explicit NegativeTerm(std::int64_t n) : IndexedError("negative term", n) {}
};

class NonFiniteTerm : public IndexedError {
 public:
  explicit NonFiniteTerm(std::int64_t n) : IndexedError("non-finite term", n) {}
};

class OutOfRangeProbability : public IndexedError {
 public:
  explicit OutOfRangeProbability(std::int64_t n)
      : IndexedError("probability outside [0, 1]", n) {}
};

class FrechetViolation : public IndexedError {
 public:
  explicit FrechetViolation(std::int64_t n)
      : IndexedError("pair probability violates Frechet-Hoeffding bounds", n) {}
};

class InsufficientRange : public Error {
 public:
  explicit InsufficientRange(std::int64_t n_max)
      : Error("scan range too short (n_max=" + std::to_string(n_max) +
              ", need >= 100)") {}
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class EmptyEpsilonGrid : public Error {
 public:
  EmptyEpsilonGrid() : Error("epsilon grid is empty") {}
};

class MonotonicityNotAsserted : public Error {
 public:
  MonotonicityNotAsserted()
      : Error("decreasing event family was not asserted by the caller") {}
};

/// Malformed tabulated input; `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace bclab
