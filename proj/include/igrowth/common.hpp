#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace igrowth {

// All counts and series coefficients are exact arbitrary-precision integers.
using BigInt = mpz_class;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error {
  ParseError(const std::string& msg, int line, int col)
      : Error(msg + " (line " + std::to_string(line) + ", col " + std::to_string(col) + ")"),
        line(line),
        col(col) {}
  int line;
  int col;
};

enum class SolveErrorKind {
  no_stabilization,   // memo table still changing after max_rounds passes
  depth_exhausted,    // series changed between depth caps M and M+1
  parikh_unsound,     // parikh_tuple keys requested but the equivalence check fails
};

struct SolveError : Error {
  SolveError(SolveErrorKind kind, const std::string& msg) : Error(msg), kind(kind) {}
  SolveErrorKind kind;
};

}  // namespace igrowth
