#pragma once

#include <stdexcept>
#include <string>

namespace finsler {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parse-time errors carry the 1-based source position of the offending token.
struct SyntaxError : Error {
  int line, column;
  SyntaxError(const std::string& msg, int line, int column)
      : Error(msg + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        line(line), column(column) {}
};

struct UnknownSymbol : SyntaxError {
  using SyntaxError::SyntaxError;
};

// Evaluation hit sqrt(<=0), log(<=0), division by zero, or a non-finite value.
struct NonSmoothPoint : Error {
  using Error::Error;
};

// Fundamental tensor has an eigenvalue below the convexity threshold.
struct StrongConvexityViolation : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

// An integration left the declared chart box; results outside it are invalid.
struct LeftChart : Error {
  using Error::Error;
};

// Adaptive step control could not meet the tolerance within its step budget.
struct StepFailure : Error {
  using Error::Error;
};

// A transported fiber direction collapsed toward zero.
struct DegenerateDirection : Error {
  using Error::Error;
};

struct UnsupportedDimension : Error {
  using Error::Error;
};

struct BadWeights : Error {
  using Error::Error;
};

struct InsufficientSamples : Error {
  using Error::Error;
};

struct ConfigError : Error {
  int line;
  ConfigError(const std::string& msg, int line = 0)
      : Error(line > 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
        line(line) {}
};

}  // namespace finsler
