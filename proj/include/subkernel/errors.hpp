#pragma once

#include <stdexcept>
#include <string>

namespace subkernel {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuadratureFailure : Error {
  using Error::Error;
};
struct BracketError : Error {
  using Error::Error;
};
struct DegenerateFunction : Error {
  using Error::Error;
};
struct TailToleranceNotMet : Error {
  int k_used;
  double achieved;
  TailToleranceNotMet(int k, double tail)
      : Error("tail tolerance not met: K=" + std::to_string(k) +
              " leaves tail mass " + std::to_string(tail)),
        k_used(k), achieved(tail) {}
};
struct DensityUnavailable : Error {
  using Error::Error;
};
struct NotALevyMeasure : Error {
  using Error::Error;
};
struct InvalidBernstein : Error {
  using Error::Error;
};

struct SizeOverflow : Error {
  using Error::Error;
};
struct ParseError : Error {
  int line;
  ParseError(int line_no, const std::string& what)
      : Error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
};

struct IsolatedVertex : Error {
  using Error::Error;
};
struct MemoryBudgetExceeded : Error {
  using Error::Error;
};
struct BoundaryContamination : Error {
  using Error::Error;
};
struct InsufficientBaseDepth : Error {
  using Error::Error;
};
struct NotConvergent : Error {
  using Error::Error;
};
struct CutoffShapeError : Error {
  using Error::Error;
};
struct DegenerateCylinder : Error {
  using Error::Error;
};
struct EmptyDomain : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace subkernel
