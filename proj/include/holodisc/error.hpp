#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace holodisc {

enum class ErrorCode {
  SingularStructure,
  NotAlmostComplex,
  NormTooLarge,
  SingularTransform,
  GradientUnavailable,
  SingularityTooClose,
  GridTooCoarse,
  OutsideDisc,
  NoContraction,
  MaxIterExceeded,
  DirectionLost,
  BadCutoff,
  BoundaryMismatch,
  NotInWedge,
  InversionFailed,
  DirectionNotInterior,
  DiscExitsWedge,
  PairOutsideDisc,
  ApproachTangential,
  NotTangent,
  TransversalMiss,
  NoConvergentSubsequence,
  InvalidArgument,
  ConfigError,
  InputParseError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

/// Parse failure with a 1-based source position.
class ParseError : public Error {
public:
  ParseError(const std::string& what, int line, int column)
      : Error(ErrorCode::InputParseError,
              "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line), column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

private:
  int line_;
  int column_;
};

} // namespace holodisc
