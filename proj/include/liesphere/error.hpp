#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace liesphere {

enum class ErrorKind {
  InvalidArgument,
  NotAContactLine,
  DegenerateLine,
  NotASphere,
  NotANormalField,
  NotAnImmersion,
  InvalidFrame,
  ProjectionSingular,
  OutOfDomain,
  UnsupportedProvenance,
  NumericalFailure,
  UndefinedCrossRatio,
  PathTruncated,
  TrackingLost,
  SelfIntersectingSpec,
  DegenerateTube,
  InvalidConstruction,
  NotEquivalent,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace liesphere
