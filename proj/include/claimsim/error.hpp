#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace claimsim {

enum class ErrorKind {
  ParameterDomain,
  Supercritical,
  UnsupportedParameterization,
  NoSolution,
  RunawayCluster,
  Range,
  Ordering,
  OracleUnsound,
  MomentDoesNotExist,
  ContractionFailure,
  UnsupportedRegime,
  UnsupportedComparison,
  Precondition,
  Config,
  Io,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a machine-readable kind so the
// CLI can emit structured error reports.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace claimsim
