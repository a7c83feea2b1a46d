#include "claimsim/error.hpp"

namespace claimsim {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParameterDomain: return "parameter-domain";
    case ErrorKind::Supercritical: return "supercritical";
    case ErrorKind::UnsupportedParameterization: return "unsupported-parameterization";
    case ErrorKind::NoSolution: return "no-solution";
    case ErrorKind::RunawayCluster: return "runaway-cluster";
    case ErrorKind::Range: return "range";
    case ErrorKind::Ordering: return "ordering";
    case ErrorKind::OracleUnsound: return "oracle-unsound";
    case ErrorKind::MomentDoesNotExist: return "moment-does-not-exist";
    case ErrorKind::ContractionFailure: return "contraction-failure";
    case ErrorKind::UnsupportedRegime: return "unsupported-regime";
    case ErrorKind::UnsupportedComparison: return "unsupported-comparison";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace claimsim
