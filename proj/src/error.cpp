#include "psopid/error.hpp"

namespace psopid {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::Configuration: return "configuration";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::RiseUndefined: return "rise-time-undefined";
    case ErrorKind::NotSettled: return "not-settled";
    case ErrorKind::Fit: return "fit";
    case ErrorKind::UnboundedGain: return "unbounded-gain";
    case ErrorKind::NoUltimateGain: return "no-ultimate-gain";
    case ErrorKind::Objective: return "objective";
    case ErrorKind::Numerical: return "numerical";
    case ErrorKind::IdentificationDiverged: return "identification-diverged";
  }
  return "unknown";
}

}  // namespace psopid
