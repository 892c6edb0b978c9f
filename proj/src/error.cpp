#include "holodisc/error.hpp"

namespace holodisc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::SingularStructure: return "SingularStructure";
  case ErrorCode::NotAlmostComplex: return "NotAlmostComplex";
  case ErrorCode::NormTooLarge: return "NormTooLarge";
  case ErrorCode::SingularTransform: return "SingularTransform";
  case ErrorCode::GradientUnavailable: return "GradientUnavailable";
  case ErrorCode::SingularityTooClose: return "SingularityTooClose";
  case ErrorCode::GridTooCoarse: return "GridTooCoarse";
  case ErrorCode::OutsideDisc: return "OutsideDisc";
  case ErrorCode::NoContraction: return "NoContraction";
  case ErrorCode::MaxIterExceeded: return "MaxIterExceeded";
  case ErrorCode::DirectionLost: return "DirectionLost";
  case ErrorCode::BadCutoff: return "BadCutoff";
  case ErrorCode::BoundaryMismatch: return "BoundaryMismatch";
  case ErrorCode::NotInWedge: return "NotInWedge";
  case ErrorCode::InversionFailed: return "InversionFailed";
  case ErrorCode::DirectionNotInterior: return "DirectionNotInterior";
  case ErrorCode::DiscExitsWedge: return "DiscExitsWedge";
  case ErrorCode::PairOutsideDisc: return "PairOutsideDisc";
  case ErrorCode::ApproachTangential: return "ApproachTangential";
  case ErrorCode::NotTangent: return "NotTangent";
  case ErrorCode::TransversalMiss: return "TransversalMiss";
  case ErrorCode::NoConvergentSubsequence: return "NoConvergentSubsequence";
  case ErrorCode::InvalidArgument: return "InvalidArgument";
  case ErrorCode::ConfigError: return "ConfigError";
  case ErrorCode::InputParseError: return "InputParseError";
  }
  return "Unknown";
}

} // namespace holodisc
