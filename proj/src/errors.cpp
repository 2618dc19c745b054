#include "twcc/errors.hpp"

namespace twcc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ZeroParameter: return "ZeroParameter";
    case ErrorCode::SignCondition: return "SignCondition";
    case ErrorCode::NoValidPermutation: return "NoValidPermutation";
    case ErrorCode::DegenerateBoundary: return "DegenerateBoundary";
    case ErrorCode::BranchInfeasible: return "BranchInfeasible";
    case ErrorCode::NegativeRadicand: return "NegativeRadicand";
    case ErrorCode::UnitConcentration: return "UnitConcentration";
    case ErrorCode::IllegalC1: return "IllegalC1";
    case ErrorCode::NegativeFactor: return "NegativeFactor";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::DenominatorNonpositive: return "DenominatorNonpositive";
    case ErrorCode::ModulusOutOfRange: return "ModulusOutOfRange";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::AllStartsFailed: return "AllStartsFailed";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::ZeroResultant: return "ZeroResultant";
  }
  return "Unknown";
}

}  // namespace twcc
