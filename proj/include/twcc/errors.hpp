#ifndef TWCC_ERRORS_HPP
#define TWCC_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace twcc {

enum class ErrorCode {
  InvalidArgument,
  NonFinite,
  ZeroParameter,
  SignCondition,
  NoValidPermutation,
  DegenerateBoundary,
  BranchInfeasible,
  NegativeRadicand,
  UnitConcentration,
  IllegalC1,
  NegativeFactor,
  DimensionTooLarge,
  DenominatorNonpositive,
  ModulusOutOfRange,
  QuadratureNotConverged,
  AllStartsFailed,
  DegenerateSample,
  ZeroResultant,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map them onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace twcc

#endif  // TWCC_ERRORS_HPP
