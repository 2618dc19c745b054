#ifndef TWCC_CLI_FIT_REPORT_HPP
#define TWCC_CLI_FIT_REPORT_HPP

#include <optional>
#include <string>

#include <json.hpp>

#include "twcc/estimation.hpp"

namespace twcc::cli {

using Report = nlohmann::ordered_json;

struct FitReportInputs {
  std::string input;
  const AngleSample* sample = nullptr;
  const FitResult* fit = nullptr;
  const FitConfig* config = nullptr;
  std::optional<BootstrapResult> bootstrap;
  std::optional<FisherInfo> fisher;
};

/// All report fields in their fixed order.
Report make_fit_report(const FitReportInputs& in);

/// Indented `key: value` text. Scalars that would read back as something
/// other than a string are quoted.
std::string render_text(const Report& r);
std::string render_json(const Report& r);

/// Parses either rendering. Throws ParseError.
Report parse_report(const std::string& text);

/// rho_hat and the centering offsets (if any) recorded in a report.
struct ReportModel {
  RhoParams rho;
  std::optional<Eigen::Vector3d> offsets;
};
ReportModel report_model(const Report& r);

}  // namespace twcc::cli

#endif  // TWCC_CLI_FIT_REPORT_HPP
