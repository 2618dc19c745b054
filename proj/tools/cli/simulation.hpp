#ifndef TWCC_CLI_SIMULATION_HPP
#define TWCC_CLI_SIMULATION_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "twcc/estimation.hpp"

namespace twcc::cli {

struct SimulationSpec {
  std::string scenario = "custom";
  Eigen::Vector3d truth = Eigen::Vector3d(1.0, -4.0, -0.25);
  std::vector<int> sizes{1000};
  int replicates = 200;
  /// Fit settings; `fit.bootstrap_b` is used only when `bootstrap` is set.
  FitConfig fit;
  bool bootstrap = false;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

/// Known scenarios: "table-s1" (1, -4, -0.25) at n = 100, 500, 1000 and
/// "fig-s1" (1, 0.25, 4) at n = 100, 500, 1000, 2000. Throws
/// InvalidArgument for other names.
SimulationSpec scenario_spec(const std::string& name);

struct ReplicateOutcome {
  bool ok = false;
  std::string error;
  Eigen::Vector3d estimate = Eigen::Vector3d::Zero();
  Permutation branch;
  std::optional<BootstrapResult> ci;
};

struct ParameterSummary {
  double truth = 0.0;
  double median = 0.0;
  double q025 = 0.0;
  double q975 = 0.0;
  double median_abs_error = 0.0;
  /// Fraction of replicates whose bootstrap interval holds the truth.
  std::optional<double> coverage;
};

struct SizeSummary {
  int n = 0;
  int replicates = 0;
  int failures = 0;
  std::array<ParameterSummary, 3> parameters{};
  std::vector<ReplicateOutcome> outcomes;
};

/// Replicate r at size n draws data from stream derive(derive({seed, 2}, n), r);
/// replicates run in parallel and are merged in replicate order.
std::vector<SizeSummary> run_simulation(const SimulationSpec& spec);

/// Comma-separated table, one row per (n, parameter).
std::string render_simulation_table(const SimulationSpec& spec,
                                    const std::vector<SizeSummary>& sizes);

}  // namespace twcc::cli

#endif  // TWCC_CLI_SIMULATION_HPP
