#include "cli/simulation.hpp"

#include <cmath>
#include <sstream>

#include "cli/angle_csv.hpp"
#include "twcc/sampler.hpp"

namespace twcc::cli {
namespace {

constexpr std::uint64_t kSimulationStream = 2;
const char* const kSlotNames[3] = {"rho12", "rho13", "rho23"};

}  // namespace

SimulationSpec scenario_spec(const std::string& name) {
  SimulationSpec spec;
  spec.scenario = name;
  if (name == "table-s1") {
    spec.truth = Eigen::Vector3d(1.0, -4.0, -0.25);
    spec.sizes = {100, 500, 1000};
  } else if (name == "fig-s1") {
    spec.truth = Eigen::Vector3d(1.0, 0.25, 4.0);
    spec.sizes = {100, 500, 1000, 2000};
  } else if (name != "custom") {
    throw Error(ErrorCode::InvalidArgument, "unknown scenario '" + name + "'");
  }
  return spec;
}

std::vector<SizeSummary> run_simulation(const SimulationSpec& spec) {
  const RhoParams truth = normalize_rho(validate_rho(spec.truth));
  validate_config(spec.fit);
  if (spec.replicates < 1) {
    throw Error(ErrorCode::InvalidArgument, "need at least one replicate");
  }
  const RngState root{spec.seed, kSimulationStream};
  std::vector<SizeSummary> out;
  for (int n : spec.sizes) {
    if (n < 4) throw Error(ErrorCode::InvalidArgument, "sample sizes must be >= 4");
    SizeSummary size;
    size.n = n;
    size.replicates = spec.replicates;
    size.outcomes.resize(static_cast<std::size_t>(spec.replicates));
    const RngState size_root = derive_stream(root, static_cast<std::uint64_t>(n));
    parallel_for(
        size.outcomes.size(),
        [&](std::size_t r) {
          ReplicateOutcome& o = size.outcomes[r];
          const RngState rep = derive_stream(size_root, r);
          FitConfig cfg = spec.fit;
          cfg.seed = derive_stream(rep, 1).stream;
          cfg.threads = 1;
          try {
            const AngleSample s =
                sample_twcc(static_cast<std::size_t>(n), truth, derive_stream(rep, 0));
            const FitResult fit = fit_mle(s, cfg);
            o.estimate = fit.rho_hat.values();
            o.branch = fit.branch;
            if (spec.bootstrap) o.ci = bootstrap_ci(s, fit, cfg);
            o.ok = true;
          } catch (const Error& e) {
            o.error = e.what();
          }
        },
        spec.threads);

    for (int a = 0; a < 3; ++a) {
      std::vector<double> est, err;
      int covered = 0;
      for (const ReplicateOutcome& o : size.outcomes) {
        if (!o.ok) continue;
        est.push_back(o.estimate[a]);
        err.push_back(std::abs(o.estimate[a] - truth.values()[a]));
        if (o.ci) {
          covered += o.ci->intervals[a].lo <= truth.values()[a] &&
                     truth.values()[a] <= o.ci->intervals[a].hi;
        }
      }
      ParameterSummary& p = size.parameters[a];
      p.truth = truth.values()[a];
      if (!est.empty()) {
        p.median = quantile(est, 0.5);
        p.q025 = quantile(est, 0.025);
        p.q975 = quantile(est, 0.975);
        p.median_abs_error = quantile(err, 0.5);
        if (spec.bootstrap) p.coverage = static_cast<double>(covered) / est.size();
      } else {
        p.median = p.q025 = p.q975 = p.median_abs_error = NAN;
      }
    }
    for (const ReplicateOutcome& o : size.outcomes) size.failures += !o.ok;
    out.push_back(std::move(size));
  }
  return out;
}

std::string render_simulation_table(const SimulationSpec& spec,
                                    const std::vector<SizeSummary>& sizes) {
  std::ostringstream out;
  out << "scenario,n,parameter,truth,replicates,failures,median,q025,q975,"
         "median_abs_error,coverage\n";
  for (const SizeSummary& s : sizes) {
    for (int a = 0; a < 3; ++a) {
      const ParameterSummary& p = s.parameters[a];
      out << spec.scenario << ',' << s.n << ',' << kSlotNames[a] << ','
          << format_double(p.truth) << ',' << s.replicates << ',' << s.failures << ','
          << format_double(p.median) << ',' << format_double(p.q025) << ','
          << format_double(p.q975) << ',' << format_double(p.median_abs_error) << ','
          << (p.coverage ? format_double(*p.coverage) : "") << '\n';
    }
  }
  return out.str();
}

}  // namespace twcc::cli
