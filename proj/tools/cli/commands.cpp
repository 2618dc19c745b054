#include "cli/commands.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli/angle_csv.hpp"
#include "cli/fit_report.hpp"
#include "cli/simulation.hpp"
#include "twcc/density.hpp"
#include "twcc/estimation.hpp"
#include "twcc/sampler.hpp"

namespace twcc::cli {
namespace {

// Failure carrying the exit status chosen by the command that raised it.
struct CommandError {
  int code;
  std::string message;
};

bool is_parameter_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::NonFinite:
    case ErrorCode::ZeroParameter:
    case ErrorCode::SignCondition:
    case ErrorCode::NoValidPermutation:
    case ErrorCode::DegenerateBoundary:
    case ErrorCode::IllegalC1:
    case ErrorCode::NegativeFactor:
    case ErrorCode::InvalidArgument:
      return true;
    default:
      return false;
  }
}

RhoParams parameters_from(const std::vector<double>& rho) {
  try {
    return validate_rho(rho.at(0), rho.at(1), rho.at(2));
  } catch (const Error& e) {
    throw CommandError{kExitParameters, std::string("invalid parameters: ") + e.what()};
  }
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    out.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw CommandError{kExitParse, "cannot write '" + path + "'"};
  f << text;
}

CsvReadResult load(const std::string& path, bool degrees, std::ostream& err) {
  CsvReadResult r = read_angle_csv_file(path, degrees);
  if (r.reduced > 0) {
    err << "warning: " << r.reduced << " value(s) outside [0, 2pi) were reduced modulo 2pi\n";
  }
  return r;
}

struct FitArgs {
  std::string input = "-";
  std::string out;
  bool center = false;
  bool degrees = false;
  bool json = false;
  bool fisher = false;
  bool resample_rows = false;
  int starts = 50;
  int bootstrap = 0;
  int bootstrap_starts = 4;
  double rho_ik_bound = 1e3;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

void cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
  AngleSample s = load(a.input, a.degrees, err).sample;
  FitConfig cfg;
  cfg.n_starts = a.starts;
  cfg.rho_ik_bound = a.rho_ik_bound;
  cfg.bootstrap_b = a.bootstrap;
  cfg.bootstrap_starts = a.bootstrap_starts;
  cfg.bootstrap_resample_rows = a.resample_rows;
  cfg.seed = a.seed;
  cfg.threads = a.threads;
  try {
    validate_config(cfg);
  } catch (const Error& e) {
    throw CommandError{kExitParameters, e.what()};
  }
  FitReportInputs in;
  in.input = a.input;
  try {
    if (a.center) s = circular_center(s);
    const FitResult fit = fit_mle(s, cfg);
    in.sample = &s;
    in.fit = &fit;
    in.config = &cfg;
    if (a.bootstrap > 0) in.bootstrap = bootstrap_ci(s, fit, cfg);
    if (a.fisher) in.fisher = fisher_information(fit.rho_hat);
    const Report r = make_fit_report(in);
    emit(a.json ? render_json(r) : render_text(r), a.out, out);
  } catch (const Error& e) {
    throw CommandError{kExitFit, std::string("fit failed: ") + e.what()};
  }
}

struct SampleArgs {
  std::vector<double> rho;
  long long n = 0;
  std::uint64_t seed = 0;
  std::string out;
  bool degrees = false;
};

void cmd_sample(const SampleArgs& a, std::ostream& out) {
  const RhoParams p = parameters_from(a.rho);
  if (a.n < 0) throw CommandError{kExitParameters, "--n must be >= 0"};
  const AngleSample s = sample_twcc(static_cast<std::size_t>(a.n), p, RngState{a.seed, 0});
  std::ostringstream text;
  write_angle_csv(text, s.rows(), a.degrees);
  emit(text.str(), a.out, out);
}

struct GridArgs {
  std::vector<double> rho;
  std::vector<double> fix;
  int resolution = 100;
  std::string out;
  bool degrees = false;
  std::string data;
  double window = 0.1;
  std::string points_out;
};

void cmd_grid(const GridArgs& a, std::ostream& out, std::ostream& err) {
  const RhoParams p = parameters_from(a.rho);
  const double kd = a.fix.at(0);
  if (kd != 1.0 && kd != 2.0 && kd != 3.0) {
    throw CommandError{kExitParameters, "--fix index must be 1, 2 or 3"};
  }
  if (a.resolution < 1) throw CommandError{kExitParameters, "--resolution must be >= 1"};
  const int k = static_cast<int>(kd) - 1;
  const double scale = a.degrees ? pi / 180.0 : 1.0;
  const double value = a.fix.at(1) * scale;
  const int i = k == 0 ? 1 : 0;
  const int j = k == 2 ? 1 : 2;
  const std::string ni = "u" + std::to_string(i + 1), nj = "u" + std::to_string(j + 1);

  std::ostringstream text;
  text << ni << ',' << nj << ",density\n";
  const double h = two_pi / a.resolution;
  for (int x = 0; x < a.resolution; ++x) {
    for (int y = 0; y < a.resolution; ++y) {
      double u[3];
      u[i] = h * x;
      u[j] = h * y;
      u[k] = value;
      const double d = conditional_pair_given_one(AnglePoint3(u[0], u[1], u[2]), p);
      text << format_double(u[i] / scale) << ',' << format_double(u[j] / scale) << ','
           << format_double(d) << '\n';
    }
  }
  emit(text.str(), a.out, out);

  if (!a.data.empty()) {
    if (a.points_out.empty()) throw CommandError{kExitParse, "--data needs --points-out"};
    const AngleSample s = load(a.data, a.degrees, err).sample;
    const double w = a.window * scale;
    std::ostringstream pts;
    pts << ni << ',' << nj << '\n';
    for (Eigen::Index r = 0; r < s.size(); ++r) {
      if (std::abs(circular_difference(s.rows()(r, k), value)) <= w) {
        pts << format_double(s.rows()(r, i) / scale) << ','
            << format_double(s.rows()(r, j) / scale) << '\n';
      }
    }
    emit(pts.str(), a.points_out, out);
  }
}

struct SimulateArgs {
  std::string scenario;
  int replicates = 200;
  std::uint64_t seed = 0;
  std::string out;
  std::vector<int> sizes;
  std::vector<double> rho;
  int starts = 50;
  int bootstrap = 0;
  int bootstrap_starts = 4;
  unsigned threads = 0;
};

void cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  try {
    SimulationSpec spec = scenario_spec(a.scenario);
    if (a.scenario == "custom" && a.rho.empty()) {
      throw CommandError{kExitParameters, "scenario custom needs --rho"};
    }
    if (!a.rho.empty()) spec.truth = parameters_from(a.rho).values();
    if (!a.sizes.empty()) spec.sizes = a.sizes;
    spec.replicates = a.replicates;
    spec.seed = a.seed;
    spec.threads = a.threads;
    spec.fit.n_starts = a.starts;
    spec.fit.bootstrap_starts = a.bootstrap_starts;
    spec.bootstrap = a.bootstrap > 0;
    if (spec.bootstrap) spec.fit.bootstrap_b = a.bootstrap;
    const auto sizes = run_simulation(spec);
    emit(render_simulation_table(spec, sizes), a.out, out);
  } catch (const Error& e) {
    throw CommandError{kExitParameters, e.what()};
  }
}

struct EvalArgs {
  std::vector<double> rho;
  std::string report;
  std::vector<double> point;
  std::string input;
  std::optional<double> c1;
  bool degrees = false;
  bool json = false;
  std::string out;
};

void cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  if (a.rho.empty() == a.report.empty()) {
    throw CommandError{kExitParse, "give exactly one of --rho and --report"};
  }
  if (a.point.empty() == a.input.empty()) {
    throw CommandError{kExitParse, "give exactly one of --point and --input"};
  }
  ReportModel model{RhoParams{}, std::nullopt};
  if (!a.report.empty()) {
    std::ifstream f(a.report);
    if (!f) throw ParseError("cannot open '" + a.report + "'");
    std::stringstream buf;
    buf << f.rdbuf();
    try {
      model = report_model(parse_report(buf.str()));
    } catch (const Error& e) {
      throw CommandError{kExitParameters, std::string("invalid parameters: ") + e.what()};
    }
  } else {
    model.rho = parameters_from(a.rho);
  }
  Report r;
  if (!a.point.empty()) {
    const double scale = a.degrees ? pi / 180.0 : 1.0;
    const AnglePoint3 u(scale * a.point[0], scale * a.point[1], scale * a.point[2]);
    if (a.c1) {
      try {
        r["density"] = generalized_pdf(u, make_generalized(model.rho, *a.c1));
      } catch (const Error& e) {
        throw CommandError{kExitParameters, std::string("invalid parameters: ") + e.what()};
      }
    } else {
      r["density"] = twcc_pdf(u, model.rho);
    }
  } else {
    AngleSample s = load(a.input, a.degrees, err).sample;
    if (model.offsets) {
      AngleMatrix rows = s.rows();
      for (int c = 0; c < 3; ++c) rows.col(c).array() -= (*model.offsets)[c];
      s = AngleSample(std::move(rows));
    }
    r["n"] = s.size();
    r["loglik"] = s.size() > 0 ? log_likelihood(s, model.rho) : 0.0;
  }
  emit(a.json ? render_json(r) : render_text(r), a.out, out);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Trivariate wrapped Cauchy copula: fit, sample and evaluate angle data"};
  app.require_subcommand(1);

  FitArgs fit;
  CLI::App* f = app.add_subcommand("fit", "Maximum likelihood fit of an angle CSV");
  f->add_option("input", fit.input, "Angle CSV (u1,u2,u3 or phi,psi,omega); '-' for stdin");
  f->add_flag("--center", fit.center, "Subtract each column's circular mean first");
  f->add_flag("--degrees", fit.degrees, "Input angles are in degrees");
  f->add_option("--starts", fit.starts, "Random starts per branch");
  f->add_option("--bootstrap", fit.bootstrap, "Parametric bootstrap replicates (0 = none)");
  f->add_option("--bootstrap-starts", fit.bootstrap_starts, "Random starts per branch in refits");
  f->add_flag("--resample-rows", fit.resample_rows, "Bootstrap by resampling rows");
  f->add_option("--rho-ik-bound", fit.rho_ik_bound, "Box limit for |rho_ik|");
  f->add_option("--seed", fit.seed, "Master seed");
  f->add_option("--threads", fit.threads, "Worker threads (0 = all cores)");
  f->add_flag("--fisher", fit.fisher, "Include the expected information at the estimate");
  f->add_flag("--json", fit.json, "Emit JSON instead of text");
  f->add_option("--out", fit.out, "Report path (default stdout)");

  SampleArgs sample;
  CLI::App* s = app.add_subcommand("sample", "Draw angles from TWCC(rho)");
  s->add_option("--rho", sample.rho, "rho12 rho13 rho23")->expected(3)->required();
  s->add_option("--n", sample.n, "Number of rows")->required();
  s->add_option("--seed", sample.seed, "Seed");
  s->add_flag("--degrees", sample.degrees, "Write degrees");
  s->add_option("--out", sample.out, "CSV path (default stdout)");

  GridArgs grid;
  CLI::App* g = app.add_subcommand("grid", "Conditional density of two angles given the third");
  g->add_option("--rho", grid.rho, "rho12 rho13 rho23")->expected(3)->required();
  g->add_option("--fix", grid.fix, "Index (1-3) and value of the fixed angle")
      ->expected(2)
      ->required();
  g->add_option("--resolution", grid.resolution, "Grid points per axis");
  g->add_flag("--degrees", grid.degrees, "Angles in degrees");
  g->add_option("--out", grid.out, "Grid CSV path (default stdout)");
  g->add_option("--data", grid.data, "Angle CSV whose nearby points are exported");
  g->add_option("--window", grid.window, "Half-width around the fixed value for --data");
  g->add_option("--points-out", grid.points_out, "CSV path for the nearby data points");

  SimulateArgs sim;
  CLI::App* m = app.add_subcommand("simulate", "Repeated sample-and-fit study");
  m->add_option("--scenario", sim.scenario, "table-s1, fig-s1 or custom")
      ->required()
      ->check(CLI::IsMember({"table-s1", "fig-s1", "custom"}));
  m->add_option("--replicates", sim.replicates, "Replicates per sample size");
  m->add_option("--seed", sim.seed, "Master seed");
  m->add_option("--sizes", sim.sizes, "Sample sizes (overrides the scenario)");
  m->add_option("--rho", sim.rho, "True rho for custom")->expected(3);
  m->add_option("--starts", sim.starts, "Random starts per branch");
  m->add_option("--bootstrap", sim.bootstrap, "Bootstrap replicates per fit (0 = none)");
  m->add_option("--bootstrap-starts", sim.bootstrap_starts, "Random starts per branch in refits");
  m->add_option("--threads", sim.threads, "Worker threads (0 = all cores)");
  m->add_option("--out", sim.out, "Table path (default stdout)");

  EvalArgs ev;
  CLI::App* e = app.add_subcommand("eval", "Density at a point or log-likelihood of a CSV");
  e->add_option("--rho", ev.rho, "rho12 rho13 rho23")->expected(3);
  e->add_option("--report", ev.report, "Take rho (and centering) from a fit report");
  e->add_option("--point", ev.point, "u1 u2 u3")->expected(3);
  e->add_option("--input", ev.input, "Angle CSV; prints the log-likelihood");
  e->add_option("--c1", ev.c1, "Free offset C1 of the generalized density");
  e->add_flag("--degrees", ev.degrees, "Angles in degrees");
  e->add_flag("--json", ev.json, "Emit JSON instead of text");
  e->add_option("--out", ev.out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kExitOk : kExitParse;
  }

  try {
    if (*f) cmd_fit(fit, out, err);
    if (*s) cmd_sample(sample, out);
    if (*g) cmd_grid(grid, out, err);
    if (*m) cmd_simulate(sim, out);
    if (*e) cmd_eval(ev, out, err);
  } catch (const CommandError& ex) {
    err << "error: " << ex.message << '\n';
    return ex.code;
  } catch (const ParseError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitParse;
  } catch (const Error& ex) {
    err << "error: " << ex.what() << '\n';
    return is_parameter_error(ex.code()) ? kExitParameters : kExitFit;
  }
  return kExitOk;
}

}  // namespace twcc::cli
