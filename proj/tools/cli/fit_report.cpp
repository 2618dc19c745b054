#include "cli/fit_report.hpp"

#include <sstream>
#include <vector>

#include "cli/angle_csv.hpp"
#include "twcc/analytics.hpp"

namespace twcc::cli {
namespace {

constexpr const char* kFormat = "twcc-fit-report";
constexpr int kVersion = 1;
const char* const kSlotNames[3] = {"rho12", "rho13", "rho23"};
const char* const kPairNames[3] = {"12", "13", "23"};

// An interval (a, b) with a < 0 < b is shown as (a, b) minus {0}, since rho = 0 is excluded.
std::string interval_text(double lo, double hi) {
  std::string s = "(" + format_double(lo) + ", " + format_double(hi) + ")";
  if (lo < 0.0 && hi > 0.0) s += "\\{0}";
  return s;
}

std::string scalar_text(const Report& v) {
  if (v.is_string()) {
    const std::string& s = v.get_ref<const std::string&>();
    const bool plain = !s.empty() && !Report::accept(s) && s.front() != ' ' &&
                       s.back() != ' ' && s.find('\n') == std::string::npos;
    return plain ? s : v.dump();
  }
  return v.dump();
}

void render(const Report& obj, int depth, std::ostringstream& out) {
  for (const auto& [key, value] : obj.items()) {
    out << std::string(2 * depth, ' ') << key << ':';
    if (value.is_object() && !value.empty()) {
      out << '\n';
      render(value, depth + 1, out);
    } else {
      out << ' ' << scalar_text(value) << '\n';
    }
  }
}

}  // namespace

Report make_fit_report(const FitReportInputs& in) {
  const AngleSample& s = *in.sample;
  const FitResult& fit = *in.fit;
  const FitConfig& cfg = *in.config;
  Report r;
  r["format"] = kFormat;
  r["version"] = kVersion;
  r["input"] = in.input;
  r["n"] = s.size();
  r["centered"] = s.centered();
  if (s.centered()) {
    const Eigen::Vector3d& off = *s.offsets();
    r["centering_offsets"] = {{"u1", off[0]}, {"u2", off[1]}, {"u3", off[2]}};
  } else {
    r["centering_offsets"] = nullptr;
  }
  const Eigen::Vector3d& rho = fit.rho_hat.values();
  for (int a = 0; a < 3; ++a) r["rho_hat"][kSlotNames[a]] = rho[a];
  r["branch"] = fit.branch.to_string();
  r["zeta"] = fit.zeta;
  r["rho_ik"] = fit.rho_ik;
  r["loglik"] = fit.loglik;
  r["grad_norm"] = fit.grad_norm;
  r["starts"] = {{"converged", fit.starts_converged}, {"total", fit.starts_total}};
  for (int b = 0; b < 3; ++b) {
    const double v = fit.branch_loglik[b];
    r["branch_loglik"][kFitBranches[b].to_string()] =
        std::isfinite(v) ? Report(v) : Report(nullptr);
  }
  const std::pair<int, int> pairs[3] = {{0, 1}, {0, 2}, {1, 2}};
  const auto empirical = empirical_trig_moments(s, {pairs[0], pairs[1], pairs[2]});
  for (int k = 0; k < 3; ++k) {
    const auto [a, b] = pairs[k];
    const PairwisePhi f = pairwise_phi(fit.rho_hat, a, b);
    const CorrCoefficients c = corr_coefficients(fit.rho_hat, a, b);
    Report& e = r["pairwise"][kPairNames[k]];
    e["phi"] = f.phi;
    e["phi_tilde"] = f.varphi;
    e["empirical_moment_re"] = empirical[k].real();
    e["empirical_moment_im"] = empirical[k].imag();
    e["johnson_wehrly"] = c.johnson_wehrly;
    e["jupp_mardia"] = c.jupp_mardia;
    e["fisher_lee"] = c.fisher_lee;
  }
  const ModePair m = modes(fit.rho_hat);
  r["modes"] = {{"mode", m.mode.relation()}, {"antimode", m.antimode.relation()}};
  if (in.bootstrap) {
    const BootstrapResult& b = *in.bootstrap;
    Report& j = r["bootstrap"];
    j["replicates"] = b.replicates;
    j["failures"] = b.failures;
    j["level"] = 0.95;
    for (int a = 0; a < 3; ++a) {
      const ParameterInterval& iv = b.intervals[a];
      j[kSlotNames[a]] = {{"median", iv.median},
                          {"lo", iv.lo},
                          {"hi", iv.hi},
                          {"interval", interval_text(iv.lo, iv.hi)}};
    }
  }
  if (in.fisher) {
    Report rows = Report::array();
    for (int a = 0; a < 3; ++a) {
      rows.push_back({in.fisher->matrix(a, 0), in.fisher->matrix(a, 1), in.fisher->matrix(a, 2)});
    }
    r["fisher_per_observation"] = rows;
  }
  r["config"] = {{"starts", cfg.n_starts},
                 {"rho_ik_bound", cfg.rho_ik_bound},
                 {"zeta_margin", cfg.zeta_margin},
                 {"grad_tol", cfg.grad_tol},
                 {"step_tol", cfg.step_tol},
                 {"max_iter", cfg.max_iter},
                 {"bootstrap", in.bootstrap ? cfg.bootstrap_b : 0},
                 {"bootstrap_starts", cfg.bootstrap_starts},
                 {"bootstrap_resample_rows", cfg.bootstrap_resample_rows}};
  r["seed"] = cfg.seed;
  return r;
}

std::string render_text(const Report& r) {
  std::ostringstream out;
  render(r, 0, out);
  return out.str();
}

std::string render_json(const Report& r) { return r.dump(2) + "\n"; }

Report parse_report(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw ParseError("empty report");
  if (text[first] == '{') {
    try {
      return Report::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("report is not valid JSON: ") + e.what());
    }
  }

  Report root = Report::object();
  // stack[d] is the object receiving keys at indentation depth d.
  std::vector<Report*> stack{&root};
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(' ') == std::string::npos) continue;
    const std::size_t spaces = line.find_first_not_of(' ');
    const std::string where = "report line " + std::to_string(line_no);
    if (spaces % 2 != 0 || spaces / 2 >= stack.size()) {
      throw ParseError(where + ": unexpected indentation");
    }
    stack.resize(spaces / 2 + 1);
    const std::size_t colon = line.find(':', spaces);
    if (colon == std::string::npos) throw ParseError(where + ": expected 'key: value'");
    const std::string key = line.substr(spaces, colon - spaces);
    const std::string rest = line.substr(colon + 1);
    Report& parent = *stack.back();
    if (rest.empty()) {
      parent[key] = Report::object();
      stack.push_back(&parent[key]);
      continue;
    }
    if (rest.front() != ' ') throw ParseError(where + ": expected a space after ':'");
    const std::string value = rest.substr(1);
    parent[key] = Report::accept(value) ? Report::parse(value) : Report(value);
  }
  return root;
}

ReportModel report_model(const Report& r) {
  try {
    if (r.value("format", "") != kFormat) throw ParseError("not a twcc fit report");
    const Report& rho = r.at("rho_hat");
    ReportModel m{validate_rho(rho.at("rho12").get<double>(), rho.at("rho13").get<double>(),
                               rho.at("rho23").get<double>()),
                  std::nullopt};
    const Report& off = r.at("centering_offsets");
    if (!off.is_null()) {
      m.offsets = Eigen::Vector3d(off.at("u1").get<double>(), off.at("u2").get<double>(),
                                  off.at("u3").get<double>());
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("incomplete report: ") + e.what());
  }
}

}  // namespace twcc::cli
