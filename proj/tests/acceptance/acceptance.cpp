// Acceptance checks for the library and CLI. Prints one PASS/FAIL line per
// criterion; exits nonzero if any criterion fails.
//
// usage: acceptance <path to twcc binary> [criterion numbers...]

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <Eigen/Eigenvalues>

#include "cli/simulation.hpp"
#include "oracles.hpp"
#include "twcc/analytics.hpp"
#include "twcc/density.hpp"
#include "twcc/estimation.hpp"
#include "twcc/sampler.hpp"

using namespace twcc;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string twcc_binary;

std::vector<AnglePoint3> random_points(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ang(0.0, two_pi);
  std::vector<AnglePoint3> pts;
  for (int i = 0; i < n; ++i) pts.emplace_back(ang(rng), ang(rng), ang(rng));
  return pts;
}

std::vector<Eigen::Vector3d> random_family(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Eigen::Vector3d> out;
  for (int t = 0; t < count; ++t) out.push_back(oracle::random_rho(rng));
  return out;
}

double pdf_at(const RhoParams& p, const double* u) {
  return twcc_pdf(AnglePoint3(u[0], u[1], u[2]), p);
}

// ---------------------------------------------------------------------------

void normalization(Verdict& v) {
  std::vector<Eigen::Vector3d> family{oracle::kDataRho, oracle::kPositiveRho};
  for (const auto& rho : random_family(23, 101)) family.push_back(rho);
  double worst = 0.0;
  int max_points = 0;
  for (const auto& rho : family) {
    const RhoParams p = validate_rho(rho);
    const auto res = oracle::integrate([&](const double* u) { return pdf_at(p, u); }, 3, 1e-10,
                                       0.0, 6);
    v.require(res.converged, "quadrature did not converge");
    worst = std::max(worst, std::abs(res.value - 1.0));
    max_points = std::max(max_points, res.points);
  }
  v.detail << family.size() << " rho, max |integral - 1| = " << worst << ", finest grid "
           << max_points << "^3";
  v.require(worst <= 1e-7, "normalization");
}

void marginal_laws(Verdict& v) {
  const RhoParams p = validate_rho(oracle::kDataRho);
  double worst2 = 0.0, worst1 = 0.0;
  const int m = 64;
  for (auto [a, b] : {std::pair{0, 1}, {0, 2}, {1, 2}}) {
    const int c = third_index(a, b);
    const PairwisePhi f = pairwise_phi(p, a, b);
    for (int s = 0; s < m; ++s) {
      for (int t = 0; t < m; ++t) {
        const double ua = two_pi * s / m, ub = two_pi * t / m;
        const auto marg = oracle::integrate(
            [&](const double* w) {
              double u[3];
              u[a] = ua;
              u[b] = ub;
              u[c] = w[0];
              return pdf_at(p, u);
            },
            1, 1e-13, 1e-14, 7, 256);
        worst2 = std::max(worst2, std::abs(marg.value - bivariate_marginal_pdf(ua, ub, f)));
      }
    }
  }
  for (int i = 0; i < 3; ++i) {
    for (double ui : {0.0, 0.9, 2.5, 4.1, 6.0}) {
      const auto res = oracle::integrate(
          [&](const double* w) {
            double u[3];
            u[i] = ui;
            u[(i + 1) % 3] = w[0];
            u[(i + 2) % 3] = w[1];
            return pdf_at(p, u);
          },
          2, 1e-12);
      worst1 = std::max(worst1, std::abs(res.value - 1.0 / two_pi));
    }
  }
  v.detail << "bivariate sup error on 64^2 grids = " << worst2
           << ", univariate max |f - 1/(2pi)| = " << worst1;
  v.require(worst2 <= 1e-6, "bivariate marginal");
  v.require(worst1 <= 1e-8, "univariate marginal");
}

void conditionals(Verdict& v) {
  std::vector<Eigen::Vector3d> family{oracle::kDataRho, oracle::kPositiveRho,
                                      oracle::kMixedRho};
  for (const auto& rho : random_family(3, 103)) family.push_back(rho);
  double pair = 0.0, one_one = 0.0, one_two = 0.0;
  const int m = 32;
  const double h = two_pi / m;
  for (const auto& rho : family) {
    const RhoParams p = validate_rho(rho);
    for (int k = 0; k < 3; ++k) {
      const int i = k == 0 ? 1 : 0, j = k == 2 ? 1 : 2;
      for (double uk : {0.0, 2.1}) {
        auto slice = [&](double ui, double uj) {
          double u[3];
          u[i] = ui;
          u[j] = uj;
          u[k] = uk;
          return pdf_at(p, u);
        };
        // (u_i, u_j) | u_k
        const double z = oracle::integrate(
                             [&](const double* w) { return slice(w[0], w[1]); }, 2, 1e-12)
                             .value;
        for (int a = 0; a < m; ++a) {
          for (int b = 0; b < m; ++b) {
            double u[3];
            u[i] = h * a;
            u[j] = h * b;
            u[k] = uk;
            pair = std::max(pair, std::abs(conditional_pair_given_one(
                                               AnglePoint3(u[0], u[1], u[2]), p) -
                                           slice(h * a, h * b) / z));
          }
        }
        // u_i | u_k, from the slice integrated over u_j.
        const PairwisePhi f = pairwise_phi(p, std::min(i, k), std::max(i, k));
        auto marg = [&](double ui) {
          return oracle::integrate([&](const double* w) { return slice(ui, w[0]); }, 1, 1e-13,
                                   1e-14, 7, 256)
              .value;
        };
        for (int a = 0; a < m; ++a) {
          one_one = std::max(one_one,
                             std::abs(conditional_one_given_one(h * a, uk, f) - marg(h * a) / z));
        }
      }
    }
    // u_i | (u_j, u_k), each index as the conditioned angle.
    for (int i = 0; i < 3; ++i) {
      const Permutation perm = canonical_permutation(i);
      for (const AnglePoint3& u : random_points(4, 105 + i)) {
        auto at = [&](double ui) {
          double w[3];
          w[i] = ui;
          w[perm.j] = u[perm.j];
          w[perm.k] = u[perm.k];
          return pdf_at(p, w);
        };
        const double z =
            oracle::integrate([&](const double* t) { return at(t[0]); }, 1, 1e-14, 0.0, 9, 256)
                .value;
        const WrappedCauchyParams w = conditional_params_given_two(u[perm.j], u[perm.k], p, i);
        for (int a = 0; a < 256; ++a) {
          const double ui = two_pi * a / 256.0;
          one_two = std::max(one_two, std::abs(wrapped_cauchy_pdf(ui, w) - at(ui) / z));
        }
      }
    }
  }
  v.detail << family.size() << " rho, sup errors: pair|one " << pair << ", one|one " << one_one
           << ", one|two " << one_two;
  v.require(pair <= 1e-6, "pair given one");
  v.require(one_one <= 1e-6, "one given one");
  v.require(one_two <= 1e-6, "one given two");
}

void sampler_fidelity(Verdict& v) {
  const auto start = std::chrono::steady_clock::now();
  const int n = 1000000;
  const RhoParams p = validate_rho(oracle::kPositiveRho);
  const AngleSample s = sample_twcc(n, p, RngState{2024, 0});
  const oracle::GridMoments exact = oracle::converged_moments(p, 2);
  int checked = 0, outside = 0;
  double worst_z = 0.0;
  for (int p1 = -2; p1 <= 2; ++p1) {
    for (int p2 = -2; p2 <= 2; ++p2) {
      for (int p3 = -2; p3 <= 2; ++p3) {
        if (p1 == 0 && p2 == 0 && p3 == 0) continue;
        double sc = 0.0, ss = 0.0, sc2 = 0.0, ss2 = 0.0;
        for (Eigen::Index r = 0; r < s.size(); ++r) {
          const double a = p1 * s.rows()(r, 0) + p2 * s.rows()(r, 1) + p3 * s.rows()(r, 2);
          const double c = std::cos(a), si = std::sin(a);
          sc += c;
          ss += si;
          sc2 += c * c;
          ss2 += si * si;
        }
        const double mc = sc / n, ms = ss / n;
        const double se_c = std::sqrt(std::max(sc2 / n - mc * mc, 1e-300) / n);
        const double se_s = std::sqrt(std::max(ss2 / n - ms * ms, 1e-300) / n);
        const std::complex<double> x = exact(p1, p2, p3);
        const double z = std::max(std::abs(mc - x.real()) / se_c, std::abs(ms - x.imag()) / se_s);
        worst_z = std::max(worst_z, z);
        ++checked;
        outside += z > 4.0;
      }
    }
  }

  const int m = 16;
  const std::vector<double> prob = oracle::cell_probabilities(p, m, 4);
  std::vector<double> counts(prob.size(), 0.0);
  for (Eigen::Index r = 0; r < s.size(); ++r) {
    int cell[3];
    for (int c = 0; c < 3; ++c) {
      cell[c] = std::min(m - 1, static_cast<int>(s.rows()(r, c) / two_pi * m));
    }
    counts[(cell[0] * m + cell[1]) * m + cell[2]] += 1.0;
  }
  double total = 0.0, chi2 = 0.0;
  for (double q : prob) total += q;
  for (std::size_t i = 0; i < prob.size(); ++i) {
    const double e = n * prob[i] / total;
    chi2 += (counts[i] - e) * (counts[i] - e) / e;
  }
  const boost::math::chi_squared ref(m * m * m - 1);
  const double lo = boost::math::quantile(ref, 0.0005);
  const double hi = boost::math::quantile(ref, 0.9995);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  v.detail << checked << " moments, worst |z| = " << worst_z << "; chi2 = " << chi2
           << " in [" << lo << ", " << hi << "]; " << secs << " s";
  v.require(outside == 0, "moment outside 4 SE");
  v.require(lo < chi2 && chi2 < hi, "chi-square band");
  v.require(secs < 60.0, "runtime");
}

void trig_moments(Verdict& v) {
  std::set<MomentCase> seen;
  double worst = 0.0;
  for (const auto& rho : random_family(20, 107)) {
    const RhoParams p = validate_rho(rho);
    const oracle::GridMoments exact = oracle::converged_moments(p, 3, 1e-9);
    for (int p1 = -3; p1 <= 3; ++p1) {
      for (int p2 = -3; p2 <= 3; ++p2) {
        for (int p3 = -3; p3 <= 3; ++p3) {
          const MomentEvaluation ev = trig_moment_detail({p1, p2, p3}, p);
          if (p1 || p2 || p3) seen.insert(ev.formula);
          worst = std::max(worst, std::abs(ev.value - exact(p1, p2, p3)));
        }
      }
    }
  }
  v.detail << "20 rho, max |closed - quadrature| = " << worst << ", cases seen:";
  for (MomentCase c : seen) v.detail << ' ' << to_string(c);
  v.require(worst <= 1e-6, "moment agreement");
  v.require(seen.size() == 6, "all cases exercised");
}

template <typename F>
Eigen::Vector3d grid_extreme(F&& f, int m, double sign) {
  const double h = two_pi / m;
  double best = -INFINITY;
  Eigen::Vector3d at;
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      for (int c = 0; c < m; ++c) {
        const double x = sign * f(AnglePoint3(h * a, h * b, h * c));
        if (x > best) {
          best = x;
          at = Eigen::Vector3d(h * a, h * b, h * c);
        }
      }
    }
  }
  return at;
}

double line_distance(const Eigen::Vector3d& u, const ModeReport& r) {
  return std::max(std::abs(circular_difference(u[0] - u[1], r.offset12)),
                  std::abs(circular_difference(u[0] - u[2], r.offset13)));
}

void mode_lines(Verdict& v) {
  std::mt19937_64 rng(109);
  int all_positive = 0, one_positive = 0;
  const int m = 64;
  const double h = two_pi / m;
  double worst = 0.0;
  while (all_positive + one_positive < 20) {
    const Eigen::Vector3d rho = oracle::random_rho(rng);
    const bool pos = (rho.array() > 0.0).all();
    if ((pos && all_positive >= 10) || (!pos && one_positive >= 10)) continue;
    (pos ? all_positive : one_positive)++;
    const RhoParams p = validate_rho(rho);
    const ModePair mp = modes(p);
    const GeneralizedParams g = make_generalized(p, 1.5 * c1(p));
    auto pdf = [&](const AnglePoint3& u) { return twcc_pdf(u, p); };
    auto gpdf = [&](const AnglePoint3& u) { return generalized_pdf(u, g); };
    for (const double d : {line_distance(grid_extreme(pdf, m, 1.0), mp.mode),
                           line_distance(grid_extreme(pdf, m, -1.0), mp.antimode),
                           line_distance(grid_extreme(gpdf, m, 1.0), mp.mode),
                           line_distance(grid_extreme(gpdf, m, -1.0), mp.antimode)}) {
      worst = std::max(worst, d);
    }
  }
  v.detail << all_positive << " all-positive + " << one_positive
           << " one-positive rho, plus C1 = 1.5 c1; max distance to line = " << worst / h
           << " cells";
  v.require(worst <= h + 1e-12, "grid extreme off the reported line");
}

void score_and_fisher(Verdict& v) {
  std::vector<Eigen::Vector3d> family{oracle::kPositiveRho, oracle::kDataRho,
                                      oracle::kMixedRho};
  for (const auto& rho : random_family(5, 111)) family.push_back(rho);
  double worst_rel = 0.0;
  for (const auto& rho : family) {
    const RhoParams p = validate_rho(rho);
    const AngleSample s = sample_twcc(500, p, RngState{112, 0});
    const Eigen::Vector3d g = score(s, p);
    const Eigen::VectorXd fd = finite_diff_gradient(
        [&](const Eigen::VectorXd& x) {
          return log_likelihood(s, validate_rho(Eigen::Vector3d(x)));
        },
        Eigen::VectorXd(rho), 1e-6);
    for (int a = 0; a < 3; ++a) {
      worst_rel = std::max(worst_rel, std::abs(g[a] - fd[a]) / std::max(1.0, std::abs(g[a])));
    }
  }

  const RhoParams p = validate_rho(oracle::kDataRho);
  const Eigen::Matrix3d info = fisher_information(p).matrix;
  const int n = 1000000;
  const AngleSample s = sample_twcc(n, p, RngState{113, 0});
  Eigen::Matrix3d mean = Eigen::Matrix3d::Zero(), sq = Eigen::Matrix3d::Zero();
  for (Eigen::Index r = 0; r < s.size(); ++r) {
    const Eigen::Vector3d g = score(AngleSample(AngleMatrix(s.rows().row(r))), p);
    const Eigen::Matrix3d o = g * g.transpose();
    mean += o;
    sq += o.cwiseProduct(o);
  }
  mean /= n;
  const Eigen::Matrix3d se = ((sq / n - mean.cwiseProduct(mean)) / n).cwiseSqrt();
  const double worst_sigma = ((info - mean).cwiseAbs().array() / se.array()).maxCoeff();
  const double asym = (info - info.transpose()).cwiseAbs().maxCoeff();
  const double min_ev =
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(info).eigenvalues().minCoeff();
  v.detail << "score vs central differences max rel = " << worst_rel
           << "; Fisher vs MC outer product max = " << worst_sigma << " sigma; asymmetry "
           << asym << ", min eigenvalue " << min_ev;
  v.require(worst_rel <= 1e-5, "score");
  v.require(worst_sigma <= 3.0, "Fisher vs Monte Carlo");
  v.require(asym <= 1e-10 * info.norm(), "symmetry");
  v.require(min_ev >= -1e-8 * info.norm(), "PSD");
}

// Scenario table-s1 at n = 1000 with bootstrap intervals, then the fig-s1
// error curve without bootstrap.
void mle_recovery(Verdict& v) {
  const auto start = std::chrono::steady_clock::now();
  cli::SimulationSpec table = cli::scenario_spec("table-s1");
  table.sizes = {1000};
  table.replicates = 200;
  table.bootstrap = true;
  table.fit.bootstrap_b = 200;
  table.fit.bootstrap_starts = 4;
  table.seed = 1;
  const cli::SizeSummary t = cli::run_simulation(table).at(0);
  v.detail << "n=1000: failures " << t.failures << ", medians";
  for (int a = 0; a < 3; ++a) v.detail << ' ' << t.parameters[a].median;
  v.detail << ", coverage";
  for (int a = 0; a < 3; ++a) {
    const double cov = t.parameters[a].coverage.value_or(0.0);
    v.detail << ' ' << cov;
    v.require(cov >= 0.90, "coverage of rho" + std::string(a == 0 ? "12" : a == 1 ? "13" : "23"));
  }
  const double m23 = t.parameters[2].median;
  v.require(-0.30 < m23 && m23 < -0.18, "median rho23");
  v.require(t.failures == 0, "failed replicates");

  cli::SimulationSpec fig = cli::scenario_spec("fig-s1");
  fig.replicates = 200;
  fig.seed = 1;
  const auto sizes = cli::run_simulation(fig);
  v.detail << "; fig-s1 median abs error by n:";
  for (const auto& s : sizes) {
    v.detail << " n=" << s.n << " (";
    for (int a = 0; a < 3; ++a) v.detail << (a ? " " : "") << s.parameters[a].median_abs_error;
    v.detail << ')';
  }
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    for (int a = 0; a < 3; ++a) {
      v.require(sizes[i].parameters[a].median_abs_error <
                    sizes[i - 1].parameters[a].median_abs_error,
                "error not shrinking at n=" + std::to_string(sizes[i].n));
    }
  }
  v.detail << "; "
           << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()
           << " s";
}

void generalized_model(Verdict& v) {
  double worst_c2 = 0.0;
  std::vector<Eigen::Vector3d> family{oracle::kPositiveRho, oracle::kDataRho,
                                      oracle::kMixedRho};
  for (const auto& rho : random_family(5, 115)) family.push_back(rho);
  for (const auto& rho : family) {
    const RhoParams p = validate_rho(rho);
    const GeneralizedParams g = make_generalized(p, c1(p));
    worst_c2 = std::max(worst_c2, std::abs(g.c2_free() / c2(p) - 1.0));
  }
  const std::pair<Eigen::Vector3d, double> settings[3] = {
      {oracle::kPositiveRho, 1.5}, {oracle::kDataRho, 1.1}, {oracle::kMixedRho, 3.0}};
  double worst_norm = 0.0;
  for (const auto& [rho, factor] : settings) {
    const RhoParams p = validate_rho(rho);
    const GeneralizedParams g = make_generalized(p, factor * c1(p));
    const auto res = oracle::integrate(
        [&](const double* u) { return generalized_pdf(AnglePoint3(u[0], u[1], u[2]), g); }, 3,
        1e-10, 0.0, 6);
    v.require(res.converged, "quadrature did not converge");
    worst_norm = std::max(worst_norm, std::abs(res.value - 1.0));
  }
  v.detail << "max |C2/c2 - 1| at C1 = c1 over " << family.size() << " rho = " << worst_c2
           << "; C1 in {1.5, 1.1, 3} c1: max |integral - 1| = " << worst_norm;
  v.require(worst_c2 <= 1e-10, "C2 reduction");
  v.require(worst_norm <= 1e-7, "generalized normalization");
}

void multivariate(Verdict& v) {
  Eigen::Matrix4d r;
  r << 0, 1.0, -0.5, 0.3,
       1.0, 0, 0.7, -0.2,
       -0.5, 0.7, 0, 0.4,
       0.3, -0.2, 0.4, 0;
  const MultiRho m = make_multi_rho(r, 8.0);
  double worst_marg = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (double ui : {0.0, 2.0, 5.0}) {
      const auto res = oracle::integrate(
          [&](const double* w) {
            Eigen::Vector4d u;
            int next = 0;
            for (int x = 0; x < 4; ++x) u[x] = x == i ? ui : w[next++];
            return multivariate_pdf(u, m);
          },
          3, 1e-10);
      worst_marg = std::max(worst_marg, std::abs(res.value - 1.0 / two_pi));
    }
  }
  double worst_moment = 0.0;
  int orders = 0;
  for (const Eigen::Vector4i& order :
       {Eigen::Vector4i(1, 0, 0, 0), Eigen::Vector4i(0, 0, 0, 2), Eigen::Vector4i(1, 1, -1, 0),
        Eigen::Vector4i(2, -1, 0, 0), Eigen::Vector4i(1, -1, 1, 1)}) {
    const auto res = oracle::integrate(
        [&](const double* u) {
          const Eigen::Vector4d x(u[0], u[1], u[2], u[3]);
          return std::polar(1.0, order.cast<double>().dot(x)) * multivariate_pdf(x, m);
        },
        4, 1e-8, 1e-12, 3);
    worst_moment = std::max(worst_moment, std::abs(res.value));
    ++orders;
  }
  v.detail << "d=4: max |marginal - 1/(2pi)| = " << worst_marg << "; " << orders
           << " nonzero-sum orders, max |moment| = " << worst_moment;
  v.require(worst_marg <= 1e-6, "uniform marginals");
  v.require(worst_moment <= 1e-7, "zero moments");
}

std::string capture(const std::string& command) {
  std::string out;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return out;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  if (pclose(pipe) != 0) out = "exit status " + out;
  return out;
}

void determinism(Verdict& v) {
  if (twcc_binary.empty()) {
    v.require(false, "no twcc binary given");
    return;
  }
  auto pipeline = [&](int seed) {
    return capture(twcc_binary + " sample --rho 1 -4 -0.25 --n 2000 --seed " +
                   std::to_string(seed) + " | " + twcc_binary +
                   " fit - --seed 5 --bootstrap 20 --json");
  };
  const std::string a = pipeline(1), b = pipeline(1), c = pipeline(2);
  v.detail << "report of " << a.size() << " bytes";
  v.require(a.find("\"rho_hat\"") != std::string::npos, "pipeline produced a report");
  v.require(a == b, "same seed, same bytes");
  v.require(a != c, "different seed, different report");
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<void(Verdict&)>>> criteria{
      {"normalization", normalization},
      {"marginal laws", marginal_laws},
      {"conditionals", conditionals},
      {"sampler fidelity", sampler_fidelity},
      {"trigonometric moments", trig_moments},
      {"mode lines", mode_lines},
      {"score and Fisher information", score_and_fisher},
      {"MLE recovery", mle_recovery},
      {"generalized model", generalized_model},
      {"multivariate extension", multivariate},
      {"end-to-end determinism", determinism},
  };
  if (argc > 1) twcc_binary = argv[1];
  std::set<int> only;
  for (int a = 2; a < argc; ++a) only.insert(std::stoi(argv[a]));

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Verdict v;
    try {
      criteria[k].second(v);
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    failed += !v.pass;
    std::cout << "criterion " << id << " (" << criteria[k].first << "): "
              << (v.pass ? "PASS" : "FAIL") << " -- " << v.detail.str() << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
