#include "twcc/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <unsupported/Eigen/AutoDiff>

#include "twcc/density.hpp"
#include "twcc/sampler.hpp"

namespace twcc {
namespace {

using Cosines = Eigen::Matrix<double, Eigen::Dynamic, 3>;
using AD2 = Eigen::AutoDiffScalar<Eigen::Vector2d>;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieTolerance = 1e-9;
constexpr double kStartFloor = 1e-2;
constexpr std::uint64_t kFitStream = 0;
constexpr std::uint64_t kBootstrapStream = 1;

// cos(u1-u2), cos(u1-u3), cos(u2-u3) per row, matching the rho slot order.
Cosines cosine_table(const AngleSample& s) {
  const AngleMatrix& u = s.rows();
  Cosines c(u.rows(), 3);
  c.col(0) = (u.col(0) - u.col(1)).array().cos();
  c.col(1) = (u.col(0) - u.col(2)).array().cos();
  c.col(2) = (u.col(1) - u.col(2)).array().cos();
  return c;
}

// First and second derivatives of c1 and of c4 = ((2pi)^3 c2)^2. Both are
// symmetric in the three arguments, so every slot uses the same formulas
// with the other two parameters in either order.
struct OffsetDerivatives {
  double c1 = 0.0;
  double c4 = 0.0;
  Eigen::Vector3d g1, g4;
  Eigen::Matrix3d h1, h4;
};

OffsetDerivatives offset_derivatives(const Eigen::Vector3d& rho) {
  OffsetDerivatives d;
  d.c1 = c1_of(rho);
  d.c4 = radicand(rho);
  for (int s = 0; s < 3; ++s) {
    const double a = rho[s], b = rho[(s + 1) % 3], c = rho[(s + 2) % 3];
    d.g1[s] = b / c + c / b - b * c / (a * a);
    d.g4[s] = 2.0 * a * (b * b / (c * c) + c * c / (b * b)) -
              2.0 * b * b * c * c / (a * a * a) - 4.0 * a;
    d.h1(s, s) = 2.0 * b * c / (a * a * a);
    d.h4(s, s) = 2.0 * b * b / (c * c) + 2.0 * c * c / (b * b) +
                 6.0 * b * b * c * c / (a * a * a * a) - 4.0;
  }
  for (int s = 0; s < 3; ++s) {
    for (int t = s + 1; t < 3; ++t) {
      const int r = 3 - s - t;
      const double a = rho[s], b = rho[t], c = rho[r];
      d.h1(s, t) = d.h1(t, s) = 1.0 / c - c / (b * b) - c / (a * a);
      d.h4(s, t) = d.h4(t, s) = 4.0 * a * b / (c * c) - 4.0 * a * c * c / (b * b * b) -
                                4.0 * b * c * c / (a * a * a);
    }
  }
  return d;
}

// Log-likelihood and (optionally) its gradient in rho from a cosine table.
// Returns -inf when the denominator or radicand is not positive.
double loglik_from_table(const Cosines& cos, const Eigen::Vector3d& rho,
                         Eigen::Vector3d* grad) {
  if (!rho.allFinite() || (rho.array() == 0.0).any()) return -kInf;
  const double c1v = c1_of(rho);
  const double c4v = radicand(rho);
  if (!(c4v > 0.0) || !std::isfinite(c4v)) return -kInf;
  const Eigen::VectorXd f = (c1v + 2.0 * (cos * rho).array()).matrix();
  if (!(f.minCoeff() > 0.0)) return -kInf;
  const double n = static_cast<double>(cos.rows());
  const double ll =
      n * (0.5 * std::log(c4v) - 3.0 * std::log(two_pi)) - f.array().log().sum();
  if (grad != nullptr) {
    const OffsetDerivatives d = offset_derivatives(rho);
    const Eigen::VectorXd inv = f.cwiseInverse();
    const double sum_inv = inv.sum();
    for (int s = 0; s < 3; ++s) {
      (*grad)[s] = n * d.g4[s] / (2.0 * c4v) - d.g1[s] * sum_inv -
                   2.0 * cos.col(s).dot(inv);
    }
  }
  return ll;
}

bool all_rows_identical(const AngleSample& s) {
  const AngleMatrix& u = s.rows();
  for (Eigen::Index r = 1; r < u.rows(); ++r) {
    if (u.row(r) != u.row(0)) return false;
  }
  return true;
}

struct StartOutcome {
  bool ok = false;
  bool converged = false;
  double loglik = -kInf;
  RhoParams rho;
  double zeta = 0.0;
  double rho_ik = 0.0;
};

Eigen::Matrix<double, 3, 2> chart_jacobian(const BranchChart& chart,
                                           const Eigen::Vector2d& x,
                                           Eigen::Vector3d* rho) {
  const AD2 a(x[0], 2, 0);
  const AD2 b(x[1], 2, 1);
  const Vector3<AD2> r = chart.rho(a, b);
  Eigen::Matrix<double, 3, 2> jac;
  for (int s = 0; s < 3; ++s) {
    (*rho)[s] = r[s].value();
    jac.row(s) = r[s].derivatives().transpose();
  }
  return jac;
}

StartOutcome run_start(const Cosines& cos, const BranchChart& chart,
                       const Eigen::Vector2d& x0, const FitConfig& cfg) {
  const double n = static_cast<double>(cos.rows());
  const Objective objective = [&](const Eigen::VectorXd& x,
                                  Eigen::VectorXd* grad) {
    Eigen::Vector3d rho;
    const Eigen::Matrix<double, 3, 2> jac =
        chart_jacobian(chart, Eigen::Vector2d(x[0], x[1]), &rho);
    Eigen::Vector3d g;
    const double ll = loglik_from_table(cos, rho, &g);
    if (!std::isfinite(ll)) return kInf;
    *grad = -(jac.transpose() * g) / n;
    return -ll / n;
  };

  BfgsOptions opts;
  opts.grad_tol = cfg.grad_tol;
  opts.step_tol = cfg.step_tol;
  opts.max_iter = cfg.max_iter;
  const BfgsResult res = minimize_bfgs(objective, Eigen::VectorXd(x0), opts);

  StartOutcome out;
  if (!std::isfinite(res.value)) return out;
  try {
    const double zeta = chart.zeta(res.x[0]);
    const double rho_ik = chart.rho_ik(res.x[1]);
    out.rho = from_zeta(ZetaBranch{chart.perm, zeta, rho_ik});
    out.loglik = loglik_from_table(cos, out.rho.values(), nullptr);
    out.zeta = zeta;
    out.rho_ik = rho_ik;
    out.converged = res.converged;
    out.ok = std::isfinite(out.loglik);
  } catch (const Error&) {
    out.ok = false;
  }
  return out;
}

// Per-observation gradient in (zeta, rho_ik) at a branch point.
double zeta_gradient_norm(const Cosines& cos, const Permutation& perm,
                          double zeta, double rho_ik) {
  const AD2 z(zeta, 2, 0);
  const AD2 r(rho_ik, 2, 1);
  const Vector3<AD2> rho_ad = rho_from_zeta(perm, z, r);
  Eigen::Vector3d rho;
  Eigen::Matrix<double, 3, 2> jac;
  for (int s = 0; s < 3; ++s) {
    rho[s] = rho_ad[s].value();
    jac.row(s) = rho_ad[s].derivatives().transpose();
  }
  Eigen::Vector3d g;
  loglik_from_table(cos, rho, &g);
  return (jac.transpose() * g).lpNorm<Eigen::Infinity>() /
         static_cast<double>(cos.rows());
}

ParameterInterval summarize(std::vector<double> xs) {
  ParameterInterval iv;
  iv.median = quantile(xs, 0.5);
  iv.lo = quantile(xs, 0.025);
  iv.hi = quantile(std::move(xs), 0.975);
  return iv;
}

}  // namespace

double log_likelihood(const AngleSample& s, const RhoParams& p) {
  const double ll = loglik_from_table(cosine_table(s), p.values(), nullptr);
  if (!std::isfinite(ll)) {
    throw Error(ErrorCode::NegativeRadicand,
                "log-likelihood undefined at rho; parameters escaped validation");
  }
  return ll;
}

Eigen::Vector3d score(const AngleSample& s, const RhoParams& p) {
  Eigen::Vector3d g = Eigen::Vector3d::Zero();
  loglik_from_table(cosine_table(s), p.values(), &g);
  return g;
}

FisherInfo fisher_information(const RhoParams& p) {
  const Eigen::Vector3d rho = p.values();
  const OffsetDerivatives d = offset_derivatives(rho);
  const double norm = std::sqrt(d.c4) / std::pow(two_pi, 3);
  using Moments = Eigen::Matrix<double, 7, 1>;

  // Everything depends on angle differences only, so u1 = 0 and a factor
  // 2pi reduce the expectation to a 2D integral.
  QuadratureSpec spec;
  spec.dims = 2;
  spec.points = 16;
  spec.rel_tol = 1e-10;
  spec.max_doublings = 9;
  const auto res = torus_quadrature(
      [&](const double* v) {
        const Eigen::Vector3d cos(std::cos(-v[0]), std::cos(-v[1]),
                                  std::cos(v[0] - v[1]));
        const double f = d.c1 + 2.0 * cos.dot(rho);
        const double w = two_pi * norm / f;
        const Eigen::Vector3d fa = d.g1 + 2.0 * cos;
        Moments m;
        m[0] = w / f;
        m[1] = w * fa[0] * fa[0] / (f * f);
        m[2] = w * fa[0] * fa[1] / (f * f);
        m[3] = w * fa[0] * fa[2] / (f * f);
        m[4] = w * fa[1] * fa[1] / (f * f);
        m[5] = w * fa[1] * fa[2] / (f * f);
        m[6] = w * fa[2] * fa[2] / (f * f);
        return m;
      },
      spec);
  require_converged(res, "Fisher information");

  const Moments& m = res.value;
  Eigen::Matrix3d outer;
  outer << m[1], m[2], m[3], m[2], m[4], m[5], m[3], m[5], m[6];
  FisherInfo info;
  info.matrix = -0.5 * (d.h4 / d.c4 - d.g4 * d.g4.transpose() / (d.c4 * d.c4)) +
                d.h1 * m[0] - outer;
  info.matrix = 0.5 * (info.matrix + info.matrix.transpose()).eval();
  info.points = res.points;
  return info;
}

void validate_config(const FitConfig& cfg) {
  if (cfg.n_starts < 1 || cfg.bootstrap_starts < 1 || cfg.max_iter < 1) {
    throw Error(ErrorCode::InvalidArgument, "start and iteration counts must be >= 1");
  }
  if (!(cfg.rho_ik_bound > 1.0) || !std::isfinite(cfg.rho_ik_bound)) {
    throw Error(ErrorCode::InvalidArgument, "rho_ik_bound must be finite and > 1");
  }
  if (!(cfg.zeta_margin > 0.0 && cfg.zeta_margin < 0.25)) {
    throw Error(ErrorCode::InvalidArgument, "zeta_margin must lie in (0, 0.25)");
  }
  if (!(cfg.grad_tol > 0.0) || !(cfg.step_tol > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "optimizer tolerances must be positive");
  }
}

std::optional<Eigen::Vector2d> BranchChart::coordinates(double zeta,
                                                        double rho_ik) const {
  const double az = std::abs(zeta), ar = std::abs(rho_ik);
  if (zeta * zeta_sign <= 0.0 || rho_ik * rho_ik_sign <= 0.0) return std::nullopt;
  if (!(az > zeta_margin && az < 1.0 - zeta_margin)) return std::nullopt;
  if (!(ar > 1.0 / rho_ik_bound && ar < rho_ik_bound)) return std::nullopt;
  return Eigen::Vector2d(from_open_interval(az, zeta_margin, 1.0 - zeta_margin),
                         from_log_box(ar, rho_ik_bound));
}

FitResult fit_mle(const AngleSample& s, const FitConfig& cfg) {
  return fit_mle(s, cfg, std::nullopt);
}

FitResult fit_mle(const AngleSample& s, const FitConfig& cfg,
                  const std::optional<RhoParams>& warm) {
  validate_config(cfg);
  if (s.size() < 4) {
    throw Error(ErrorCode::DegenerateSample,
                "fitting needs at least 4 rows, got " + std::to_string(s.size()));
  }
  if (all_rows_identical(s)) {
    throw Error(ErrorCode::DegenerateSample, "all rows of the sample are identical");
  }
  const Cosines cos = cosine_table(s);

  struct Job {
    int branch = 0;
    BranchChart chart;
    Eigen::Vector2d x0;
  };
  std::vector<Job> jobs;
  const RngState root{cfg.seed, kFitStream};
  const double log_lo = std::log(std::max(kStartFloor, 1.0 / cfg.rho_ik_bound));
  const double log_hi = std::log(cfg.rho_ik_bound);
  for (int b = 0; b < 3; ++b) {
    const Permutation perm = kFitBranches[b];
    if (warm && warm->satisfied()[perm.i]) {
      const ZetaBranch z = to_zeta(normalize_rho(*warm), perm);
      BranchChart chart{perm, z.zeta < 0.0 ? -1.0 : 1.0, z.rho_ik < 0.0 ? -1.0 : 1.0,
                        cfg.zeta_margin, cfg.rho_ik_bound};
      if (const auto x = chart.coordinates(z.zeta, z.rho_ik)) {
        jobs.push_back(Job{b, chart, *x});
      }
    }
    const RngState branch_root = derive_stream(root, static_cast<std::uint64_t>(b));
    // Sign quadrants are visited in turn from a random first one, so every
    // quadrant gets a start once n_starts >= 4.
    const int first_quadrant = static_cast<int>(RandomStream(branch_root).engine()() % 4);
    for (int st = 0; st < cfg.n_starts; ++st) {
      RandomStream rng(derive_stream(branch_root, static_cast<std::uint64_t>(st)));
      const int quadrant = (first_quadrant + st) % 4;
      const double zeta_sign = (quadrant & 1) ? -1.0 : 1.0;
      const double zeta_mag = cfg.zeta_margin + (1.0 - 2.0 * cfg.zeta_margin) * rng.uniform_open();
      const double rho_sign = (quadrant & 2) ? -1.0 : 1.0;
      const double rho_mag = std::exp(log_lo + (log_hi - log_lo) * rng.uniform_open());
      BranchChart chart{perm, zeta_sign, rho_sign, cfg.zeta_margin, cfg.rho_ik_bound};
      const auto x = chart.coordinates(zeta_sign * zeta_mag, rho_sign * rho_mag);
      // Draws on the open edge of the box are pulled just inside it.
      jobs.push_back(Job{b, chart, x ? *x : Eigen::Vector2d(0.0, 0.0)});
    }
  }

  std::vector<StartOutcome> outcomes(jobs.size());
  parallel_for(
      jobs.size(),
      [&](std::size_t j) { outcomes[j] = run_start(cos, jobs[j].chart, jobs[j].x0, cfg); },
      cfg.threads);

  FitResult result;
  result.starts_total = static_cast<int>(jobs.size());
  result.branch_loglik.fill(-kInf);
  std::array<int, 3> best{-1, -1, -1};
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const StartOutcome& o = outcomes[j];
    if (!o.ok) continue;
    result.starts_converged += o.converged;
    const int b = jobs[j].branch;
    if (best[b] < 0 || o.loglik > outcomes[best[b]].loglik) {
      best[b] = static_cast<int>(j);
      result.branch_loglik[b] = o.loglik;
    }
  }

  int winner = -1;
  for (int b = 0; b < 3; ++b) {
    if (best[b] < 0) continue;
    if (winner < 0) {
      winner = b;
      continue;
    }
    const double diff = result.branch_loglik[b] - result.branch_loglik[winner];
    if (diff > kTieTolerance ||
        (std::abs(diff) <= kTieTolerance && kFitBranches[b] < kFitBranches[winner])) {
      winner = b;
    }
  }
  if (winner < 0) {
    throw Error(ErrorCode::AllStartsFailed,
                "no start produced a valid estimate on any branch (" +
                    std::to_string(jobs.size()) + " starts)");
  }

  const StartOutcome& w = outcomes[best[winner]];
  result.rho_hat = w.rho;
  result.loglik = w.loglik;
  result.branch = kFitBranches[winner];
  result.zeta = w.zeta;
  result.rho_ik = w.rho_ik;
  result.grad_norm = zeta_gradient_norm(cos, result.branch, w.zeta, w.rho_ik);
  return result;
}

double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) {
    throw Error(ErrorCode::InvalidArgument, "quantile of an empty set");
  }
  std::sort(xs.begin(), xs.end());
  const double h = q * static_cast<double>(xs.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

BootstrapResult bootstrap_ci(const AngleSample& s, const FitConfig& cfg) {
  return bootstrap_ci(s, fit_mle(s, cfg), cfg);
}

BootstrapResult bootstrap_ci(const AngleSample& s, const FitResult& fit,
                             const FitConfig& cfg) {
  validate_config(cfg);
  if (cfg.bootstrap_b < 1) {
    throw Error(ErrorCode::InvalidArgument, "bootstrap needs B >= 1");
  }
  const std::size_t reps = static_cast<std::size_t>(cfg.bootstrap_b);
  const std::size_t n = static_cast<std::size_t>(s.size());
  const RngState root{cfg.seed, kBootstrapStream};
  std::vector<std::optional<Eigen::Vector3d>> estimates(reps);

  parallel_for(
      reps,
      [&](std::size_t r) {
        const RngState rep = derive_stream(root, r);
        RandomStream rng(derive_stream(rep, 0));
        AngleSample draw;
        if (cfg.bootstrap_resample_rows) {
          AngleMatrix rows(s.size(), 3);
          for (Eigen::Index m = 0; m < rows.rows(); ++m) {
            const auto pick = static_cast<Eigen::Index>(
                std::min<double>(std::floor(rng.uniform_open() * static_cast<double>(n)),
                                 static_cast<double>(n - 1)));
            rows.row(m) = s.rows().row(pick);
          }
          draw = AngleSample(std::move(rows));
        } else {
          draw = sample_twcc(n, fit.rho_hat, rng);
        }
        FitConfig inner = cfg;
        inner.n_starts = cfg.bootstrap_starts;
        inner.seed = derive_stream(rep, 1).stream;
        inner.threads = 1;
        try {
          estimates[r] = fit_mle(draw, inner, fit.rho_hat).rho_hat.values();
        } catch (const Error&) {
          estimates[r].reset();
        }
      },
      cfg.threads);

  BootstrapResult out;
  out.replicates = static_cast<int>(reps);
  std::array<std::vector<double>, 3> cols;
  for (const auto& e : estimates) {
    if (!e) {
      ++out.failures;
      continue;
    }
    for (int c = 0; c < 3; ++c) cols[c].push_back((*e)[c]);
  }
  if (cols[0].empty()) {
    throw Error(ErrorCode::AllStartsFailed, "every bootstrap replicate failed");
  }
  out.estimates.resize(static_cast<Eigen::Index>(cols[0].size()), 3);
  for (int c = 0; c < 3; ++c) {
    for (std::size_t r = 0; r < cols[c].size(); ++r) {
      out.estimates(static_cast<Eigen::Index>(r), c) = cols[c][r];
    }
    out.intervals[c] = summarize(cols[c]);
  }
  return out;
}

std::vector<std::complex<double>> empirical_trig_moments(
    const AngleSample& s, const std::vector<std::pair<int, int>>& pairs) {
  if (s.size() < 1) {
    throw Error(ErrorCode::InvalidArgument, "empirical moments need n >= 1");
  }
  std::vector<std::complex<double>> out;
  out.reserve(pairs.size());
  for (const auto& [a, b] : pairs) {
    if (a < 0 || b < 0 || a > 2 || b > 2) {
      throw Error(ErrorCode::InvalidArgument, "pair indices must lie in {0,1,2}");
    }
    const Eigen::ArrayXd diff = (s.rows().col(a) - s.rows().col(b)).array();
    out.emplace_back(diff.cos().mean(), diff.sin().mean());
  }
  return out;
}

AngleSample circular_center(const AngleSample& s) {
  if (s.size() < 1) {
    throw Error(ErrorCode::ZeroResultant, "cannot center an empty sample");
  }
  Eigen::Vector3d offsets;
  for (int c = 0; c < 3; ++c) {
    const Eigen::ArrayXd col = s.rows().col(c).array();
    const double cm = col.cos().mean();
    const double sm = col.sin().mean();
    if (std::hypot(cm, sm) < 1e-12) {
      throw Error(ErrorCode::ZeroResultant,
                  "column u" + std::to_string(c + 1) +
                      " has zero mean resultant length");
    }
    offsets[c] = reduce_angle(std::atan2(sm, cm));
  }
  AngleMatrix rows = s.rows();
  for (int c = 0; c < 3; ++c) rows.col(c).array() -= offsets[c];
  Eigen::Vector3d total = offsets;
  if (s.centered()) {
    for (int c = 0; c < 3; ++c) total[c] = reduce_angle(total[c] + (*s.offsets())[c]);
  }
  return AngleSample(std::move(rows), total);
}

AngleSample circular_uncenter(const AngleSample& s) {
  if (!s.centered()) return s;
  AngleMatrix rows = s.rows();
  for (int c = 0; c < 3; ++c) rows.col(c).array() += (*s.offsets())[c];
  return AngleSample(std::move(rows));
}

}  // namespace twcc
