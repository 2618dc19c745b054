#ifndef TWCC_ESTIMATION_HPP
#define TWCC_ESTIMATION_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "twcc/angle_sample.hpp"
#include "twcc/numerics.hpp"
#include "twcc/param_space.hpp"

namespace twcc {

double log_likelihood(const AngleSample& s, const RhoParams& p);

/// Gradient of log_likelihood with respect to (rho12, rho13, rho23).
Eigen::Vector3d score(const AngleSample& s, const RhoParams& p);

/// Expected information per observation.
struct FisherInfo {
  Eigen::Matrix3d matrix = Eigen::Matrix3d::Zero();
  /// Grid points per axis of the quadrature that produced it.
  int points = 0;

  Eigen::Matrix3d scaled(double n) const { return n * matrix; }
};

/// Expectation of minus the analytic Hessian of log t, by quadrature.
/// Throws QuadratureNotConverged.
FisherInfo fisher_information(const RhoParams& p);

/// Branch search order; each entry is (i, j, k) with ζ carrying rho_ij and
/// the constraint falling on rho_jk.
inline constexpr std::array<Permutation, 3> kFitBranches{
    Permutation{2, 0, 1}, Permutation{0, 1, 2}, Permutation{1, 2, 0}};

struct FitConfig {
  /// Random starts per branch.
  int n_starts = 50;
  double rho_ik_bound = 1e3;
  double zeta_margin = 1e-6;
  double grad_tol = 1e-8;
  double step_tol = 1e-8;
  int max_iter = 500;
  int bootstrap_b = 200;
  /// Random starts per branch for each bootstrap refit; the original
  /// estimate is always tried as well.
  int bootstrap_starts = 4;
  /// Resample rows instead of drawing from the fitted model.
  bool bootstrap_resample_rows = false;
  std::uint64_t seed = 0;
  /// Worker threads; 0 means one per hardware thread.
  unsigned threads = 0;
};

void validate_config(const FitConfig& cfg);

/// Unconstrained coordinates of one sign quadrant of a branch.
struct BranchChart {
  Permutation perm;
  double zeta_sign = 1.0;
  double rho_ik_sign = 1.0;
  double zeta_margin = 1e-6;
  double rho_ik_bound = 1e3;

  template <typename Scalar>
  Scalar zeta(const Scalar& a) const {
    return Scalar(zeta_sign) *
           to_open_interval(a, zeta_margin, 1.0 - zeta_margin);
  }
  template <typename Scalar>
  Scalar rho_ik(const Scalar& b) const {
    return Scalar(rho_ik_sign) * to_log_box(b, rho_ik_bound);
  }
  template <typename Scalar>
  Vector3<Scalar> rho(const Scalar& a, const Scalar& b) const {
    return rho_from_zeta(perm, zeta(a), rho_ik(b));
  }

  /// Inverse map; nullopt when (zeta, rho_ik) is outside this chart.
  std::optional<Eigen::Vector2d> coordinates(double zeta, double rho_ik) const;
};

struct FitResult {
  RhoParams rho_hat;
  double loglik = 0.0;
  Permutation branch;
  double zeta = 0.0;
  double rho_ik = 0.0;
  int starts_converged = 0;
  int starts_total = 0;
  /// Best log-likelihood reached on each entry of kFitBranches (-inf if
  /// every start failed there).
  std::array<double, 3> branch_loglik{};
  /// Infinity norm of the per-observation log-likelihood gradient in
  /// (zeta, rho_ik) at the optimum.
  double grad_norm = 0.0;
};

/// Maximum likelihood over the three branches with multi-start local
/// searches. Throws DegenerateSample or AllStartsFailed.
FitResult fit_mle(const AngleSample& s, const FitConfig& cfg);

/// As fit_mle, additionally trying `warm` on every branch where it lies.
FitResult fit_mle(const AngleSample& s, const FitConfig& cfg,
                  const std::optional<RhoParams>& warm);

struct ParameterInterval {
  double median = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

struct BootstrapResult {
  std::array<ParameterInterval, 3> intervals{};
  int replicates = 0;
  int failures = 0;
  /// Successful replicate estimates (normalized), one row each, in
  /// replicate order.
  Eigen::Matrix<double, Eigen::Dynamic, 3> estimates;
};

/// Percentile bootstrap at 95%. Replicate r uses its own stream derived from
/// the configured seed.
BootstrapResult bootstrap_ci(const AngleSample& s, const FitResult& fit,
                             const FitConfig& cfg);
BootstrapResult bootstrap_ci(const AngleSample& s, const FitConfig& cfg);

/// Quantile with linear interpolation between order statistics.
double quantile(std::vector<double> xs, double q);

/// (1/n) sum exp(i (u_a - u_b)) for each requested pair.
std::vector<std::complex<double>> empirical_trig_moments(
    const AngleSample& s, const std::vector<std::pair<int, int>>& pairs);

/// Subtracts each column's circular mean. Throws ZeroResultant.
AngleSample circular_center(const AngleSample& s);
/// Adds the recorded offsets back; identity for uncentered samples.
AngleSample circular_uncenter(const AngleSample& s);

}  // namespace twcc

#endif  // TWCC_ESTIMATION_HPP
