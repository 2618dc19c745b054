#ifndef TWCC_DENSITY_HPP
#define TWCC_DENSITY_HPP

#include <complex>
#include <memory>

#include <Eigen/Core>

#include "twcc/common.hpp"
#include "twcc/param_space.hpp"

namespace twcc {

/// A point on the 3-torus; components are reduced into [0, 2pi) on
/// construction.
class AnglePoint3 {
 public:
  AnglePoint3() = default;
  AnglePoint3(double u1, double u2, double u3)
      : u_(reduce_angle(u1), reduce_angle(u2), reduce_angle(u3)) {}
  explicit AnglePoint3(const Eigen::Vector3d& u)
      : AnglePoint3(u[0], u[1], u[2]) {}

  double operator[](int i) const { return u_[i]; }
  const Eigen::Vector3d& values() const { return u_; }

 private:
  Eigen::Vector3d u_ = Eigen::Vector3d::Zero();
};

/// rho12 rho13 / rho23 + rho12 rho23 / rho13 + rho13 rho23 / rho12.
template <typename Scalar>
Scalar c1_of(const Vector3<Scalar>& rho) {
  return rho[0] * rho[1] / rho[2] + rho[0] * rho[2] / rho[1] +
         rho[1] * rho[2] / rho[0];
}

/// ((2pi)^3 c2)^2: the sum of squared c1 terms minus 2 sum rho^2.
template <typename Scalar>
Scalar radicand(const Vector3<Scalar>& rho) {
  const Scalar a = rho[0] * rho[1] / rho[2];
  const Scalar b = rho[0] * rho[2] / rho[1];
  const Scalar c = rho[1] * rho[2] / rho[0];
  return a * a + b * b + c * c -
         Scalar(2) * (rho[0] * rho[0] + rho[1] * rho[1] + rho[2] * rho[2]);
}

double c1(const RhoParams& p);
double c2(const RhoParams& p);

double twcc_pdf(const AnglePoint3& u, const RhoParams& p);

/// Density in complex form at z_i = exp(i u_i).
double twcc_pdf_complex(const std::complex<double>& z1,
                        const std::complex<double>& z2,
                        const std::complex<double>& z3, const PhiTriple& q);

double bivariate_marginal_pdf(double ui, double uj, const PairwisePhi& f);

/// Wrapped Cauchy location and concentration. The concentration is held in
/// canonical form delta < 1 (delta and 1/delta give the same law); the value
/// supplied at construction is kept for reporting.
class WrappedCauchyParams {
 public:
  double eta() const { return eta_; }
  double delta() const { return delta_; }
  double raw_delta() const { return raw_delta_; }

 private:
  friend WrappedCauchyParams make_wrapped_cauchy(double eta, double delta);
  double eta_ = 0.0;
  double delta_ = 0.0;
  double raw_delta_ = 0.0;
};

WrappedCauchyParams make_wrapped_cauchy(double eta, double delta);

double wrapped_cauchy_pdf(double theta, const WrappedCauchyParams& w);

/// Joint density of the remaining pair given one angle. The univariate
/// marginals are uniform, so this is 2pi times the trivariate density for
/// every choice of conditioning index.
double conditional_pair_given_one(const AnglePoint3& u, const RhoParams& p);

/// Law of u_i given u_j for a pair with marginal parameter f.
WrappedCauchyParams conditional_params_given_one(double uj, const PairwisePhi& f);
double conditional_one_given_one(double ui, double uj, const PairwisePhi& f);

/// Law of u_i given the other two angles; (uj, uk) are the remaining
/// angles in increasing index order.
WrappedCauchyParams conditional_params_given_two(double uj, double uk,
                                                 const RhoParams& p, int i);

/// Trivariate model with a free offset C1 in place of c1.
class GeneralizedParams {
 public:
  const RhoParams& rho() const { return rho_; }
  double c1_free() const { return c1_free_; }
  /// Normalizing constant C2.
  double c2_free() const { return c2_free_; }

 private:
  friend GeneralizedParams make_generalized(const RhoParams& rho, double c1_free);
  RhoParams rho_;
  double c1_free_ = 0.0;
  double c2_free_ = 0.0;
};

GeneralizedParams make_generalized(const RhoParams& rho, double c1_free);

double generalized_pdf(const AnglePoint3& u, const GeneralizedParams& g);

/// d-variate extension with density proportional to
/// 1 / (c4 + 2 sum_{i<j} rho_ij cos(u_i - u_j)), 3 <= d <= 5.
class MultiRho {
 public:
  int dim() const { return static_cast<int>(rho_.rows()); }
  const Eigen::MatrixXd& rho() const { return rho_; }
  double c4() const { return c4_; }

  /// Integral of the unnormalized kernel over the torus, computed once.
  double normalizer() const;

 private:
  struct Cache;
  friend MultiRho make_multi_rho(const Eigen::MatrixXd& rho, double c4);
  Eigen::MatrixXd rho_;
  double c4_ = 0.0;
  std::shared_ptr<Cache> cache_;
};

MultiRho make_multi_rho(const Eigen::MatrixXd& rho, double c4);

double multivariate_kernel(const double* u, const MultiRho& m);
double multivariate_pdf(const Eigen::VectorXd& u, const MultiRho& m);

}  // namespace twcc

#endif  // TWCC_DENSITY_HPP
