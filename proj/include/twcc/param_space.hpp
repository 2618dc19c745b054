#ifndef TWCC_PARAM_SPACE_HPP
#define TWCC_PARAM_SPACE_HPP

#include <array>
#include <cmath>
#include <vector>

#include "twcc/common.hpp"
#include "twcc/errors.hpp"

namespace twcc {

/// Relative width of the rejection band around every strict validity
/// inequality.
inline constexpr double kBoundaryMargin = 1e-12;

/// Dependence triple (rho12, rho13, rho23) of the trivariate wrapped Cauchy
/// copula. Instances only come out of validate_rho and friends, so holding one
/// means the density is bounded and normalizable.
class RhoParams {
 public:
  const Eigen::Vector3d& values() const { return rho_; }
  double r12() const { return rho_[0]; }
  double r13() const { return rho_[1]; }
  double r23() const { return rho_[2]; }

  /// rho_ab for a != b (0-based, unordered).
  double operator()(int a, int b) const { return rho_[pair_slot(a, b)]; }

  /// satisfied()[i] is true when the inequality with dominant index i holds,
  /// i.e. |rho_jk| < |rho_ij rho_ik| / (|rho_ij| + |rho_ik|).
  const std::array<bool, 3>& satisfied() const { return satisfied_; }

  /// Dominant index of the first satisfied branch.
  int dominant() const;
  Permutation branch() const { return canonical_permutation(dominant()); }

  double product() const { return rho_.prod(); }
  bool normalized() const;

  /// Offset c1 and ((2pi)^3 c2)^2, computed once at validation.
  double c1() const { return c1_; }
  double c4() const { return c4_; }

 private:
  friend RhoParams validate_rho(const Eigen::Vector3d& rho);
  Eigen::Vector3d rho_ = Eigen::Vector3d::Ones();
  std::array<bool, 3> satisfied_{};
  double c1_ = 0.0;
  double c4_ = 0.0;
};

RhoParams validate_rho(const Eigen::Vector3d& rho);
RhoParams validate_rho(double rho12, double rho13, double rho23);

/// Rescale by c = (rho12 rho13 rho23)^(-1/3) so the product is one.
RhoParams normalize_rho(const RhoParams& p);

/// Right-hand side of the validity inequality for dominant index i:
/// |rho_ij rho_ik| / (|rho_ij| + |rho_ik|).
template <typename Scalar>
Scalar branch_bound(const Vector3<Scalar>& rho, int i) {
  using std::abs;
  const Permutation perm = canonical_permutation(i);
  const Scalar a = abs(rho[pair_slot(i, perm.j)]);
  const Scalar b = abs(rho[pair_slot(i, perm.k)]);
  return a * b / (a + b);
}

/// Complex-form parameters with rho_ij = phi_i phi_j.
class PhiTriple {
 public:
  const Eigen::Vector3d& values() const { return phi_; }
  double operator[](int i) const { return phi_[i]; }
  /// Index with |phi_i| > |phi_j| + |phi_k|.
  int dominant() const { return dominant_; }

 private:
  friend PhiTriple make_phi_triple(const Eigen::Vector3d& phi);
  Eigen::Vector3d phi_ = Eigen::Vector3d::Ones();
  int dominant_ = 0;
};

PhiTriple make_phi_triple(const Eigen::Vector3d& phi);
PhiTriple make_phi_triple(double phi1, double phi2, double phi3);

PhiTriple rho_to_phi(const RhoParams& p);
RhoParams phi_to_rho(const PhiTriple& q);

/// Marginal dependence parameter of a pair together with its unit-disc
/// representative varphi = min(|phi|, 1/|phi|) sgn(phi).
struct PairwisePhi {
  double phi = 0.0;
  double varphi = 0.0;
};

PairwisePhi make_pairwise_phi(double phi);
PairwisePhi pairwise_phi(const RhoParams& p, int a, int b);

/// Box-reparametrized coordinates of a normalized triple on one branch.
/// perm.i is dominant; zeta carries rho_ij and rho_ik is kept as is.
struct ZetaBranch {
  Permutation perm;
  double zeta = 0.5;
  double rho_ik = 1.0;
};

/// Smallest admissible |rho_ij| given rho_ik on a normalized branch:
/// (1 + sqrt(1 + 4|rho_ik|^3)) / (2 rho_ik^2).
template <typename Scalar>
Scalar zeta_scale(const Scalar& rho_ik) {
  using std::abs;
  using std::sqrt;
  const Scalar a = abs(rho_ik);
  return (Scalar(1) + sqrt(Scalar(1) + Scalar(4) * a * a * a)) /
         (Scalar(2) * a * a);
}

/// Normalized (rho12, rho13, rho23) from branch coordinates. No validation;
/// templated so the estimator can differentiate through it.
template <typename Scalar>
Vector3<Scalar> rho_from_zeta(const Permutation& perm, const Scalar& zeta,
                              const Scalar& rho_ik) {
  const Scalar rho_ij = zeta_scale(rho_ik) / zeta;
  const Scalar rho_jk = Scalar(1) / (rho_ij * rho_ik);
  Vector3<Scalar> rho;
  rho[pair_slot(perm.i, perm.j)] = rho_ij;
  rho[pair_slot(perm.i, perm.k)] = rho_ik;
  rho[pair_slot(perm.j, perm.k)] = rho_jk;
  return rho;
}

ZetaBranch to_zeta(const RhoParams& p, const Permutation& perm);
RhoParams from_zeta(const ZetaBranch& z);

/// Full dependence parameter rho*_12 and partial dependence parameter
/// rho*_23.13 on the branch constraining rho23.
struct StarParams {
  double rho12_star = 2.0;
  double rho2313_star = 0.5;
};

StarParams to_star(const RhoParams& p);
RhoParams from_star(const StarParams& s);

}  // namespace twcc

#endif  // TWCC_PARAM_SPACE_HPP
