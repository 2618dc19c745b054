#include "twcc/param_space.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "twcc/density.hpp"

namespace twcc {
namespace {

std::string describe(const Eigen::Vector3d& v) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << v[0] << ", " << v[1] << ", " << v[2] << ")";
  return os.str();
}

int sign(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

int RhoParams::dominant() const {
  for (int i = 0; i < 3; ++i) {
    if (satisfied_[i]) return i;
  }
  // Unreachable for validated instances.
  return 0;
}

bool RhoParams::normalized() const {
  return std::abs(product() - 1.0) <= 1e-12;
}

RhoParams validate_rho(const Eigen::Vector3d& rho) {
  if (!rho.allFinite()) {
    throw Error(ErrorCode::NonFinite, "rho " + describe(rho));
  }
  if ((rho.array() == 0.0).any()) {
    throw Error(ErrorCode::ZeroParameter, "rho " + describe(rho));
  }
  if (!(rho.prod() > 0.0)) {
    throw Error(ErrorCode::SignCondition,
                "rho12*rho13*rho23 must be positive, got rho " + describe(rho));
  }

  RhoParams p;
  p.rho_ = rho;
  p.c1_ = c1_of(rho);
  p.c4_ = radicand(rho);
  bool any = false;
  bool near = false;
  for (int i = 0; i < 3; ++i) {
    const Permutation perm = canonical_permutation(i);
    const double bound = branch_bound(rho, i);
    const double small = std::abs(rho[pair_slot(perm.j, perm.k)]);
    const double gap = bound - small;
    p.satisfied_[i] = gap > kBoundaryMargin * bound;
    any = any || p.satisfied_[i];
    near = near || std::abs(gap) <= kBoundaryMargin * bound;
  }
  if (!any) {
    if (near) {
      throw Error(ErrorCode::DegenerateBoundary,
                  "rho " + describe(rho) +
                      " lies on the boundary |rho_jk| = |rho_ij rho_ik| / "
                      "(|rho_ij| + |rho_ik|)");
    }
    throw Error(ErrorCode::NoValidPermutation,
                "rho " + describe(rho) +
                    " violates |rho_jk| < |rho_ij rho_ik| / (|rho_ij| + "
                    "|rho_ik|) for every permutation");
  }
  return p;
}

RhoParams validate_rho(double rho12, double rho13, double rho23) {
  return validate_rho(Eigen::Vector3d(rho12, rho13, rho23));
}

RhoParams normalize_rho(const RhoParams& p) {
  const double c = std::cbrt(1.0 / p.product());
  return validate_rho(c * p.values());
}

PhiTriple make_phi_triple(const Eigen::Vector3d& phi) {
  if (!phi.allFinite()) {
    throw Error(ErrorCode::NonFinite, "phi " + describe(phi));
  }
  const Eigen::Vector3d mag = phi.cwiseAbs();
  PhiTriple q;
  q.phi_ = phi;
  bool near = false;
  for (int i = 0; i < 3; ++i) {
    const Permutation perm = canonical_permutation(i);
    const double gap = mag[i] - (mag[perm.j] + mag[perm.k]);
    if (gap > kBoundaryMargin * mag[i]) {
      q.dominant_ = i;
      return q;
    }
    near = near || std::abs(gap) <= kBoundaryMargin * mag[i];
  }
  if (near) {
    throw Error(ErrorCode::DegenerateBoundary,
                "phi " + describe(phi) + " has |phi_i| = |phi_j| + |phi_k|");
  }
  throw Error(ErrorCode::NoValidPermutation,
              "phi " + describe(phi) +
                  " has no index with |phi_i| > |phi_j| + |phi_k|");
}

PhiTriple make_phi_triple(double phi1, double phi2, double phi3) {
  return make_phi_triple(Eigen::Vector3d(phi1, phi2, phi3));
}

PhiTriple rho_to_phi(const RhoParams& p) {
  Eigen::Vector3d phi;
  for (int i = 0; i < 3; ++i) {
    const Permutation perm = canonical_permutation(i);
    const double rho_jk = p(perm.j, perm.k);
    phi[i] = sign(rho_jk) *
             std::sqrt(std::abs(p(i, perm.j) * p(i, perm.k) / rho_jk));
  }
  return make_phi_triple(phi);
}

RhoParams phi_to_rho(const PhiTriple& q) {
  const Eigen::Vector3d& phi = q.values();
  return validate_rho(phi[0] * phi[1], phi[0] * phi[2], phi[1] * phi[2]);
}

PairwisePhi make_pairwise_phi(double phi) {
  if (!std::isfinite(phi) || phi == 0.0) {
    throw Error(ErrorCode::InvalidArgument,
                "pairwise phi must be finite and nonzero");
  }
  const double mag = std::abs(phi);
  return PairwisePhi{phi, std::min(mag, 1.0 / mag) * sign(phi)};
}

PairwisePhi pairwise_phi(const RhoParams& p, int a, int b) {
  if (a == b || a < 0 || b < 0 || a > 2 || b > 2) {
    throw Error(ErrorCode::InvalidArgument, "pair indices must be distinct in {0,1,2}");
  }
  const int k = third_index(a, b);
  const double rho_ab = p(a, b);
  const double rho_ak = p(a, k);
  const double rho_bk = p(b, k);
  const double root = std::sqrt(p.c4());
  const double phi = (rho_ak * rho_bk / rho_ab - rho_ab * rho_ak / rho_bk -
                      rho_ab * rho_bk / rho_ak - root) /
                     (2.0 * rho_ab);
  return make_pairwise_phi(phi);
}

ZetaBranch to_zeta(const RhoParams& p, const Permutation& perm) {
  if (!p.normalized()) {
    throw Error(ErrorCode::InvalidArgument,
                "to_zeta expects a normalized triple (product one)");
  }
  if (!p.satisfied()[perm.i]) {
    throw Error(ErrorCode::BranchInfeasible,
                "rho " + describe(p.values()) + " is not on branch " +
                    perm.to_string());
  }
  const double rho_ik = p(perm.i, perm.k);
  const double zeta = zeta_scale(rho_ik) / p(perm.i, perm.j);
  return ZetaBranch{perm, zeta, rho_ik};
}

RhoParams from_zeta(const ZetaBranch& z) {
  if (!(std::abs(z.zeta) < 1.0) || z.zeta == 0.0) {
    throw Error(ErrorCode::BranchInfeasible,
                "zeta must lie in (-1,0) U (0,1)");
  }
  if (!std::isfinite(z.rho_ik) || z.rho_ik == 0.0) {
    throw Error(ErrorCode::BranchInfeasible, "rho_ik must be finite and nonzero");
  }
  const RhoParams p = validate_rho(rho_from_zeta(z.perm, z.zeta, z.rho_ik));
  if (!p.satisfied()[z.perm.i]) {
    throw Error(ErrorCode::BranchInfeasible,
                "reconstruction left branch " + z.perm.to_string());
  }
  return p;
}

StarParams to_star(const RhoParams& p) {
  if (!p.normalized()) {
    throw Error(ErrorCode::InvalidArgument,
                "to_star expects a normalized triple (product one)");
  }
  if (!p.satisfied()[0]) {
    throw Error(ErrorCode::BranchInfeasible,
                "star parameters need |rho23| < |rho12 rho13| / (|rho12| + |rho13|)");
  }
  const double partial = p.r23() / std::abs(p.r13());
  const double r = std::abs(partial);
  const double scale = std::cbrt(std::pow((1.0 - r) / std::sqrt(r), 2.0));
  return StarParams{scale * p.r12(), partial};
}

RhoParams from_star(const StarParams& s) {
  const double r = std::abs(s.rho2313_star);
  if (!(std::abs(s.rho12_star) > 1.0) || !(r > 0.0) || !(r < 1.0)) {
    throw Error(ErrorCode::BranchInfeasible,
                "star parameters need |rho12*| > 1 and 0 < |rho23.13*| < 1");
  }
  const double scale = std::cbrt(std::pow((1.0 - r) / std::sqrt(r), 2.0));
  const double rho12 = s.rho12_star / scale;
  const double abs13 = 1.0 / std::sqrt(std::abs(rho12) * r);
  const double rho23 = s.rho2313_star * abs13;
  const double rho13 = sign(rho12) * sign(rho23) * abs13;
  return validate_rho(rho12, rho13, rho23);
}

}  // namespace twcc
