#include "twcc/analytics.hpp"

#include <array>
#include <cmath>
#include <cstdlib>

namespace twcc {
namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int m = 1; m <= k; ++m) r = r * (n - k + m) / m;
  return r;
}

struct BranchTerms {
  Permutation perm;
  double rho_ij = 0.0;
  double rho_ik = 0.0;
  double rho_jk = 0.0;
  double varphi = 0.0;
};

BranchTerms branch_terms(const RhoParams& p) {
  BranchTerms t;
  t.perm = p.branch();
  t.rho_ij = p(t.perm.i, t.perm.j);
  t.rho_ik = p(t.perm.i, t.perm.k);
  t.rho_jk = p(t.perm.j, t.perm.k);
  t.varphi = pairwise_phi(p, t.perm.j, t.perm.k).varphi;
  return t;
}

double general_sum(const BranchTerms& t, int pi_, int pj) {
  double s = 0.0;
  for (int n = 0; n <= pi_; ++n) {
    s += binomial(pi_, n) * std::pow(t.rho_ik, -n) * std::pow(t.rho_ij, n - pi_) *
         std::pow(t.varphi, std::abs(pj + n));
  }
  return std::pow(-t.rho_jk, pi_) * s;
}

}  // namespace

std::string to_string(MomentCase c) {
  switch (c) {
    case MomentCase::ZeroSum: return "zero-sum";
    case MomentCase::GeneralSum: return "general-sum";
    case MomentCase::SimplifiedUpper: return "simplified-upper";
    case MomentCase::SimplifiedLower: return "simplified-lower";
    case MomentCase::Reflected: return "reflected";
    case MomentCase::DominantZero: return "dominant-zero";
  }
  return "unknown";
}

MomentEvaluation trig_moment_detail(const MomentOrder& o, const RhoParams& p) {
  const BranchTerms t = branch_terms(p);
  MomentEvaluation ev;
  ev.perm = t.perm;
  if (o.p1 + o.p2 + o.p3 != 0) {
    ev.value = 0.0;
    ev.formula = MomentCase::ZeroSum;
    return ev;
  }
  int pi_ = o[t.perm.i];
  int pj = o[t.perm.j];
  if (pi_ == 0) {
    ev.value = std::pow(t.varphi, std::abs(pj));
    ev.formula = MomentCase::DominantZero;
    return ev;
  }
  const bool reflected = pi_ < 0;
  if (reflected) {
    pi_ = -pi_;
    pj = -pj;
  }
  if (pj >= 0) {
    ev.value = std::pow(t.varphi, pj) *
               std::pow(-t.rho_jk * (t.varphi / t.rho_ik + 1.0 / t.rho_ij), pi_);
    ev.formula = MomentCase::SimplifiedUpper;
  } else if (pj <= -pi_) {
    ev.value = std::pow(t.varphi, -pj) *
               std::pow(-t.rho_jk * (1.0 / (t.varphi * t.rho_ik) + 1.0 / t.rho_ij), pi_);
    ev.formula = MomentCase::SimplifiedLower;
  } else {
    ev.value = general_sum(t, pi_, pj);
    ev.formula = MomentCase::GeneralSum;
  }
  if (reflected) ev.formula = MomentCase::Reflected;
  return ev;
}

std::complex<double> trig_moment(const MomentOrder& o, const RhoParams& p) {
  return trig_moment_detail(o, p).value;
}

std::complex<double> trig_moment_general_sum(const MomentOrder& o,
                                             const RhoParams& p) {
  const BranchTerms t = branch_terms(p);
  if (o.p1 + o.p2 + o.p3 != 0) return 0.0;
  const int pi_ = o[t.perm.i];
  if (pi_ < 0) {
    throw Error(ErrorCode::InvalidArgument,
                "the binomial sum needs a nonnegative dominant order");
  }
  return general_sum(t, pi_, o[t.perm.j]);
}

CorrCoefficients corr_coefficients(const RhoParams& p, int a, int b) {
  const double v = pairwise_phi(p, a, b).varphi;
  return CorrCoefficients{std::abs(v), 2.0 * v * v, v * v};
}

std::string ModeReport::relation() const {
  const std::array<double, 3> shift{0.0, offset12, offset13};
  std::string same = "u1";
  std::string other;
  for (int x = 1; x < 3; ++x) {
    const std::string name = "u" + std::to_string(x + 1);
    if (shift[x] == 0.0) {
      same += "=" + name;
    } else {
      other += "=" + name + "+pi";
    }
  }
  return same + other;
}

AnglePoint3 ModeReport::point(double t) const {
  return AnglePoint3(t, t - offset12, t - offset13);
}

ModePair modes(const RhoParams& p) {
  const int d = p.dominant();
  std::array<int, 3> positive{};
  int n_positive = 0;
  for (int x = 0; x < 3; ++x) {
    const Permutation perm = canonical_permutation(x);
    // Sign of rho on the pair not containing x.
    positive[x] = p(perm.j, perm.k) > 0.0;
    n_positive += positive[x];
  }

  // shift[x] in {0, pi}: u_x = t - shift[x] on the line.
  std::array<double, 3> mode_shift{};
  std::array<double, 3> anti_shift{};
  if (n_positive == 3) {
    // Antimode where every cosine is one; mode moves the dominant angle
    // opposite the small pair.
    mode_shift[d] = pi;
  } else {
    // Exactly one positive pair (a, b); c is the remaining index.
    int c = 0;
    while (!positive[c]) ++c;
    anti_shift[c] = pi;
    if (d != c) {
      const Permutation perm = canonical_permutation(c);
      const int other = (perm.j == d) ? perm.k : perm.j;
      mode_shift[other] = pi;
    }
  }

  auto report = [&](ModeKind kind, const std::array<double, 3>& s) {
    ModeReport r;
    r.kind = kind;
    r.offset12 = reduce_angle(s[1] - s[0]);
    r.offset13 = reduce_angle(s[2] - s[0]);
    r.branch = p.branch();
    return r;
  };
  return ModePair{report(ModeKind::Mode, mode_shift),
                  report(ModeKind::Antimode, anti_shift)};
}

}  // namespace twcc
