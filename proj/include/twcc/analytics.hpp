#ifndef TWCC_ANALYTICS_HPP
#define TWCC_ANALYTICS_HPP

#include <complex>
#include <string>

#include "twcc/density.hpp"
#include "twcc/param_space.hpp"

namespace twcc {

struct MomentOrder {
  int p1 = 0;
  int p2 = 0;
  int p3 = 0;

  int operator[](int i) const { return i == 0 ? p1 : (i == 1 ? p2 : p3); }
  MomentOrder operator-() const { return MomentOrder{-p1, -p2, -p3}; }
};

/// Which closed form produced a trigonometric moment.
enum class MomentCase {
  ZeroSum,           // orders do not sum to zero
  GeneralSum,        // binomial sum, p_i > 0
  SimplifiedUpper,   // p_i > 0, p_j >= 0
  SimplifiedLower,   // p_i > 0, p_j <= -p_i
  Reflected,         // p_i < 0, evaluated at -p
  DominantZero,      // p_i = 0
};

std::string to_string(MomentCase c);

struct MomentEvaluation {
  std::complex<double> value;
  MomentCase formula = MomentCase::ZeroSum;
  /// Branch (i, j, k) whose dominance condition the formula relies on.
  Permutation perm;
};

/// E exp(i (p1 U1 + p2 U2 + p3 U3)) in closed form.
MomentEvaluation trig_moment_detail(const MomentOrder& o, const RhoParams& p);
std::complex<double> trig_moment(const MomentOrder& o, const RhoParams& p);

/// The binomial-sum expression for p_i >= 0 with zero order sum, applied
/// without shortcuts. Used to cross-check the simplified forms.
std::complex<double> trig_moment_general_sum(const MomentOrder& o,
                                             const RhoParams& p);

struct CorrCoefficients {
  double johnson_wehrly = 0.0;
  double jupp_mardia = 0.0;
  double fisher_lee = 0.0;
};

CorrCoefficients corr_coefficients(const RhoParams& p, int a, int b);

enum class ModeKind { Mode, Antimode };

/// A line u_1 = t, u_2 = t - offset12, u_3 = t - offset13 on the torus with
/// offsets exactly 0 or pi.
struct ModeReport {
  ModeKind kind = ModeKind::Mode;
  double offset12 = 0.0;
  double offset13 = 0.0;
  Permutation branch;

  /// e.g. "u1=u2+pi=u3+pi".
  std::string relation() const;
  AnglePoint3 point(double t) const;
};

struct ModePair {
  ModeReport mode;
  ModeReport antimode;
};

/// Mode and antimode lines. They depend only on the signs of rho and the
/// dominant index, so they also apply to the generalized density.
ModePair modes(const RhoParams& p);

}  // namespace twcc

#endif  // TWCC_ANALYTICS_HPP
