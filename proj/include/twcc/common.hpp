#ifndef TWCC_COMMON_HPP
#define TWCC_COMMON_HPP

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Core>

namespace twcc {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

/// Reduce an angle into [0, 2pi).
inline double reduce_angle(double x) {
  if (x >= 0.0 && x < two_pi) return x;
  double r = std::fmod(x, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi) r = 0.0;
  return r;
}

/// Signed circular difference mapped into [-pi, pi).
inline double circular_difference(double a, double b) {
  return reduce_angle(a - b + pi) - pi;
}

// Angle indices are 0-based internally. Pairwise quantities are stored in
// the order (12, 13, 23), so the slot of an unordered pair {a, b} is a+b-1.
constexpr int pair_slot(int a, int b) { return a + b - 1; }

/// The index not in {a, b}.
constexpr int third_index(int a, int b) { return 3 - a - b; }

/// An ordered permutation (i, j, k) of (0, 1, 2). For the validity
/// inequality, `i` is the dominant index and {j, k} the small pair.
struct Permutation {
  int i = 0;
  int j = 1;
  int k = 2;

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

  /// 1-based rendering, e.g. "(2,3,1)".
  std::string to_string() const {
    return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "," +
           std::to_string(k + 1) + ")";
  }
};

/// The permutation with dominant index i and j < k.
constexpr Permutation canonical_permutation(int i) {
  const int a = (i == 0) ? 1 : 0;
  const int b = (i == 2) ? 1 : 2;
  return Permutation{i, a, b};
}

}  // namespace twcc

#endif  // TWCC_COMMON_HPP
