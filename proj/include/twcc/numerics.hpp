#ifndef TWCC_NUMERICS_HPP
#define TWCC_NUMERICS_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

#include "twcc/common.hpp"
#include "twcc/errors.hpp"

namespace twcc {

/// Run body(0), ..., body(n-1) on a small thread pool. Every index is
/// processed exactly once; the first exception (lowest index) is rethrown.
/// threads == 0 uses std::thread::hardware_concurrency().
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  unsigned threads = 0);

struct QuadratureSpec {
  int dims = 3;
  /// Initial points per axis; a power of two >= 16.
  int points = 16;
  double rel_tol = 1e-8;
  /// Absolute fallback for integrals that are (close to) zero.
  double abs_tol = 0.0;
  int max_doublings = 6;
};

template <typename T>
struct QuadratureResult {
  T value{};
  /// Change between the last two resolutions, relative to |value|.
  double achieved_rel = std::numeric_limits<double>::infinity();
  double achieved_abs = std::numeric_limits<double>::infinity();
  int points = 0;
  bool converged = false;
  /// achieved_rel after each doubling.
  std::vector<double> history;
};

namespace detail {

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const std::complex<double>& x) { return std::abs(x); }
template <typename Derived>
double magnitude(const Eigen::MatrixBase<Derived>& x) {
  return x.template lpNorm<Eigen::Infinity>();
}

template <typename T>
T pairwise_sum(const std::vector<T>& xs, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return xs[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return T(pairwise_sum(xs, lo, mid) + pairwise_sum(xs, mid, hi));
}

void validate_spec(const QuadratureSpec& spec);

// Sum of f over the slab with first index i0 on an m^d grid. With
// only_new, points whose indices are all even (present on the m/2 grid)
// are skipped.
template <typename T, typename F>
T slab_sum(F& f, int d, int m, int i0, bool only_new, const T& zero) {
  const double h = two_pi / m;
  std::array<double, 8> u{};
  u[0] = h * i0;
  if (d == 1) {
    return (only_new && i0 % 2 == 0) ? zero : T(f(u.data()));
  }
  const bool lead_even = (i0 % 2 == 0);
  std::array<int, 8> idx{};
  T total = zero;
  // Odometer over axes 1..d-2; the innermost axis d-1 is summed as a line.
  while (true) {
    bool outer_even = lead_even;
    for (int a = 1; a < d - 1; ++a) {
      u[a] = h * idx[a];
      outer_even = outer_even && (idx[a] % 2 == 0);
    }
    const bool odd_only = only_new && outer_even;
    T line = zero;
    for (int i = odd_only ? 1 : 0; i < m; i += odd_only ? 2 : 1) {
      u[d - 1] = h * i;
      line += f(u.data());
    }
    total += line;
    int a = d - 2;
    while (a >= 1) {
      if (++idx[a] < m) break;
      idx[a] = 0;
      --a;
    }
    if (a < 1) break;
  }
  return total;
}

}  // namespace detail

/// Product trapezoidal rule on [0, 2pi)^d. f receives a pointer to d angles.
/// The per-axis resolution doubles (reusing the nested grid) until the
/// relative change drops below spec.rel_tol or max_doublings is reached;
/// non-convergence is reported through the flag, not thrown. The summation
/// order is fixed, so results do not depend on the thread count.
template <typename F>
auto torus_quadrature(F&& f, const QuadratureSpec& spec)
    -> QuadratureResult<std::decay_t<decltype(f(std::declval<const double*>()))>> {
  using T = std::decay_t<decltype(f(std::declval<const double*>()))>;
  detail::validate_spec(spec);
  const int d = spec.dims;

  std::array<double, 8> origin{};
  const T proto = f(origin.data());
  const T zero = T(proto * 0.0);

  QuadratureResult<T> result;
  T raw = zero;
  T previous = zero;
  int m = spec.points;
  for (int level = 0; level <= spec.max_doublings; ++level, m *= 2) {
    const bool only_new = level > 0;
    std::vector<T> slabs(static_cast<std::size_t>(m), zero);
    parallel_for(static_cast<std::size_t>(m), [&](std::size_t i0) {
      slabs[i0] = detail::slab_sum(f, d, m, static_cast<int>(i0), only_new, zero);
    });
    raw = T(raw + detail::pairwise_sum(slabs, 0, slabs.size()));
    const T value = T(raw * std::pow(two_pi / m, d));
    result.value = value;
    result.points = m;
    if (level > 0) {
      const double change = detail::magnitude(T(value - previous));
      const double scale = detail::magnitude(value);
      result.achieved_abs = change;
      result.achieved_rel =
          scale > 0.0 ? change / scale : std::numeric_limits<double>::infinity();
      result.history.push_back(result.achieved_rel);
      if (change <= spec.rel_tol * scale || change <= spec.abs_tol) {
        result.converged = true;
        return result;
      }
    }
    previous = value;
  }
  return result;
}

/// Throws QuadratureNotConverged when the flag is unset.
template <typename T>
const QuadratureResult<T>& require_converged(const QuadratureResult<T>& r,
                                             const char* what) {
  if (!r.converged) {
    throw Error(ErrorCode::QuadratureNotConverged,
                std::string(what) + " (relative change " +
                    std::to_string(r.achieved_rel) + " at " +
                    std::to_string(r.points) + " points per axis)");
  }
  return r;
}

/// Complete elliptic integral of the first kind in modulus form,
/// K(alpha) = int_0^{pi/2} (1 - alpha^2 sin^2 t)^{-1/2} dt, |alpha| < 1.
double elliptic_K(double alpha);

/// Same integral in parameter form m = alpha^2; any m < 1 is accepted,
/// including negative m (imaginary modulus).
double elliptic_K_parameter(double m);

template <typename F>
Eigen::VectorXd finite_diff_gradient(F&& f, const Eigen::VectorXd& x,
                                     double h = 1e-6) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd up = x, down = x;
    up[i] += h;
    down[i] -= h;
    g[i] = (f(up) - f(down)) / (2.0 * h);
  }
  return g;
}

template <typename F>
Eigen::MatrixXd finite_diff_hessian(F&& f, const Eigen::VectorXd& x,
                                    double h = 1e-4) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd hess(n, n);
  const double f0 = f(x);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd up = x, down = x;
    up[i] += h;
    down[i] -= h;
    hess(i, i) = (f(up) - 2.0 * f0 + f(down)) / (h * h);
    for (Eigen::Index j = 0; j < i; ++j) {
      Eigen::VectorXd pp = x, pm = x, mp = x, mm = x;
      pp[i] += h; pp[j] += h;
      pm[i] += h; pm[j] -= h;
      mp[i] -= h; mp[j] += h;
      mm[i] -= h; mm[j] -= h;
      hess(i, j) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h * h);
      hess(j, i) = hess(i, j);
    }
  }
  return hess;
}

template <typename Scalar>
Scalar logistic(const Scalar& a) {
  using std::exp;
  return Scalar(1) / (Scalar(1) + exp(-a));
}

/// Maps the real line onto (lo, hi).
template <typename Scalar>
Scalar to_open_interval(const Scalar& a, double lo, double hi) {
  return Scalar(lo) + Scalar(hi - lo) * logistic(a);
}

inline double from_open_interval(double x, double lo, double hi) {
  return std::log((x - lo) / (hi - x));
}

/// Maps the real line onto (1/bound, bound), uniformly in log scale near 0.
template <typename Scalar>
Scalar to_log_box(const Scalar& b, double bound) {
  using std::exp;
  using std::tanh;
  return exp(Scalar(std::log(bound)) * tanh(b));
}

inline double from_log_box(double x, double bound) {
  return std::atanh(std::log(x) / std::log(bound));
}

struct BfgsOptions {
  double grad_tol = 1e-8;
  double step_tol = 1e-8;
  int max_iter = 500;
};

struct BfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd grad;
  int iterations = 0;
  bool converged = false;
};

/// Objective returning f(x) and writing the gradient into *grad. Non-finite
/// values are treated as +infinity by the line search.
using Objective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>;

/// Quasi-Newton minimization with an Armijo backtracking line search.
/// Converged when the gradient infinity norm is below grad_tol, or when a
/// step shrinks below step_tol * (1 + |x|) without improving f.
BfgsResult minimize_bfgs(const Objective& fg, const Eigen::VectorXd& x0,
                         const BfgsOptions& opts = {});

}  // namespace twcc

#endif  // TWCC_NUMERICS_HPP
