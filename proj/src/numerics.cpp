#include "twcc/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace twcc {

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  unsigned threads) {
  if (n == 0) return;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_index = n;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

namespace detail {

void validate_spec(const QuadratureSpec& spec) {
  if (spec.dims < 1 || spec.dims > 5) {
    throw Error(ErrorCode::DimensionTooLarge,
                "torus quadrature supports 1 to 5 dimensions, got " +
                    std::to_string(spec.dims));
  }
  const int p = spec.points;
  if (p < 16 || (p & (p - 1)) != 0) {
    throw Error(ErrorCode::InvalidArgument,
                "points per axis must be a power of two >= 16");
  }
  if (!(spec.rel_tol > 0.0) || spec.abs_tol < 0.0 || spec.max_doublings < 0) {
    throw Error(ErrorCode::InvalidArgument, "invalid quadrature tolerances");
  }
}

}  // namespace detail

double elliptic_K_parameter(double m) {
  if (!(m < 1.0) || !std::isfinite(m)) {
    throw Error(ErrorCode::ModulusOutOfRange,
                "elliptic K needs parameter m < 1, got " + std::to_string(m));
  }
  double a = 1.0;
  double b = std::sqrt(1.0 - m);
  for (int iter = 0; iter < 64 && std::abs(a - b) > 1e-16 * a; ++iter) {
    const double next_a = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = next_a;
  }
  return pi / (a + b);
}

double elliptic_K(double alpha) {
  if (!(std::abs(alpha) < 1.0)) {
    throw Error(ErrorCode::ModulusOutOfRange,
                "elliptic K needs |alpha| < 1, got " + std::to_string(alpha));
  }
  return elliptic_K_parameter(alpha * alpha);
}

BfgsResult minimize_bfgs(const Objective& fg, const Eigen::VectorXd& x0,
                         const BfgsOptions& opts) {
  const Eigen::Index n = x0.size();
  auto eval = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g.setZero(n);
    const double v = fg(x, &g);
    if (!std::isfinite(v) || !g.allFinite()) {
      return std::numeric_limits<double>::infinity();
    }
    return v;
  };

  BfgsResult res;
  res.x = x0;
  res.value = eval(res.x, res.grad);
  if (!std::isfinite(res.value)) return res;

  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd g_new(n);
  for (res.iterations = 0; res.iterations < opts.max_iter; ++res.iterations) {
    if (res.grad.lpNorm<Eigen::Infinity>() <= opts.grad_tol) {
      res.converged = true;
      return res;
    }
    Eigen::VectorXd dir = -h_inv * res.grad;
    double slope = res.grad.dot(dir);
    if (!(slope < 0.0)) {
      h_inv.setIdentity();
      dir = -res.grad;
      slope = -res.grad.squaredNorm();
    }

    double t = 1.0;
    double v_new = 0.0;
    Eigen::VectorXd x_new;
    bool accepted = false;
    while (true) {
      x_new = res.x + t * dir;
      v_new = eval(x_new, g_new);
      if (v_new <= res.value + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      if (t * dir.norm() <= opts.step_tol * (1.0 + res.x.norm())) break;
      t *= 0.5;
    }
    if (!accepted) {
      // No decrease possible along any meaningful step: stationary to the
      // resolution of the step tolerance.
      res.converged = true;
      return res;
    }

    const Eigen::VectorXd s = x_new - res.x;
    const Eigen::VectorXd y = g_new - res.grad;
    const double sy = s.dot(y);
    res.x = x_new;
    res.value = v_new;
    res.grad = g_new;
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
      h_inv = (eye - rho * s * y.transpose()) * h_inv *
                  (eye - rho * y * s.transpose()) +
              rho * s * s.transpose();
    }
    if (s.norm() <= opts.step_tol * (1.0 + res.x.norm()) &&
        res.grad.lpNorm<Eigen::Infinity>() <= std::sqrt(opts.grad_tol)) {
      res.converged = true;
      return res;
    }
  }
  return res;
}

}  // namespace twcc
