#include "twcc/density.hpp"

#include <cmath>
#include <mutex>

#include "twcc/numerics.hpp"

namespace twcc {

double c1(const RhoParams& p) { return p.c1(); }

double c2(const RhoParams& p) {
  const double r = p.c4();
  if (!(r > 0.0)) {
    throw Error(ErrorCode::NegativeRadicand,
                "c2 radicand " + std::to_string(r) + " is not positive");
  }
  return std::sqrt(r) / (two_pi * two_pi * two_pi);
}

double twcc_pdf(const AnglePoint3& u, const RhoParams& p) {
  const Eigen::Vector3d& rho = p.values();
  const double denom =
      c1(p) + 2.0 * (rho[0] * std::cos(u[0] - u[1]) + rho[1] * std::cos(u[0] - u[2]) +
                     rho[2] * std::cos(u[1] - u[2]));
  return c2(p) / denom;
}

double twcc_pdf_complex(const std::complex<double>& z1,
                        const std::complex<double>& z2,
                        const std::complex<double>& z3, const PhiTriple& q) {
  const double s1 = q[0] * q[0], s2 = q[1] * q[1], s3 = q[2] * q[2];
  const double numer = s1 * s1 + s2 * s2 + s3 * s3 - 2.0 * (s1 * s2 + s1 * s3 + s2 * s3);
  const std::complex<double> w = q[0] * z1 + q[1] * z2 + q[2] * z3;
  return std::sqrt(numer) / (std::pow(two_pi, 3) * std::norm(w));
}

double bivariate_marginal_pdf(double ui, double uj, const PairwisePhi& f) {
  const double v = f.varphi;
  return (1.0 - v * v) /
         (4.0 * pi * pi * (1.0 + v * v - 2.0 * v * std::cos(ui - uj)));
}

WrappedCauchyParams make_wrapped_cauchy(double eta, double delta) {
  if (!std::isfinite(eta) || !std::isfinite(delta) || delta < 0.0) {
    throw Error(ErrorCode::InvalidArgument,
                "wrapped Cauchy needs finite eta and delta >= 0");
  }
  if (std::abs(delta - 1.0) <= 1e-15) {
    throw Error(ErrorCode::UnitConcentration,
                "wrapped Cauchy with delta = 1 is degenerate");
  }
  WrappedCauchyParams w;
  w.eta_ = reduce_angle(eta);
  w.raw_delta_ = delta;
  w.delta_ = delta > 1.0 ? 1.0 / delta : delta;
  return w;
}

double wrapped_cauchy_pdf(double theta, const WrappedCauchyParams& w) {
  const double d = w.delta();
  return (1.0 - d * d) /
         (two_pi * (1.0 + d * d - 2.0 * d * std::cos(theta - w.eta())));
}

double conditional_pair_given_one(const AnglePoint3& u, const RhoParams& p) {
  return two_pi * twcc_pdf(u, p);
}

WrappedCauchyParams conditional_params_given_one(double uj, const PairwisePhi& f) {
  const double shift = f.phi < 0.0 ? pi : 0.0;
  return make_wrapped_cauchy(uj + shift, std::abs(f.varphi));
}

double conditional_one_given_one(double ui, double uj, const PairwisePhi& f) {
  return wrapped_cauchy_pdf(ui, conditional_params_given_one(uj, f));
}

WrappedCauchyParams conditional_params_given_two(double uj, double uk,
                                                 const RhoParams& p, int i) {
  if (i < 0 || i > 2) {
    throw Error(ErrorCode::InvalidArgument, "conditioned index must be in {0,1,2}");
  }
  const Permutation perm = canonical_permutation(i);
  const std::complex<double> zj = std::polar(1.0, uj);
  const std::complex<double> zk = std::polar(1.0, uk);
  const std::complex<double> phi =
      -p(perm.j, perm.k) * (zj / p(i, perm.k) + zk / p(i, perm.j));
  const double delta = std::abs(phi);
  const double eta = delta > 0.0 ? std::arg(phi) : 0.0;
  return make_wrapped_cauchy(eta, delta);
}

GeneralizedParams make_generalized(const RhoParams& rho, double c1_free) {
  const int i = rho.dominant();
  const Permutation perm = canonical_permutation(i);
  const double lower = 2.0 * (std::abs(rho(i, perm.j)) + std::abs(rho(i, perm.k)) -
                              std::abs(rho(perm.j, perm.k)));
  if (!std::isfinite(c1_free) || !(c1_free > lower)) {
    throw Error(ErrorCode::IllegalC1,
                "C1 = " + std::to_string(c1_free) + " must exceed " +
                    std::to_string(lower));
  }
  const double r12 = rho.r12(), r13 = rho.r13(), r23 = rho.r23();
  const double h = 0.5 * c1_free;
  const double factors[4] = {h + r12 + r13 + r23, h + r12 - r13 - r23,
                             h + r13 - r12 - r23, h + r23 - r12 - r13};
  double prod = 1.0;
  for (double f : factors) {
    if (!(f > 0.0)) {
      throw Error(ErrorCode::NegativeFactor,
                  "generalized normalizer factor " + std::to_string(f) +
                      " is not positive");
    }
    prod *= f;
  }
  const double alpha1 = -0.5 * c1_free * c1_free + 2.0 * (r12 * r12 + r13 * r13 + r23 * r23);
  const double alpha2 = 2.0 * std::pow(prod, 0.25);
  const double m = (alpha1 + 0.5 * alpha2 * alpha2) / (alpha2 * alpha2);

  GeneralizedParams g;
  g.rho_ = rho;
  g.c1_free_ = c1_free;
  g.c2_free_ = alpha2 / (16.0 * pi * pi * elliptic_K_parameter(m));
  return g;
}

double generalized_pdf(const AnglePoint3& u, const GeneralizedParams& g) {
  const Eigen::Vector3d& rho = g.rho().values();
  const double denom = g.c1_free() + 2.0 * (rho[0] * std::cos(u[0] - u[1]) +
                                            rho[1] * std::cos(u[0] - u[2]) +
                                            rho[2] * std::cos(u[1] - u[2]));
  return g.c2_free() / denom;
}

struct MultiRho::Cache {
  std::once_flag once;
  double value = 0.0;
};

MultiRho make_multi_rho(const Eigen::MatrixXd& rho, double c4) {
  const Eigen::Index d = rho.rows();
  if (rho.cols() != d || d < 3) {
    throw Error(ErrorCode::InvalidArgument,
                "multivariate rho must be a square table with d >= 3");
  }
  if (d > 5) {
    throw Error(ErrorCode::DimensionTooLarge,
                "multivariate density supports d <= 5, got " + std::to_string(d));
  }
  if (!rho.allFinite() || !std::isfinite(c4)) {
    throw Error(ErrorCode::NonFinite, "multivariate parameters must be finite");
  }
  double total = 0.0;
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = a + 1; b < d; ++b) {
      if (rho(a, b) != rho(b, a)) {
        throw Error(ErrorCode::InvalidArgument, "multivariate rho must be symmetric");
      }
      total += std::abs(rho(a, b));
    }
  }
  if (!(c4 > 2.0 * total * (1.0 + kBoundaryMargin))) {
    throw Error(ErrorCode::DenominatorNonpositive,
                "c4 = " + std::to_string(c4) + " must exceed 2 sum |rho_ij| = " +
                    std::to_string(2.0 * total));
  }
  MultiRho m;
  m.rho_ = rho;
  m.c4_ = c4;
  m.cache_ = std::make_shared<MultiRho::Cache>();
  return m;
}

double multivariate_kernel(const double* u, const MultiRho& m) {
  const int d = m.dim();
  const Eigen::MatrixXd& rho = m.rho();
  double s = 0.0;
  for (int a = 0; a < d; ++a) {
    for (int b = a + 1; b < d; ++b) s += rho(a, b) * std::cos(u[a] - u[b]);
  }
  return 1.0 / (m.c4() + 2.0 * s);
}

double MultiRho::normalizer() const {
  std::call_once(cache_->once, [this] {
    // The kernel depends on differences only, so fixing the last angle at 0
    // and multiplying by 2pi gives the full torus integral.
    const int d = dim();
    QuadratureSpec spec;
    spec.dims = d - 1;
    spec.rel_tol = 1e-7;
    spec.max_doublings = 6;
    const auto res = torus_quadrature(
        [&](const double* v) {
          double u[5] = {0.0, 0.0, 0.0, 0.0, 0.0};
          for (int a = 0; a < d - 1; ++a) u[a] = v[a];
          return multivariate_kernel(u, *this);
        },
        spec);
    require_converged(res, "multivariate normalization");
    cache_->value = two_pi * res.value;
  });
  return cache_->value;
}

double multivariate_pdf(const Eigen::VectorXd& u, const MultiRho& m) {
  if (u.size() != m.dim()) {
    throw Error(ErrorCode::InvalidArgument, "angle vector length must equal d");
  }
  Eigen::VectorXd r(u.size());
  for (Eigen::Index a = 0; a < u.size(); ++a) r[a] = reduce_angle(u[a]);
  return multivariate_kernel(r.data(), m) / m.normalizer();
}

}  // namespace twcc
