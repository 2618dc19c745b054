#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "twcc/density.hpp"
#include "twcc/param_space.hpp"

using namespace twcc;

namespace {

ErrorCode code_of(const Eigen::Vector3d& rho) {
  try {
    validate_rho(rho);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected rejection");
  return ErrorCode::InvalidArgument;
}

double rel_diff(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return (a - b).cwiseAbs().cwiseQuotient(b.cwiseAbs()).maxCoeff();
}

}  // namespace

TEST_CASE("validate_rho accepts the data-analysis estimate") {
  const RhoParams p = validate_rho(0.611, -1.31, -1.25);
  CHECK(p.product() == doctest::Approx(1.0005).epsilon(1e-3));
  CHECK(p.product() > 0.0);
  int count = 0;
  for (bool b : p.satisfied()) count += b;
  CHECK(count == 1);
}

TEST_CASE("validate_rho rejects the symmetric unit triple") {
  CHECK(code_of(Eigen::Vector3d(1, 1, 1)) == ErrorCode::NoValidPermutation);
}

TEST_CASE("validate_rho marks the branch with rho13 small") {
  const RhoParams p = validate_rho(1.0, 0.25, 4.0);
  // 0.25 < 1*4/(1+4) puts index 2 (0-based 1) in the dominant role.
  CHECK(p.satisfied()[1]);
  CHECK_FALSE(p.satisfied()[0]);
  CHECK_FALSE(p.satisfied()[2]);
  CHECK(p.dominant() == 1);
}

TEST_CASE("validate_rho error codes") {
  CHECK(code_of(Eigen::Vector3d(0, 1, 1)) == ErrorCode::ZeroParameter);
  CHECK(code_of(Eigen::Vector3d(1, -1, 1)) == ErrorCode::SignCondition);
  CHECK(code_of(Eigen::Vector3d(NAN, 1, 1)) == ErrorCode::NonFinite);
  CHECK(code_of(Eigen::Vector3d(INFINITY, 1, 1)) == ErrorCode::NonFinite);
  // |rho23| = |rho12 rho13| / (|rho12| + |rho13|) exactly: 2*2/(2+2) = 1.
  CHECK(code_of(Eigen::Vector3d(2, 2, 1)) == ErrorCode::DegenerateBoundary);
  CHECK(code_of(Eigen::Vector3d(2, 2, 1.0 + 1e-14)) == ErrorCode::DegenerateBoundary);
  CHECK_NOTHROW(validate_rho(2, 2, 1.0 - 1e-9));
  CHECK(code_of(Eigen::Vector3d(2, 2, 1.0 + 1e-9)) == ErrorCode::NoValidPermutation);
}

TEST_CASE("normalize_rho") {
  const RhoParams a = normalize_rho(validate_rho(2, 0.5, 1));
  CHECK(rel_diff(a.values(), Eigen::Vector3d(2, 0.5, 1)) < 1e-15);
  const RhoParams b = normalize_rho(validate_rho(4, 1, 2));
  CHECK(rel_diff(b.values(), Eigen::Vector3d(2, 0.5, 1)) < 1e-15);
  CHECK(b.normalized());

  const RhoParams raw = validate_rho(oracle::kDataRho);
  const RhoParams n = normalize_rho(raw);
  CHECK(std::abs(n.product() - 1.0) < 1e-14);
  for (auto [x, y] : {std::pair{0, 1}, {0, 2}, {1, 2}}) {
    CHECK(pairwise_phi(raw, x, y).phi ==
          doctest::Approx(pairwise_phi(n, x, y).phi).epsilon(1e-12));
  }
}

TEST_CASE("phi round trip and sign rules") {
  for (const Eigen::Vector3d& rho : {oracle::kPositiveRho, oracle::kDataRho}) {
    const RhoParams p = validate_rho(rho);
    const PhiTriple q = rho_to_phi(p);
    const Eigen::Vector3d& phi = q.values();
    CHECK(phi[0] * phi[1] == doctest::Approx(rho[0]).epsilon(1e-12));
    CHECK(phi[0] * phi[2] == doctest::Approx(rho[1]).epsilon(1e-12));
    CHECK(phi[1] * phi[2] == doctest::Approx(rho[2]).epsilon(1e-12));
    CHECK(rel_diff(phi_to_rho(q).values(), rho) < 1e-12);
    CHECK(q.dominant() == p.dominant());
  }
  // phi2 phi3 = 4 is the dominant pair product for (1, 0.25, 4).
  const PhiTriple q = rho_to_phi(validate_rho(oracle::kPositiveRho));
  CHECK(q.dominant() == 1);
  CHECK(std::abs(q[1]) > std::abs(q[0]) + std::abs(q[2]));

  // Exactly one sign of rho is positive for the data estimate; in phi the
  // number of negative entries is one or two.
  const PhiTriple s = rho_to_phi(validate_rho(oracle::kDataRho));
  int negatives = 0;
  for (int i = 0; i < 3; ++i) negatives += s[i] < 0.0;
  CHECK((negatives == 1 || negatives == 2));
}

TEST_CASE("make_phi_triple boundary") {
  CHECK_THROWS_AS(make_phi_triple(3.0, 1.0, 2.0), Error);
  try {
    make_phi_triple(3.0, 1.0, 2.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateBoundary);
  }
  CHECK_NOTHROW(make_phi_triple(3.0 + 1e-9, 1.0, 2.0));
  CHECK(make_phi_triple(1.0, -2.5, 1.0).dominant() == 1);
}

TEST_CASE("pairwise phi of (1, 0.25, 4) pair (1,2) against quadrature") {
  const RhoParams p = validate_rho(oracle::kPositiveRho);
  CHECK(std::pow(two_pi, 3) * c2(p) ==
        doctest::Approx(std::sqrt(222.87890625)).epsilon(1e-14));
  // E cos(U1 - U2) of a wrapped Cauchy difference equals its concentration
  // with sign; fix u1 = 0 and integrate the remaining two angles.
  const auto res = oracle::integrate(
      [&](const double* v) {
        return two_pi * std::cos(-v[0]) * twcc_pdf(AnglePoint3(0.0, v[0], v[1]), p);
      },
      2);
  REQUIRE(res.converged);
  CHECK(std::abs(res.value - pairwise_phi(p, 0, 1).varphi) < 1e-10);
}

TEST_CASE("pairwise phi is invariant under positive rescaling") {
  const RhoParams p = validate_rho(oracle::kPositiveRho);
  for (double c : {0.1, 3.0, 10.0}) {
    const RhoParams q = validate_rho(c * oracle::kPositiveRho);
    for (auto [x, y] : {std::pair{0, 1}, {0, 2}, {1, 2}}) {
      CHECK(pairwise_phi(q, x, y).phi ==
            doctest::Approx(pairwise_phi(p, x, y).phi).epsilon(1e-12));
    }
  }
}

TEST_CASE("unit-disc representative") {
  for (double phi : {0.3, -0.3, 2.0, -5.0, 1e-3}) {
    const PairwisePhi a = make_pairwise_phi(phi);
    const PairwisePhi b = make_pairwise_phi(1.0 / phi);
    CHECK(std::abs(a.varphi) <= 1.0);
    CHECK(a.varphi != 0.0);
    CHECK(a.varphi == doctest::Approx(b.varphi).epsilon(1e-15));
  }
  CHECK_THROWS_AS(make_pairwise_phi(0.0), Error);
}

TEST_CASE("zeta round trip") {
  const RhoParams p = normalize_rho(validate_rho(oracle::kPositiveRho));
  for (const Permutation& perm : {Permutation{1, 2, 0}, Permutation{1, 0, 2}}) {
    const ZetaBranch z = to_zeta(p, perm);
    CHECK(std::abs(z.zeta) < 1.0);
    CHECK(std::abs(p(perm.i, perm.j)) > zeta_scale(z.rho_ik));
    CHECK(rel_diff(from_zeta(z).values(), p.values()) < 1e-10);
  }
  CHECK_THROWS_AS(to_zeta(p, Permutation{0, 1, 2}), Error);
  CHECK_THROWS_AS(to_zeta(validate_rho(oracle::kPositiveRho * 2.0), Permutation{1, 2, 0}),
                  Error);
}

TEST_CASE("zeta near the open ends and at zero") {
  for (double zeta : {1.0 - 1e-6, -(1.0 - 1e-6)}) {
    for (double rho_ik : {0.3, -2.0, 40.0}) {
      const ZetaBranch z{Permutation{0, 1, 2}, zeta, rho_ik};
      const RhoParams p = from_zeta(z);
      CHECK(p.satisfied()[0]);
      CHECK(std::abs(p.product() - 1.0) < 1e-12);
    }
  }
  try {
    from_zeta(ZetaBranch{Permutation{0, 1, 2}, 0.0, 1.0});
    FAIL("zeta = 0 accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BranchInfeasible);
  }
  CHECK_THROWS_AS(from_zeta(ZetaBranch{Permutation{0, 1, 2}, 1.0, 1.0}), Error);
}

TEST_CASE("star parameters (-5, 0.1)") {
  const RhoParams p = from_star(StarParams{-5.0, 0.1});
  // Independent inversion: rho12 = rho12* / ((1-r)/sqrt(r))^(2/3),
  // |rho13| = (|rho12| r)^(-1/2), rho23 = r |rho13|.
  const double r = 0.1;
  const double rho12 = -5.0 / std::pow((1.0 - r) / std::sqrt(r), 2.0 / 3.0);
  const double abs13 = 1.0 / std::sqrt(std::abs(rho12) * r);
  CHECK(rel_diff(p.values(), Eigen::Vector3d(rho12, -abs13, r * abs13)) < 1e-12);
  CHECK(p.normalized());
  CHECK(p.satisfied()[0]);
  const StarParams back = to_star(p);
  CHECK(back.rho12_star == doctest::Approx(-5.0).epsilon(1e-12));
  CHECK(back.rho2313_star == doctest::Approx(0.1).epsilon(1e-12));
  CHECK((back.rho2313_star > 0.0) == (p.r23() > 0.0));
}

TEST_CASE("star round trip for random branch-1 triples") {
  std::mt19937_64 rng(11);
  int done = 0;
  while (done < 100) {
    const RhoParams raw = validate_rho(oracle::random_rho(rng));
    if (!raw.satisfied()[0]) continue;
    const RhoParams p = normalize_rho(raw);
    const StarParams s = to_star(p);
    CHECK(std::abs(s.rho12_star) > 1.0);
    CHECK((s.rho2313_star > 0.0) == (p.r23() > 0.0));
    CHECK(rel_diff(from_star(s).values(), p.values()) < 1e-10);
    ++done;
  }
  CHECK_THROWS_AS(from_star(StarParams{0.5, 0.1}), Error);
  CHECK_THROWS_AS(from_star(StarParams{2.0, 1.0}), Error);
}

TEST_CASE("properties over random valid triples") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    const Eigen::Vector3d rho = oracle::random_rho(rng);
    const RhoParams p = validate_rho(rho);
    const RhoParams n = normalize_rho(p);
    for (double c : {0.01, 0.7, 123.0}) {
      const RhoParams q = validate_rho(c * rho);
      CHECK(q.satisfied() == p.satisfied());
    }
    const PhiTriple phi = rho_to_phi(p);
    const int d = phi.dominant();
    const Permutation perm = canonical_permutation(d);
    CHECK(std::abs(phi[d]) > std::abs(phi[perm.j]) + std::abs(phi[perm.k]));
    CHECK(rel_diff(phi_to_rho(phi).values(), rho) < 1e-10);
    for (const Permutation& br : {Permutation{2, 0, 1}, Permutation{0, 1, 2},
                                  Permutation{1, 2, 0}}) {
      if (!n.satisfied()[br.i]) continue;
      CHECK(rel_diff(from_zeta(to_zeta(n, br)).values(), n.values()) < 1e-10);
    }
    for (auto [x, y] : {std::pair{0, 1}, {0, 2}, {1, 2}}) {
      const double v = pairwise_phi(p, x, y).varphi;
      CHECK(std::abs(v) <= 1.0);
      CHECK(v != 0.0);
    }
  }
}

TEST_CASE("no triple satisfies two branches") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> logmag(std::log(1e-3), std::log(1e3));
  std::uniform_int_distribution<int> coin(0, 1);
  int valid = 0;
  for (int t = 0; t < 100000; ++t) {
    Eigen::Vector3d rho;
    for (int s = 0; s < 3; ++s) rho[s] = (coin(rng) ? 1.0 : -1.0) * std::exp(logmag(rng));
    if (rho.prod() < 0.0) rho[2] = -rho[2];
    try {
      const RhoParams p = validate_rho(rho);
      int count = 0;
      for (bool b : p.satisfied()) count += b;
      CHECK(count == 1);
      ++valid;
    } catch (const Error&) {
    }
  }
  CHECK(valid > 1000);
}
