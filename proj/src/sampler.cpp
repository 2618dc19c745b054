#include "twcc/sampler.hpp"

#include <cmath>

namespace twcc {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

RngState derive_stream(const RngState& parent, std::uint64_t index) {
  return RngState{parent.seed, splitmix64(parent.stream ^ splitmix64(index))};
}

RandomStream::RandomStream(const RngState& state) {
  std::seed_seq seq{static_cast<std::uint32_t>(state.seed),
                    static_cast<std::uint32_t>(state.seed >> 32),
                    static_cast<std::uint32_t>(state.stream),
                    static_cast<std::uint32_t>(state.stream >> 32)};
  engine_.seed(seq);
}

double RandomStream::uniform_open() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double wrapped_cauchy_quantile(double omega, const WrappedCauchyParams& w) {
  if (!(omega > 0.0 && omega < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "quantile level must lie in (0, 1)");
  }
  const double d = w.delta();
  const double t = std::tan(pi * (omega - 0.5));
  return reduce_angle(w.eta() + 2.0 * std::atan((1.0 - d) / (1.0 + d) * t));
}

AngleSample sample_twcc(std::size_t n, const RhoParams& p, RandomStream& rng) {
  const PairwisePhi phi12 = pairwise_phi(p, 0, 1);
  AngleMatrix rows(static_cast<Eigen::Index>(n), 3);
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    const double u1 = two_pi * rng.uniform_open();
    const double u2 = wrapped_cauchy_quantile(
        rng.uniform_open(), conditional_params_given_one(u1, phi12));
    const double u3 = wrapped_cauchy_quantile(
        rng.uniform_open(), conditional_params_given_two(u1, u2, p, 2));
    rows(r, 0) = u1;
    rows(r, 1) = u2;
    rows(r, 2) = u3;
  }
  return AngleSample(std::move(rows));
}

AngleSample sample_twcc(std::size_t n, const RhoParams& p, const RngState& rng) {
  RandomStream stream(rng);
  return sample_twcc(n, p, stream);
}

}  // namespace twcc
