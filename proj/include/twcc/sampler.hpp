#ifndef TWCC_SAMPLER_HPP
#define TWCC_SAMPLER_HPP

#include <cstddef>
#include <cstdint>
#include <random>

#include "twcc/angle_sample.hpp"
#include "twcc/density.hpp"
#include "twcc/param_space.hpp"

namespace twcc {

/// Identifies one reproducible random stream.
struct RngState {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// Child stream number `index` of a parent stream; distinct indices give
/// distinct, unrelated generator seeds.
RngState derive_stream(const RngState& parent, std::uint64_t index);

class RandomStream {
 public:
  explicit RandomStream(const RngState& state);

  /// Uniform on the open interval (0, 1), 53 random bits.
  double uniform_open();

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Inverse CDF of the wrapped Cauchy law, result in [0, 2pi).
double wrapped_cauchy_quantile(double omega, const WrappedCauchyParams& w);

/// Draws n rows without rejection: u1 uniform, u2 | u1 wrapped Cauchy from
/// the (1,2) marginal, u3 | (u1, u2) wrapped Cauchy from the full
/// conditional. Three uniforms are consumed per row, in that order.
AngleSample sample_twcc(std::size_t n, const RhoParams& p, RandomStream& rng);
AngleSample sample_twcc(std::size_t n, const RhoParams& p, const RngState& rng);

}  // namespace twcc

#endif  // TWCC_SAMPLER_HPP
