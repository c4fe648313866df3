#pragma once

#include <cstdint>
#include <random>

#include <boost/random/normal_distribution.hpp>

#include "rrkn/types.hpp"

namespace rrkn {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t z);

/// Maps W ~ Uniform[0,1) to U = sqrt(W) ~ Triangular(0,1) with mode 1.
/// W = 0 is clamped to 2^-53, the smallest positive uniform the stream emits.
double triangular_from_uniform(double w);

/// A seeded random stream. Each chain owns its streams; streams for distinct
/// (master seed, index, lane) triples are derived by hashing, so replicas can
/// run in any order and still reproduce.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  static RandomStream derive(std::uint64_t master, std::uint64_t index,
                             std::uint64_t lane = 0);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double normal() { return normal_(engine_); }
  Vector normal_vector(std::size_t d);
  void fill_normal(Vector& out);
  double triangular() { return triangular_from_uniform(uniform()); }

 private:
  std::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_;  // ziggurat
};

/// Independent lanes consumed by a chain: integrator stage draws and
/// velocity refreshments. Keeping them apart makes the velocity noise
/// independent of the stage variables and lets two chains share one lane
/// for synchronous coupling.
struct ChainStreams {
  RandomStream stage;
  RandomStream velocity;

  static ChainStreams derive(std::uint64_t master, std::uint64_t index);
};

}  // namespace rrkn
