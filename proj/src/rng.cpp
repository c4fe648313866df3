#include "rrkn/rng.hpp"

#include <cmath>

namespace rrkn {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double triangular_from_uniform(double w) {
  if (w <= 0.0) w = 0x1.0p-53;
  return std::sqrt(w);
}

RandomStream::RandomStream(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  engine_.seed(seq);
}

RandomStream RandomStream::derive(std::uint64_t master, std::uint64_t index,
                                  std::uint64_t lane) {
  return RandomStream(mix64(mix64(mix64(master) ^ index) + lane));
}

Vector RandomStream::normal_vector(std::size_t d) {
  Vector out(static_cast<Eigen::Index>(d));
  fill_normal(out);
  return out;
}

void RandomStream::fill_normal(Vector& out) {
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = normal_(engine_);
}

ChainStreams ChainStreams::derive(std::uint64_t master, std::uint64_t index) {
  return {RandomStream::derive(master, index, 1), RandomStream::derive(master, index, 2)};
}

}  // namespace rrkn
