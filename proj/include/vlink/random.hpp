#pragma once

#include <cstdint>
#include <random>

namespace vlink {

/// splitmix64 step; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Stream tags for the per-stage noise generators of one trial.
enum class SeedStream : std::uint64_t { data = 1, rin = 2, thermal = 3, jitter = 4 };

std::uint64_t derive_seed(std::uint64_t base, SeedStream stream);

class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}
  double operator()() { return dist_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace vlink
