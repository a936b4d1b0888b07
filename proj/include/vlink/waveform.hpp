#pragma once

#include <span>
#include <vector>

namespace vlink {

/// Uniformly sampled real signal.
struct Waveform {
  double sample_rate = 1.0;  // Hz
  std::vector<double> samples;
  double t0 = 0.0;  // time of samples[0], seconds

  Waveform() = default;
  Waveform(double rate, std::vector<double> s, double start = 0.0);

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double period() const { return 1.0 / sample_rate; }
  double time_at(std::size_t k) const { return t0 + static_cast<double>(k) / sample_rate; }

  /// Throws std::domain_error if any sample is NaN or infinite.
  void check_finite(const char* stage) const;
};

double mean(std::span<const double> x);
double variance(std::span<const double> x);
double rms(std::span<const double> x);

}  // namespace vlink
