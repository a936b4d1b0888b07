#pragma once

#include <span>
#include <vector>

namespace vlink {

struct Psd {
  std::vector<double> freqs;  // Hz
  std::vector<double> power;  // one-sided, units^2 / Hz
};

/// Welch estimate with a Hann window and 50 % overlap.
Psd welch_psd(std::span<const double> x, double sample_rate, int nfft = 1024);

/// Geometric / arithmetic mean of the PSD bins (1 for white noise).
double spectral_flatness(std::span<const double> power);

/// Normalized autocorrelation r[lag] / r[0], mean removed.
double autocorrelation(std::span<const double> x, int lag);

}  // namespace vlink
