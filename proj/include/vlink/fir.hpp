#pragma once

#include <complex>
#include <span>
#include <vector>

#include "vlink/waveform.hpp"

namespace vlink {

/// FIR filter with an explicit zero-delay tap. Taps before `center` act on
/// future samples, taps after it on past samples:
///   out[k] = sum_j taps[j] * in[k + center - j]
struct FirFilter {
  std::vector<double> taps{1.0};
  int center = 0;

  FirFilter() = default;
  FirFilter(std::vector<double> t, int c);

  static FirFilter identity() { return {}; }

  std::size_t size() const { return taps.size(); }
  double dc_gain() const;

  /// Same response with (factor - 1) zeros inserted between taps, i.e. the
  /// filter run at `factor` times its original rate.
  FirFilter upsampled(int factor) const;
};

/// Zero-padded convolution; output has the input's length.
std::vector<double> fir_apply(std::span<const double> x, const FirFilter& f);
Waveform fir_apply(const Waveform& w, const FirFilter& f);

/// Cascade of two filters as a single FIR.
FirFilter convolve(const FirFilter& a, const FirFilter& b);

/// H(f) = sum_j taps[j] exp(-i 2 pi f (j - center) / rate).
/// Throws std::domain_error for |f| > rate / 2.
std::vector<std::complex<double>> freq_response(const FirFilter& f, std::span<const double> freqs,
                                                double sample_rate);
std::vector<std::complex<double>> freq_response(std::span<const FirFilter> cascade,
                                                std::span<const double> freqs, double sample_rate);

}  // namespace vlink
