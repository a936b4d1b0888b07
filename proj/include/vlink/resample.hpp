#pragma once

#include <span>
#include <vector>

#include "vlink/waveform.hpp"

namespace vlink {

/// Rational polyphase resampler with a Kaiser-windowed sinc anti-alias
/// filter (pass band 0.45 of the lower rate, about 80 dB stop band).
/// The output is time aligned with the input (zero net delay).
Waveform resample(const Waveform& w, double new_rate);

/// Band-limited interpolation at arbitrary fractional sample positions using a
/// tabulated Kaiser-windowed sinc.
class FractionalInterpolator {
 public:
  /// `cutoff` is relative to the input Nyquist frequency (<= 1).
  explicit FractionalInterpolator(int half_width = 8, double cutoff = 0.9, int table_phases = 512);

  /// Value at fractional index `pos`; samples outside the input are zero.
  double at(std::span<const double> x, double pos) const;

  int half_width() const { return half_width_; }

 private:
  int half_width_;
  int phases_;
  std::vector<double> table_;  // (phases_ + 1) rows of 2 * half_width_ taps
};

}  // namespace vlink
