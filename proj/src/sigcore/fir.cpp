#include "vlink/fir.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace vlink {

FirFilter::FirFilter(std::vector<double> t, int c) : taps(std::move(t)), center(c) {
  if (taps.empty()) throw std::invalid_argument("FIR filter needs at least one tap");
  if (c < 0 || c >= static_cast<int>(taps.size())) throw std::invalid_argument("FIR center outside taps");
}

double FirFilter::dc_gain() const { return std::accumulate(taps.begin(), taps.end(), 0.0); }

FirFilter FirFilter::upsampled(int factor) const {
  if (factor < 1) throw std::invalid_argument("upsampling factor must be >= 1");
  std::vector<double> t((taps.size() - 1) * static_cast<std::size_t>(factor) + 1, 0.0);
  for (std::size_t j = 0; j < taps.size(); ++j) t[j * static_cast<std::size_t>(factor)] = taps[j];
  return {std::move(t), center * factor};
}

std::vector<double> fir_apply(std::span<const double> x, const FirFilter& f) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  std::vector<double> out(x.size(), 0.0);
  if (n == 0) return out;
  // Tap-major accumulation in cache-sized blocks; the inner loop is a plain
  // axpy so it vectorizes without reassociating sums.
  constexpr std::ptrdiff_t block = 4096;
  const auto ntaps = static_cast<std::ptrdiff_t>(f.taps.size());
  for (std::ptrdiff_t b0 = 0; b0 < n; b0 += block) {
    const std::ptrdiff_t b1 = std::min(n, b0 + block);
    double* o = out.data();
    for (std::ptrdiff_t j = 0; j < ntaps; ++j) {
      const double t = f.taps[static_cast<std::size_t>(j)];
      if (t == 0.0) continue;
      const std::ptrdiff_t shift = f.center - j;  // out[k] += t * x[k + shift]
      const std::ptrdiff_t k0 = std::max(b0, -shift);
      const std::ptrdiff_t k1 = std::min(b1, n - shift);
      const double* xs = x.data() + shift;
      for (std::ptrdiff_t k = k0; k < k1; ++k) o[k] += t * xs[k];
    }
  }
  return out;
}

Waveform fir_apply(const Waveform& w, const FirFilter& f) {
  Waveform out;
  out.sample_rate = w.sample_rate;
  out.t0 = w.t0;
  out.samples = fir_apply(std::span<const double>(w.samples), f);
  return out;
}

FirFilter convolve(const FirFilter& a, const FirFilter& b) {
  std::vector<double> t(a.taps.size() + b.taps.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.taps.size(); ++i)
    for (std::size_t j = 0; j < b.taps.size(); ++j) t[i + j] += a.taps[i] * b.taps[j];
  return {std::move(t), a.center + b.center};
}

std::vector<std::complex<double>> freq_response(const FirFilter& f, std::span<const double> freqs,
                                                double sample_rate) {
  std::vector<std::complex<double>> h;
  h.reserve(freqs.size());
  for (double fr : freqs) {
    if (std::abs(fr) > sample_rate / 2.0 * (1.0 + 1e-12))
      throw std::domain_error("frequency above Nyquist in freq_response");
    std::complex<double> acc{0.0, 0.0};
    const double w = -2.0 * std::numbers::pi * fr / sample_rate;
    for (std::size_t j = 0; j < f.taps.size(); ++j) {
      const double ph = w * (static_cast<double>(j) - f.center);
      acc += f.taps[j] * std::complex<double>(std::cos(ph), std::sin(ph));
    }
    h.push_back(acc);
  }
  return h;
}

std::vector<std::complex<double>> freq_response(std::span<const FirFilter> cascade,
                                                std::span<const double> freqs, double sample_rate) {
  std::vector<std::complex<double>> h(freqs.size(), {1.0, 0.0});
  for (const auto& f : cascade) {
    const auto hf = freq_response(f, freqs, sample_rate);
    for (std::size_t i = 0; i < h.size(); ++i) h[i] *= hf[i];
  }
  return h;
}

}  // namespace vlink
