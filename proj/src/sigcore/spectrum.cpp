#include "vlink/spectrum.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vlink/waveform.hpp"

namespace vlink {

Psd welch_psd(std::span<const double> x, double sample_rate, int nfft) {
  if (nfft < 8 || static_cast<std::size_t>(nfft) > x.size())
    throw std::invalid_argument("welch_psd: segment longer than input");
  std::vector<double> window(static_cast<std::size_t>(nfft));
  double wpow = 0.0;
  for (int i = 0; i < nfft; ++i) {
    window[static_cast<std::size_t>(i)] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / nfft);
    wpow += window[static_cast<std::size_t>(i)] * window[static_cast<std::size_t>(i)];
  }

  const int nbins = nfft / 2 + 1;
  double* in = fftw_alloc_real(static_cast<std::size_t>(nfft));
  fftw_complex* out = fftw_alloc_complex(static_cast<std::size_t>(nbins));
  fftw_plan plan = fftw_plan_dft_r2c_1d(nfft, in, out, FFTW_ESTIMATE);

  Psd psd;
  psd.power.assign(static_cast<std::size_t>(nbins), 0.0);
  const double m = mean(x);
  std::size_t segments = 0;
  for (std::size_t start = 0; start + static_cast<std::size_t>(nfft) <= x.size(); start += static_cast<std::size_t>(nfft / 2)) {
    for (int i = 0; i < nfft; ++i) in[i] = (x[start + static_cast<std::size_t>(i)] - m) * window[static_cast<std::size_t>(i)];
    fftw_execute(plan);
    for (int k = 0; k < nbins; ++k) psd.power[static_cast<std::size_t>(k)] += out[k][0] * out[k][0] + out[k][1] * out[k][1];
    ++segments;
  }
  fftw_destroy_plan(plan);
  fftw_free(in);
  fftw_free(out);

  const double scale = 1.0 / (sample_rate * wpow * static_cast<double>(segments));
  psd.freqs.resize(static_cast<std::size_t>(nbins));
  for (int k = 0; k < nbins; ++k) {
    const bool edge = (k == 0 || k == nfft / 2);
    psd.power[static_cast<std::size_t>(k)] *= scale * (edge ? 1.0 : 2.0);
    psd.freqs[static_cast<std::size_t>(k)] = sample_rate * k / nfft;
  }
  return psd;
}

double spectral_flatness(std::span<const double> power) {
  double logsum = 0.0, sum = 0.0;
  std::size_t n = 0;
  for (double p : power) {
    if (!(p > 0.0)) continue;
    logsum += std::log(p);
    sum += p;
    ++n;
  }
  if (n == 0) return 0.0;
  return std::exp(logsum / n) / (sum / n);
}

double autocorrelation(std::span<const double> x, int lag) {
  const double m = mean(x);
  double r0 = 0.0, rl = 0.0;
  const auto n = x.size();
  const auto l = static_cast<std::size_t>(std::abs(lag));
  for (std::size_t k = 0; k < n; ++k) {
    r0 += (x[k] - m) * (x[k] - m);
    if (k + l < n) rl += (x[k] - m) * (x[k + l] - m);
  }
  return r0 > 0.0 ? rl / r0 : 0.0;
}

}  // namespace vlink
