#include "vlink/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace vlink {

namespace {

constexpr double kKaiserBeta = 7.857;  // ~80 dB stop band

double kaiser(double x, double beta) {  // x in [-1, 1]
  if (std::abs(x) > 1.0) return 0.0;
  return std::cyl_bessel_i(0.0, beta * std::sqrt(1.0 - x * x)) / std::cyl_bessel_i(0.0, beta);
}

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

// Best rational approximation p/q of r with q <= max_den.
std::pair<long, long> rational(double r, long max_den) {
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double x = r;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(x);
    const long ai = static_cast<long>(a);
    const long p2 = ai * p1 + p0, q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    if (std::abs(static_cast<double>(p1) / q1 - r) <= 1e-12 * r) break;
    const double frac = x - a;
    if (frac < 1e-15) break;
    x = 1.0 / frac;
  }
  return {p1, q1};
}

}  // namespace

Waveform resample(const Waveform& w, double new_rate) {
  if (!(new_rate > 0.0)) throw std::invalid_argument("resample: new rate must be positive");
  if (w.empty()) throw std::invalid_argument("resample: empty input");
  if (new_rate == w.sample_rate) return w;

  const auto [p, q] = rational(new_rate / w.sample_rate, 4096);
  if (std::abs(static_cast<double>(p) / q * w.sample_rate - new_rate) > 1e-9 * new_rate)
    throw std::invalid_argument("resample: rate ratio has no small rational form");

  const double fs_up = static_cast<double>(p) * w.sample_rate;
  const double fmin = std::min(w.sample_rate, new_rate);
  const double fc = 0.45 * fmin;
  const double dw = 2.0 * std::numbers::pi * 0.1 * fmin / fs_up;
  long ntaps = static_cast<long>(std::ceil((80.0 - 8.0) / (2.285 * dw))) + 1;
  ntaps = std::max<long>(ntaps, 2 * p + 1);
  if (ntaps % 2 == 0) ++ntaps;
  const long delay = (ntaps - 1) / 2;

  std::vector<double> h(static_cast<std::size_t>(ntaps));
  for (long k = 0; k < ntaps; ++k) {
    const double t = static_cast<double>(k - delay);
    h[static_cast<std::size_t>(k)] = 2.0 * fc / fs_up * sinc(2.0 * fc / fs_up * t) *
                                     kaiser(t / static_cast<double>(delay), kKaiserBeta);
  }
  // Each polyphase branch gets unit DC gain after the factor p below.
  for (long ph = 0; ph < p; ++ph) {
    double s = 0.0;
    for (long k = ph; k < ntaps; k += p) s += h[static_cast<std::size_t>(k)];
    if (s != 0.0)
      for (long k = ph; k < ntaps; k += p) h[static_cast<std::size_t>(k)] /= s * static_cast<double>(p);
  }

  const auto nin = static_cast<long>(w.size());
  const long nout = (nin * p + q - 1) / q;
  std::vector<double> y(static_cast<std::size_t>(nout), 0.0);
  for (long n = 0; n < nout; ++n) {
    const long m = n * q + delay;  // index into h is m - i p
    long i_hi = m / p;
    long i_lo = (m - ntaps + 1 + p - 1) / p;
    if (m - ntaps + 1 < 0) i_lo = 0;
    i_hi = std::min(i_hi, nin - 1);
    i_lo = std::max<long>(i_lo, 0);
    double acc = 0.0;
    for (long i = i_lo; i <= i_hi; ++i) acc += w.samples[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(m - i * p)];
    y[static_cast<std::size_t>(n)] = acc * static_cast<double>(p);
  }
  return Waveform(new_rate, std::move(y), w.t0);
}

FractionalInterpolator::FractionalInterpolator(int half_width, double cutoff, int table_phases)
    : half_width_(half_width), phases_(table_phases) {
  if (half_width < 1 || table_phases < 1 || !(cutoff > 0.0) || cutoff > 1.0)
    throw std::invalid_argument("invalid interpolator parameters");
  const int width = 2 * half_width;
  table_.assign(static_cast<std::size_t>((phases_ + 1) * width), 0.0);
  for (int r = 0; r <= phases_; ++r) {
    const double mu = static_cast<double>(r) / phases_;
    double s = 0.0;
    for (int j = 0; j < width; ++j) {
      const double t = static_cast<double>(j - half_width + 1) - mu;
      const double v = cutoff * sinc(cutoff * t) * kaiser(t / half_width, 6.0);
      table_[static_cast<std::size_t>(r * width + j)] = v;
      s += v;
    }
    for (int j = 0; j < width; ++j) table_[static_cast<std::size_t>(r * width + j)] /= s;
  }
}

double FractionalInterpolator::at(std::span<const double> x, double pos) const {
  const double fl = std::floor(pos);
  const auto i0 = static_cast<long>(fl);
  const double rpos = (pos - fl) * phases_;
  const int r = std::min(static_cast<int>(rpos), phases_ - 1);
  const double frac = rpos - r;
  const int width = 2 * half_width_;
  const double* a = &table_[static_cast<std::size_t>(r * width)];
  const double* b = a + width;
  const long first = i0 - half_width_ + 1;
  const auto n = static_cast<long>(x.size());
  double acc = 0.0;
  if (first >= 0 && first + width <= n) {
    const double* xs = x.data() + first;
    for (int j = 0; j < width; ++j) acc += xs[j] * (a[j] + frac * (b[j] - a[j]));
  } else {
    for (int j = 0; j < width; ++j) {
      const long i = first + j;
      if (i >= 0 && i < n) acc += x[static_cast<std::size_t>(i)] * (a[j] + frac * (b[j] - a[j]));
    }
  }
  return acc;
}

}  // namespace vlink
