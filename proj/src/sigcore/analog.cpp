#include "vlink/analog.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vlink {

namespace {

using cd = std::complex<double>;

// Reverse Bessel polynomial of order 4, normalized to unit DC gain.
cd bessel4_normalized(double w) {
  const cd s{0.0, w};
  const cd s2 = s * s;
  return 105.0 / (s2 * s2 + 10.0 * s2 * s + 45.0 * s2 + 105.0 * s + 105.0);
}

double db_down(cd h, cd h0) { return -20.0 * std::log10(std::abs(h) / std::abs(h0)); }

// Normalized angular frequency where the order-4 Bessel prototype is atten_db down.
double bessel4_corner(double atten_db) {
  double lo = 1e-6, hi = 100.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (db_down(bessel4_normalized(mid), 1.0) < atten_db) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

AnalogResponse bessel4_lowpass(double f_hz, double atten_db) {
  if (!(f_hz > 0.0)) throw std::invalid_argument("Bessel corner frequency must be positive");
  if (std::isinf(f_hz)) return [](double) { return cd{1.0, 0.0}; };
  const double scale = bessel4_corner(atten_db) / f_hz;
  return [scale](double f) { return bessel4_normalized(f * scale); };
}

AnalogResponse resonant_lowpass(double resonance_hz, double damping) {
  if (!(resonance_hz > 0.0) || !(damping > 0.0))
    throw std::invalid_argument("resonant low-pass needs positive resonance and damping");
  if (std::isinf(resonance_hz)) return [](double) { return cd{1.0, 0.0}; };
  return [resonance_hz, damping](double f) {
    const double u = f / resonance_hz;
    return 1.0 / cd{1.0 - u * u, 2.0 * damping * u};
  };
}

double resonant_damping_for_3db(double resonance_hz, double f3db_hz) {
  // |H|^2 = 1 / ((1 - v)^2 + 4 zeta^2 v) with v = (f/fr)^2; solve |H|^2 = 1/2.
  const double v = (f3db_hz / resonance_hz) * (f3db_hz / resonance_hz);
  const double z2 = (2.0 - (1.0 - v) * (1.0 - v)) / (4.0 * v);
  if (!(z2 > 0.0)) throw std::domain_error("no damping gives the requested 3 dB point");
  return std::sqrt(z2);
}

AnalogResponse gaussian_lowpass_sigma(double sigma_s) {
  const double k = 2.0 * std::numbers::pi * std::numbers::pi * sigma_s * sigma_s;
  return [k](double f) { return cd{std::exp(-k * f * f), 0.0}; };
}

AnalogResponse gaussian_lowpass(double f_hz, double atten_db) {
  // exp(-2 pi^2 sigma^2 f^2) = 10^(-a/20)  =>  sigma^2 = a ln10 / (40 pi^2 f^2)
  const double sigma = std::sqrt(atten_db * std::log(10.0) / 40.0) / (std::numbers::pi * f_hz);
  return gaussian_lowpass_sigma(sigma);
}

AnalogResponse cascade(std::vector<AnalogResponse> stages) {
  return [stages = std::move(stages)](double f) {
    cd h{1.0, 0.0};
    for (const auto& s : stages) h *= s(f);
    return h;
  };
}

double attenuation_crossing(const AnalogResponse& h, double atten_db, double f_lo, double f_hi) {
  const cd h0 = h(0.0);
  auto below = [&](double f) { return db_down(h(f), h0) >= atten_db; };
  // Scan for the first bracket so pass-band ripple does not fool the bisection.
  const int steps = 2000;
  double a = f_lo;
  if (below(a)) throw std::domain_error("response already below target at lower bound");
  double b = f_lo;
  bool found = false;
  for (int i = 1; i <= steps; ++i) {
    b = f_lo + (f_hi - f_lo) * i / steps;
    if (below(b)) {
      found = true;
      break;
    }
    a = b;
  }
  if (!found) throw std::domain_error("no attenuation crossing inside search interval");
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (a + b);
    if (below(mid)) b = mid;
    else a = mid;
  }
  return 0.5 * (a + b);
}

double attenuation_crossing(std::span<const FirFilter> stages, double sample_rate, double atten_db,
                            double f_lo, double f_hi) {
  std::vector<FirFilter> copy(stages.begin(), stages.end());
  AnalogResponse h = [copy, sample_rate](double f) {
    const double fr[1] = {f};
    return freq_response(std::span<const FirFilter>(copy), fr, sample_rate)[0];
  };
  return attenuation_crossing(h, atten_db, f_lo, std::min(f_hi, sample_rate / 2.0));
}

FirFilter design_fir(const AnalogResponse& h, double sample_rate, int pre_taps, int max_length, double trim) {
  // Dense inverse DFT of the response sampled on [0, fs); negative-time
  // samples wrap to the end of the buffer.
  const int n = 8192;
  std::vector<cd> spec(n / 2 + 1);
  for (int k = 0; k <= n / 2; ++k) spec[k] = h(sample_rate * k / n);
  spec[n / 2] = {spec[n / 2].real(), 0.0};
  spec[0] = {spec[0].real(), 0.0};
  // Real inverse DFT, evaluated only where we keep taps.
  const int keep = std::min(max_length, n);
  std::vector<double> taps(static_cast<std::size_t>(keep), 0.0);
  for (int m = 0; m < keep; ++m) {
    const int t = m - pre_taps;  // time index
    double acc = spec[0].real() + spec[n / 2].real() * ((t % 2 == 0) ? 1.0 : -1.0);
    const double w = 2.0 * std::numbers::pi * t / n;
    for (int k = 1; k < n / 2; ++k) {
      const double ph = w * k;
      acc += 2.0 * (spec[k].real() * std::cos(ph) - spec[k].imag() * std::sin(ph));
    }
    taps[static_cast<std::size_t>(m)] = acc / n;
  }
  double peak = 0.0;
  for (double t : taps) peak = std::max(peak, std::abs(t));
  int first = 0, last = keep - 1;
  while (first < pre_taps && std::abs(taps[static_cast<std::size_t>(first)]) < trim * peak) ++first;
  while (last > pre_taps && std::abs(taps[static_cast<std::size_t>(last)]) < trim * peak) --last;
  std::vector<double> out(taps.begin() + first, taps.begin() + last + 1);
  return {std::move(out), pre_taps - first};
}

}  // namespace vlink
