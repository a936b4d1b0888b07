#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vlink/linkmodel.hpp"
#include "vlink/random.hpp"
#include "vlink/resample.hpp"

namespace vlink {

Waveform vcsel_transfer(const Waveform& drive, const VcselModel& m, double vcsel_3db, std::uint64_t rin_seed) {
  std::vector<double> p(drive.size());
  std::size_t below = 0;
  for (std::size_t k = 0; k < drive.size(); ++k) {
    const double current = m.bias + m.swing * drive.samples[k];
    if (current <= m.threshold) ++below;
    p[k] = m.light(current);
  }
  if (2 * below > drive.size()) throw std::domain_error("vcsel: drive below threshold for more than half the samples");

  ComponentBandwidths bw;
  bw.vcsel_3db = vcsel_3db;
  Waveform out(drive.sample_rate, fir_apply(std::span<const double>(p), design_fir(vcsel_response(bw, m), drive.sample_rate)),
               drive.t0);

  if (m.rin_db_per_hz) {
    const FirFilter shape = design_fir(resonant_lowpass(m.rin_peak_hz, m.rin_damping), drive.sample_rate);
    double energy = 0.0;
    for (double t : shape.taps) energy += t * t;
    const double sigma_w = std::sqrt(m.rin_integral(drive.sample_rate / 2.0) / energy);
    GaussianSource gauss(rin_seed);
    std::vector<double> white(out.size());
    for (auto& v : white) v = sigma_w * gauss();
    const auto g = fir_apply(std::span<const double>(white), shape);
    for (std::size_t k = 0; k < out.size(); ++k) out.samples[k] += out.samples[k] * g[k];
  }
  for (auto& v : out.samples) v = std::max(0.0, v);
  return out;
}

Waveform fiber_transfer(const Waveform& p, const FiberModel& f) {
  if (f.length_m < 0.0) throw std::invalid_argument("fiber: length must be >= 0");
  if (f.length_m == 0.0) return p;
  Waveform out = fir_apply(p, design_fir(gaussian_lowpass_sigma(f.total_rms_s()), p.sample_rate));
  const double scale = std::pow(10.0, -f.attenuation_db_km * f.length_m / 1000.0 / 10.0);
  for (auto& v : out.samples) v = std::max(0.0, v * scale);
  return out;
}

double measure_oma_mw(const Waveform& p, int order) {
  if (order < 2) throw std::invalid_argument("OMA needs at least two levels");
  const std::size_t n = p.size();
  const std::size_t cluster = n / static_cast<std::size_t>(order);
  if (cluster == 0) throw std::invalid_argument("OMA: waveform too short");
  std::vector<double> v(p.samples);
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(cluster), v.end());
  double low = 0.0;
  for (std::size_t i = 0; i < cluster; ++i) low += v[i];
  std::nth_element(v.begin(), v.end() - static_cast<std::ptrdiff_t>(cluster), v.end());
  double high = 0.0;
  for (std::size_t i = n - cluster; i < n; ++i) high += v[i];
  return (high - low) / static_cast<double>(cluster);
}

Waveform set_oma(const Waveform& p, double target_oma_dbm, int order) {
  const double oma = measure_oma_mw(p, order);
  if (!(oma > 0.0)) throw std::domain_error("set_oma: signal has no modulation");
  const double scale = std::pow(10.0, target_oma_dbm / 10.0) / oma;
  Waveform out = p;
  for (auto& v : out.samples) v *= scale;
  return out;
}

Waveform detect_and_digitize(const Waveform& p, const AdcModel& adc, const FirFilter& rx_filter, double baud,
                             std::uint64_t thermal_seed, std::uint64_t jitter_seed) {
  if (adc.sps_out < 1) throw std::invalid_argument("adc: sps_out must be >= 1");
  if (std::abs(adc.timing_offset_ui) > 0.5) throw std::invalid_argument("adc: |timing offset| must be <= 0.5 UI");
  if (adc.resolution_bits && *adc.resolution_bits < 4) throw std::invalid_argument("adc: resolution must be >= 4 bits");

  const Waveform filtered = fir_apply(p, rx_filter);
  const double out_rate = baud * adc.sps_out;
  const double ratio = p.sample_rate / out_rate;  // input samples per output sample
  const auto nout = static_cast<std::size_t>(std::floor(static_cast<double>(p.size()) / ratio));
  const double samples_per_ui = p.sample_rate / baud;

  std::vector<double> y(nout);
  const bool resampling = std::abs(ratio - 1.0) > 1e-12 || adc.timing_offset_ui != 0.0 || adc.jitter_rms_ui > 0.0;
  if (!resampling) {
    std::copy_n(filtered.samples.begin(), nout, y.begin());
  } else {
    const FractionalInterpolator interp(12, std::min(0.9, 0.9 / ratio));
    GaussianSource jitter(jitter_seed);
    for (std::size_t n = 0; n < nout; ++n) {
      double pos = static_cast<double>(n) * ratio + adc.timing_offset_ui * samples_per_ui;
      if (adc.jitter_rms_ui > 0.0) pos += adc.jitter_rms_ui * samples_per_ui * jitter();
      y[n] = interp.at(filtered.samples, pos);
    }
  }

  if (adc.snr_db) {
    const double sigma = std::sqrt(adc.noise_variance_mw2());
    GaussianSource gauss(thermal_seed);
    for (auto& v : y) v += sigma * gauss();
  }

  if (adc.resolution_bits && !y.empty()) {
    const auto [lo_it, hi_it] = std::minmax_element(y.begin(), y.end());
    const double lo = *lo_it, hi = *hi_it;
    if (hi > lo) {
      const double lsb = (hi - lo) / (std::ldexp(1.0, *adc.resolution_bits) - 1.0);
      for (auto& v : y) v = lo + std::round((v - lo) / lsb) * lsb;
    }
  }
  // Timestamps are the receiver's nominal grid; the offset stays hidden from it.
  return Waveform(out_rate, std::move(y), p.t0);
}

ChannelFilters design_channel_filters(const LinkModelConfig& cfg, double sample_rate) {
  ChannelFilters f;
  const auto& bw = cfg.bandwidths;
  f.tx = design_fir(cascade({dac_response(bw), driver_response(bw)}), sample_rate);
  f.vcsel = design_fir(vcsel_response(bw, cfg.vcsel), sample_rate);
  f.rx_3db = bw.rx_3db > 0.0 ? bw.rx_3db : calibrate_rx_bw(bw, cfg.vcsel);
  f.rx = design_fir(rx_response(f.rx_3db), sample_rate);
  return f;
}

Waveform simulate_channel(const Waveform& drive, const LinkModelConfig& cfg, int order, double baud,
                          std::uint64_t seed) {
  const ChannelFilters filters = design_channel_filters(cfg, drive.sample_rate);
  Waveform x = fir_apply(drive, filters.tx);
  Waveform p = vcsel_transfer(x, cfg.vcsel, cfg.bandwidths.vcsel_3db, derive_seed(seed, SeedStream::rin));
  p = fiber_transfer(p, cfg.fiber);
  p = set_oma(p, cfg.oma_dbm, order);
  Waveform out = detect_and_digitize(p, cfg.adc, filters.rx, baud, derive_seed(seed, SeedStream::thermal),
                                     derive_seed(seed, SeedStream::jitter));
  out.check_finite("channel");
  return out;
}

}  // namespace vlink
