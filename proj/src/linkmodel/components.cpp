#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vlink/linkmodel.hpp"

namespace vlink {

double VcselModel::light(double current) const {
  const double x = current - threshold;
  if (x <= 0.0) return 0.0;
  return std::max(0.0, c1 * x + c2 * x * x + c3 * x * x * x);
}

double VcselModel::rin_integral(double band_hz) const {
  if (!rin_db_per_hz) return 0.0;
  const double rin0 = std::pow(10.0, *rin_db_per_hz / 10.0);
  const auto shape = resonant_lowpass(rin_peak_hz, rin_damping);
  // Simpson on a fine grid; the shape is smooth.
  const int n = 20000;
  const double h = band_hz / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * std::norm(shape(i * h));
  }
  return rin0 * acc * h / 3.0;
}

double FiberModel::chromatic_rms_s() const {
  return std::abs(dispersion_ps_nm_km) * source_rms_width_nm * (length_m / 1000.0) * 1e-12;
}

double FiberModel::modal_rms_s() const {
  if (length_m <= 0.0) return 0.0;
  const double f3 = emb_mhz_km * 1e6 / (length_m / 1000.0);
  // exp(-2 pi^2 s^2 f3^2) = 1/2
  return std::sqrt(std::log(2.0) / 2.0) / (std::numbers::pi * f3);
}

double FiberModel::total_rms_s() const {
  const double a = modal_rms_s(), b = chromatic_rms_s();
  return std::sqrt(a * a + b * b);
}

double AdcModel::noise_variance_mw2() const {
  if (!snr_db) return 0.0;
  return 0.25 * std::pow(10.0, -*snr_db / 10.0);
}

AnalogResponse dac_response(const ComponentBandwidths& bw) { return bessel4_lowpass(bw.dac_6db, 6.0); }
AnalogResponse driver_response(const ComponentBandwidths& bw) { return bessel4_lowpass(bw.driver_3db, 3.0); }

AnalogResponse vcsel_response(const ComponentBandwidths& bw, const VcselModel& m) {
  if (std::isinf(bw.vcsel_3db)) return [](double) { return std::complex<double>{1.0, 0.0}; };
  return resonant_lowpass(m.resonance_hz, resonant_damping_for_3db(m.resonance_hz, bw.vcsel_3db));
}

AnalogResponse rx_response(double rx_3db) { return bessel4_lowpass(rx_3db, 3.0); }

AnalogResponse e2e_response(const ComponentBandwidths& bw, const VcselModel& m, double rx_3db) {
  return cascade({dac_response(bw), driver_response(bw), vcsel_response(bw, m), rx_response(rx_3db)});
}

double calibrate_rx_bw(const ComponentBandwidths& bw, const VcselModel& m) {
  const double target = bw.target_e2e_3db;
  if (!(target > 0.0)) throw std::invalid_argument("calibrate_rx_bw: target must be positive");
  const auto fixed = cascade({dac_response(bw), driver_response(bw), vcsel_response(bw, m)});
  const double fixed_loss = -20.0 * std::log10(std::abs(fixed(target)));
  if (fixed_loss >= 3.0)
    throw std::domain_error("calibrate_rx_bw: fixed stages already below the end-to-end target");

  auto loss_at_target = [&](double rx) {
    return -20.0 * std::log10(std::abs(fixed(target) * rx_response(rx)(target)));
  };
  // Loss at the target falls monotonically as the rx corner rises.
  double lo = target * (1.0 + 1e-9), hi = target * 2.0;
  while (loss_at_target(hi) > 3.0) {
    hi *= 2.0;
    if (hi > 1e16) throw std::domain_error("calibrate_rx_bw: no finite rx corner reaches the target");
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (loss_at_target(mid) > 3.0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace vlink
