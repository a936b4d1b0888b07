#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vlink/analog.hpp"
#include "vlink/fir.hpp"
#include "vlink/waveform.hpp"

namespace vlink {

/// Component corner frequencies in Hz. A zero rx_3db means "calibrate".
struct ComponentBandwidths {
  double dac_6db = 50e9;
  double driver_3db = 70e9;
  double vcsel_3db = 35e9;
  double rx_3db = 0.0;
  double target_e2e_3db = 28e9;
};

struct VcselModel {
  double threshold = 0.5;   // current units
  double bias = 3.5;        // current units
  double swing = 1.6;       // current per unit of normalized drive
  double c1 = 1.0;
  double c2 = -0.03;
  double c3 = -0.002;
  double resonance_hz = 28e9;  // damping follows from the 3 dB bandwidth
  std::optional<double> rin_db_per_hz = -145.0;  // nullopt = no RIN
  double rin_peak_hz = 28e9;
  double rin_damping = 0.6;

  /// LI curve, clipped at zero power.
  double light(double current) const;
  /// Integral of the one-sided RIN spectrum from 0 to `band_hz`; 0 without RIN.
  double rin_integral(double band_hz) const;
};

struct FiberModel {
  double length_m = 0.0;
  double emb_mhz_km = 4700.0;
  double dispersion_ps_nm_km = -90.0;
  double source_rms_width_nm = 0.178;
  double attenuation_db_km = 2.2;

  double chromatic_rms_s() const;
  /// RMS width of the Gaussian whose optical (|H| = 1/2) bandwidth is EMB / length.
  double modal_rms_s() const;
  double total_rms_s() const;
};

struct AdcModel {
  int sps_out = 2;
  std::optional<int> resolution_bits = 8;  // nullopt = no quantization
  double timing_offset_ui = 0.0;
  double jitter_rms_ui = 0.0;
  /// Thermal SNR referenced to a 0 dBm-OMA two-level signal:
  /// noise variance = (0.5 mW)^2 * 10^(-snr/10). nullopt = noiseless.
  std::optional<double> snr_db = 21.5;

  double noise_variance_mw2() const;
};

/// Per-component analog responses.
AnalogResponse dac_response(const ComponentBandwidths& bw);
AnalogResponse driver_response(const ComponentBandwidths& bw);
AnalogResponse vcsel_response(const ComponentBandwidths& bw, const VcselModel& m);
AnalogResponse rx_response(double rx_3db);
AnalogResponse e2e_response(const ComponentBandwidths& bw, const VcselModel& m, double rx_3db);

/// Receiver 3 dB corner that makes the DAC/driver/VCSEL/rx cascade cross
/// -3 dB at bw.target_e2e_3db. Throws std::domain_error when the fixed stages
/// alone are already below the target.
double calibrate_rx_bw(const ComponentBandwidths& bw, const VcselModel& m = {});

/// Optical power (mW) from a normalized drive waveform.
Waveform vcsel_transfer(const Waveform& drive, const VcselModel& m, double vcsel_3db, std::uint64_t rin_seed);

Waveform fiber_transfer(const Waveform& p, const FiberModel& f);

/// Scales the optical waveform so the mean of the top 1/M of samples minus
/// the mean of the bottom 1/M equals 10^(dBm/10) mW.
Waveform set_oma(const Waveform& p, double target_oma_dbm, int order);
double measure_oma_mw(const Waveform& p, int order);

/// rx filter, sampling at (k + offset + jitter) / sps_out symbol periods,
/// thermal noise, quantization over the observed range. Output timestamps stay
/// on the nominal k / sps_out grid, so the offset is invisible downstream.
Waveform detect_and_digitize(const Waveform& p, const AdcModel& adc, const FirFilter& rx_filter, double baud,
                             std::uint64_t thermal_seed, std::uint64_t jitter_seed);

struct LinkModelConfig {
  ComponentBandwidths bandwidths;
  VcselModel vcsel;
  FiberModel fiber;
  AdcModel adc;
  double oma_dbm = 1.0;
};

struct ChannelFilters {
  FirFilter tx;     // DAC * driver
  FirFilter vcsel;
  FirFilter rx;
  double rx_3db = 0.0;
};

ChannelFilters design_channel_filters(const LinkModelConfig& cfg, double sample_rate);

/// DAC -> driver -> VCSEL (+RIN) -> fiber -> OMA -> detector/ADC.
Waveform simulate_channel(const Waveform& drive, const LinkModelConfig& cfg, int order, double baud,
                          std::uint64_t seed);

}  // namespace vlink
