#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "vlink/fir.hpp"

namespace vlink {

/// Continuous-time frequency response, evaluated at a frequency in Hz.
using AnalogResponse = std::function<std::complex<double>(double)>;

/// 4th-order Bessel low-pass whose magnitude is `atten_db` down at `f_hz`.
AnalogResponse bessel4_lowpass(double f_hz, double atten_db = 3.0);

/// Second-order resonant low-pass w_r^2 / (s^2 + 2 zeta w_r s + w_r^2).
AnalogResponse resonant_lowpass(double resonance_hz, double damping);

/// Damping that puts the 3 dB point of resonant_lowpass(resonance_hz, .) at f3db_hz.
double resonant_damping_for_3db(double resonance_hz, double f3db_hz);

/// Zero-phase Gaussian exp(-2 pi^2 sigma^2 f^2) with the given RMS impulse width.
AnalogResponse gaussian_lowpass_sigma(double sigma_s);
/// Gaussian with |H(f_hz)| = 10^(-atten_db/20).
AnalogResponse gaussian_lowpass(double f_hz, double atten_db = 3.0);

AnalogResponse cascade(std::vector<AnalogResponse> stages);

/// Frequency where |H| first falls to `atten_db` below |H(0)|, by bisection on
/// [f_lo, f_hi]. Throws std::domain_error if no crossing is bracketed.
double attenuation_crossing(const AnalogResponse& h, double atten_db, double f_lo, double f_hi);

/// Same as above for a sampled response measured from FIR taps.
double attenuation_crossing(std::span<const FirFilter> cascade, double sample_rate, double atten_db,
                            double f_lo, double f_hi);

/// Discretizes an analog response at `sample_rate` by frequency sampling
/// (dense inverse DFT), then trims taps below `trim` relative to the peak.
/// `pre_taps` anti-causal taps are kept so zero-phase responses stay centred.
FirFilter design_fir(const AnalogResponse& h, double sample_rate, int pre_taps = 16,
                     int max_length = 256, double trim = 1e-9);

}  // namespace vlink
