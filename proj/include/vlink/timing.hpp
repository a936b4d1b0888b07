#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "vlink/alphabet.hpp"
#include "vlink/waveform.hpp"

namespace vlink {

struct TimingConfig {
  int phases = 16;          // grid points per UI before parabolic refinement
  int scratch_taps = 21;    // least-squares probe equalizer
  int max_lag = 64;         // symbols of channel delay searched
  std::size_t window = 16384;  // training symbols used by the probe
  std::optional<double> genie_phase;  // UI; bypasses the phase search
  std::optional<int> genie_lag;
};

struct TimingResult {
  Waveform output;  // 1 sample per symbol, output[k] aligned with symbol k
  double phase_ui = 0.0;
  int lag = 0;
  double mse = 0.0;  // probe-equalizer MSE at the chosen phase, relative to target power
  std::vector<double> phase_mse;
};

/// Training-aided sampling-phase search. Sample k of the output is taken at
/// absolute time (k + lag + phase) / baud. For each grid phase, the lag is the
/// peak of the correlation against the training levels and a short LS
/// equalizer is fitted to the duobinary target; the phase with the lowest
/// MSE is refined by a parabola through its neighbours.
TimingResult timing_recover(const Waveform& w, const SymbolSeq& training, double baud, std::size_t n_symbols,
                            const TimingConfig& cfg = {});

/// Sampling at a fixed absolute phase and lag.
Waveform sample_at_phase(const Waveform& w, double baud, std::size_t n_symbols, double phase_ui, int lag);

}  // namespace vlink
