#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "vlink/alphabet.hpp"
#include "vlink/burg.hpp"
#include "vlink/mlse.hpp"
#include "vlink/noise_canceler.hpp"
#include "vlink/timing.hpp"
#include "vlink/vnle.hpp"
#include "vlink/waveform.hpp"

namespace vlink {

enum class DspMode { vnle, vnle_mlse, vnle_nc_mlse };

std::string to_string(DspMode m);
DspMode dsp_mode_from_string(const std::string& name);

/// Failure inside one receiver stage.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct RxConfig {
  DspMode mode = DspMode::vnle_nc_mlse;
  bool precoding = true;
  TimingConfig timing;
  VnleConfig vnle;
  int nc_order = 3;
  int traceback = 32;
};

struct RxDiagnostics {
  double timing_phase_ui = 0.0;
  int timing_lag = 0;
  double timing_mse = 0.0;
  double train_mse = 0.0;
  double train_mse_db = 0.0;  // relative to target power
  std::vector<double> mse_trace;
  std::vector<double> linear_taps;
  std::vector<double> nonlinear_taps;
  std::vector<double> nc_taps;
  double nc_decision_error_rate = 0.0;
  std::vector<std::uint64_t> level_histogram;  // slicer hits per duobinary level
};

struct RxResult {
  SymbolSeq data;   // data-domain decisions
  std::vector<std::uint8_t> bits;
  std::vector<double> equalized;  // VNLE output (duobinary domain)
  VnleState trained;              // taps at the end of training, before decision-directed updates
  RxDiagnostics diag;
};

/// Timing recovery -> VNLE -> [NC] -> [MLSE | slicer] -> duobinary decode -> demap.
/// `training` is the transmitted (precoded) sequence, at least
/// cfg.vnle.training_symbols long. Errors are rethrown as StageError.
RxResult rx_chain(const Waveform& captured, const Alphabet& alphabet, double baud, std::size_t n_symbols,
                  const SymbolSeq& training, const RxConfig& cfg);

}  // namespace vlink
