#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vlink/alphabet.hpp"

namespace vlink {

struct VnleConfig {
  int linear_taps = 201;
  int memory = 11;  // second-order window: m squares + (m - 1) adjacent products
  double mu_linear = 1e-3;
  double mu_nonlinear = 1e-4;
  double mu_bias = 1e-3;
  std::size_t training_symbols = 20000;
  int block = 1000;  // symbols per MSE-trace entry
  bool decision_directed = true;
};

/// Volterra equalizer restricted to the main and first super-diagonal of the
/// second-order kernel, adapted towards the duobinary target.
///
/// Feature layout for output k with window w = x[k - c .. k + c]:
///   [0, N)          linear: w[j] = x[k + j - c]
///   [N, N + m)      squares: x[k - i]^2, i = 0..m-1
///   [N + m, N+2m-1) products: x[k - i] x[k - i - 1], i = 0..m-2
/// Inputs are shifted by `input_offset` and scaled by `input_scale` first.
/// A separate bias coefficient absorbs the DC produced by the squared terms.
struct VnleState {
  std::vector<double> linear;
  std::vector<double> nonlinear;
  double bias = 0.0;
  int memory = 11;
  double input_offset = 0.0;
  double input_scale = 1.0;
  double mu_linear = 1e-3;
  double mu_nonlinear = 1e-4;
  double mu_bias = 1e-3;
  std::vector<double> targets;  // duobinary slicer grid

  int center() const { return static_cast<int>(linear.size()) / 2; }
  std::size_t feature_count() const { return linear.size() + nonlinear.size(); }

  /// Delta at the centre, zero nonlinear taps, unit input scaling.
  static VnleState identity(const Alphabet& a, int linear_taps = 201, int memory = 11);
  static VnleState create(const Alphabet& a, const VnleConfig& cfg);

  double slice(double y) const;
  bool finite() const;
};

/// Feature vector for one output; `window` holds linear_taps samples centred
/// on the current symbol.
std::vector<double> vnle_features(std::span<const double> window, int memory);

struct VnleTrainReport {
  double final_mse = 0.0;        // mean squared error over the last block
  double target_power = 0.0;
  std::vector<double> mse_trace;  // per block
};

/// Duobinary target of a known transmitted sequence: level(p[k]) + level(p[k-1]), p[-1] = p0.
std::vector<double> db_targets(const SymbolSeq& p, int p0 = 0);

/// LMS training against known targets. Sets the input normalization from
/// the training span. Throws std::runtime_error on divergence.
VnleState vnle_train(std::span<const double> x, std::span<const double> targets, VnleState st,
                     const VnleConfig& cfg, VnleTrainReport* report = nullptr);

struct VnleApplyOptions {
  bool adapt = false;                    // decision-directed LMS after `known`
  std::span<const double> known = {};    // data-aided targets for the first known.size() symbols
  /// When positive, decision-directed adaptation is abandoned (taps restored
  /// to their values at the end of `known`) once the running output power
  /// leaves [1/2, 2] x this, the sign of a collapsed or runaway equalizer.
  double reference_power = 0.0;
  /// Decision-directed adaptation starts only when the slicer error rate over
  /// the second half of `known` is at most this.
  double max_known_slicer_errors = 0.02;
};

std::vector<double> vnle_apply(std::span<const double> x, VnleState& st, const VnleApplyOptions& opt = {});

}  // namespace vlink
