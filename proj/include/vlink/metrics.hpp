#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vlink/alphabet.hpp"
#include "vlink/waveform.hpp"

namespace vlink {

inline constexpr double kKp4Threshold = 2.2e-4;
inline constexpr double kKp4CodeRate = 514.0 / 544.0;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval for k successes in n trials.
Interval wilson_interval(std::uint64_t k, std::uint64_t n, double z = 1.959963984540054);

struct BerEstimate {
  std::uint64_t errors = 0;
  std::uint64_t bits = 0;
  double ber = 0.0;
  Interval ci;
  bool unreliable = true;  // fewer than 100 errors

  /// Sums counts; never averages rates.
  BerEstimate& operator+=(const BerEstimate& o);
};

BerEstimate ber_from_counts(std::uint64_t errors, std::uint64_t bits);
/// Throws std::invalid_argument on length mismatch.
BerEstimate ber(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx);

struct SerEstimate {
  std::uint64_t errors = 0;
  std::uint64_t symbols = 0;
  double ser = 0.0;
};
SerEstimate ser(std::span<const int> tx, std::span<const int> rx);

struct Kp4Verdict {
  bool pass = false;
  double net_gbps = 0.0;  // baud * bits/symbol * 514/544, whatever the verdict
};

/// pass iff ber <= 2.2e-4.
Kp4Verdict kp4_verdict(double pre_fec_ber, double baud_gbd, double bits_per_symbol);

/// Binary entropy in bits, H2(0) = H2(1) = 0.
double binary_entropy(double p);
/// p in [0, 0.5] with H2(p) = h.
double inverse_binary_entropy(double h);

/// Hard-decision AIR in Gb/s: baud * bits/symbol * (1 - H2(ber)).
double air_hd(double pre_fec_ber, double baud_gbd, double bits_per_symbol);

struct BurstStats {
  std::vector<std::uint64_t> histogram;  // histogram[L - 1] = runs of length L
  std::uint64_t runs = 0;
  std::uint64_t max_run = 0;
};

BurstStats burst_stats(std::span<const int> tx, std::span<const int> rx);

struct EyeHistogram {
  int bins_phase = 0;
  int bins_amp = 0;
  double amp_min = 0.0;
  double amp_max = 0.0;
  std::vector<std::uint64_t> counts;  // [phase * bins_amp + amp]

  std::uint64_t at(int phase, int amp) const {
    return counts[static_cast<std::size_t>(phase) * static_cast<std::size_t>(bins_amp) + static_cast<std::size_t>(amp)];
  }
  std::uint64_t total() const;
};

/// Folds samples modulo one UI. Bins are left-closed [lo, hi); samples at
/// or beyond the upper amplitude edge land in the last bin and those below
/// the lower edge in the first, so every sample is counted. Without an
/// explicit range the observed min..max is used.
EyeHistogram eye_histogram(const Waveform& w, double baud, int bins_phase = 64, int bins_amp = 128,
                           std::optional<Interval> amp_range = std::nullopt);

/// One-sided exact conditional binomial test of H0 "equal error rates"
/// against "rate 1 > rate 2": P(X >= e1), X ~ Bin(e1 + e2, n1 / (n1 + n2)).
double rate_greater_pvalue(std::uint64_t e1, std::uint64_t n1, std::uint64_t e2, std::uint64_t n2);

struct MetricsReport {
  double gross_rate_gbps = 0.0;
  BerEstimate pre_fec_ber;
  SerEstimate ser;
  bool kp4_pass = false;
  double net_rate_kp4_gbps = 0.0;  // 0 when failing
  double air_hd_gbps = 0.0;
  BurstStats bursts;
};

MetricsReport make_report(std::span<const std::uint8_t> tx_bits, std::span<const std::uint8_t> rx_bits,
                          std::span<const int> tx_symbols, std::span<const int> rx_symbols, double baud_gbd,
                          double bits_per_symbol);

}  // namespace vlink
