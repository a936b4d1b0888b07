#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "vlink/alphabet.hpp"
#include "vlink/fir.hpp"
#include "vlink/waveform.hpp"

namespace vlink {

/// 5-bit word <-> PAM-6 symbol pair. The four pairs with both symbols on an
/// outer level, {(0,0), (0,5), (5,0), (5,5)}, are never sent; the remaining 32
/// pairs are taken in lexicographic order and word w maps to the w-th pair.
class Pam6PairCode {
 public:
  static const Pam6PairCode& instance();

  std::pair<int, int> encode(unsigned word) const;
  /// Unused pairs decode through the nearest used pair (Euclidean distance in
  /// index space, lexicographically smallest on ties).
  unsigned decode(int first, int second) const;
  static bool excluded(int first, int second);

 private:
  Pam6PairCode();
  std::array<std::pair<int, int>, 32> encode_{};
  std::array<unsigned, 36> decode_{};
};

/// PAM-4 Gray (00,01,11,10 -> 0..3) or PAM-6 pair coding, first bit = MSB.
SymbolSeq map_bits(std::span<const std::uint8_t> bits, const Alphabet& alphabet);
/// Inverse of map_bits.
std::vector<std::uint8_t> demap_symbols(const SymbolSeq& symbols);

/// p[k] = (s[k] - p[k-1]) mod M, p[-1] = p0.
SymbolSeq db_precode(const SymbolSeq& s, int p0 = 0);

/// The 2M-1 distinct values level(i) + level(j), ascending.
std::vector<double> db_target_levels(const Alphabet& alphabet);

struct PreskewConfig {
  std::vector<double> delays;  // per level, symbol periods, |d| <= 0.5; empty = all zero
  int interpolator_length = 9;
};

/// Upsampled symbol waveform (raw level units) in which every transition
/// into level i is delayed by delays[i] symbol periods through a windowed-sinc
/// fractional-delay FIR. With zero delays this is a zero-order hold.
Waveform apply_preskew(const SymbolSeq& s, const PreskewConfig& cfg, int sps, double baud);

struct DpdConfig {
  double boost = 0.2;  // a in [-a, 1 + 2a, -a]
};

/// Symbol-spaced 3-tap pre-emphasis with unit DC gain.
FirFilter dpd_filter(const DpdConfig& cfg);

struct TxConfig {
  Modulation modulation = Modulation::pam4;
  double baud = 106.25e9;
  int sps = 4;
  bool precoding = true;
  PreskewConfig preskew;
  DpdConfig dpd;
  std::optional<double> dac_rate;  // Hz; defaults to sps * baud
};

struct TxOutput {
  Waveform waveform;       // drive signal, outer levels at +-1 before DPD
  SymbolSeq data;          // mapped data symbols
  SymbolSeq transmitted;   // precoded sequence actually sent (== data without precoding)
  double gross_rate_gbps = 0.0;
};

TxOutput tx_chain(std::span<const std::uint8_t> bits, const TxConfig& cfg);

double gross_rate_gbps(Modulation m, double baud);

}  // namespace vlink
