#pragma once

#include <optional>
#include <span>

#include "vlink/alphabet.hpp"

namespace vlink {

/// Duobinary trellis: one state per previous transmitted symbol, branch j -> i
/// labelled level(i) + level(j).
struct TrellisSpec {
  Alphabet alphabet = Alphabet::pam(4);
  int traceback = 32;
  std::optional<int> initial_state = 0;  // nullopt = unknown start
};

/// Viterbi detection with squared-Euclidean branch metrics and a sliding
/// traceback window. Ties go to the smaller state index.
SymbolSeq mlse_detect(std::span<const double> z, const TrellisSpec& spec);

/// s[k] = (p[k] + p[k-1]) mod M, p[-1] = p0.
SymbolSeq db_decode(const SymbolSeq& p, int p0 = 0);

/// Index q = i + j of the nearest duobinary level 2q - 2(M-1).
int db_slice_index(double y, int order);

}  // namespace vlink
