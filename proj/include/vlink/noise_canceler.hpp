#pragma once

#include <span>
#include <vector>

#include "vlink/fir.hpp"

namespace vlink {

/// Feed-forward noise cancellation. The noise estimate e = y - d is run
/// through a two-sided whitening FIR with a fixed unit centre tap and `order`
/// learned taps on each side, then added back to the decisions.
struct NoiseCanceler {
  FirFilter whitening;           // 2 * order + 1 taps, centre = order
  std::vector<double> precursor;   // taps on e[k + i], i = 1..order
  std::vector<double> postcursor;  // taps on e[k - i], i = 1..order
  double decision_error_rate = 0.0;  // against `truth`, when supplied

  std::size_t learned_taps() const { return precursor.size() + postcursor.size(); }
};

/// Forward Burg on e gives the post-cursor side, Burg on reversed e the
/// pre-cursor side; each side is the negated prediction polynomial, halved.
/// With `truth` supplied, throws std::domain_error when more than 20 % of
/// the decisions are wrong.
NoiseCanceler nc_build(std::span<const double> y, std::span<const double> decisions, int order = 3,
                       std::span<const double> truth = {});

std::vector<double> nc_apply(std::span<const double> y, std::span<const double> decisions,
                             const NoiseCanceler& nc);

}  // namespace vlink
