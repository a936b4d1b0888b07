#pragma once

#include <span>
#include <vector>

namespace vlink {

struct BurgResult {
  std::vector<double> coefficients;  // a_1..a_p with e[k] = sum a_i e[k-i] + w[k]
  std::vector<double> reflection;    // k_1..k_p, |k_m| < 1
  double error_power = 0.0;
};

/// Burg's maximum-entropy AR estimate. Needs more than 10 * order samples and
/// nonzero variance.
BurgResult burg_ar(std::span<const double> e, int order);

}  // namespace vlink
