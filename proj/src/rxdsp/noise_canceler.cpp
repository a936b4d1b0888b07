#include "vlink/noise_canceler.hpp"

#include <algorithm>
#include <stdexcept>

#include "vlink/burg.hpp"

namespace vlink {

NoiseCanceler nc_build(std::span<const double> y, std::span<const double> decisions, int order,
                       std::span<const double> truth) {
  if (y.size() != decisions.size()) throw std::invalid_argument("nc_build: y and decisions differ in length");
  NoiseCanceler nc;
  if (!truth.empty()) {
    if (truth.size() != decisions.size()) throw std::invalid_argument("nc_build: truth length mismatch");
    std::size_t wrong = 0;
    for (std::size_t k = 0; k < truth.size(); ++k) wrong += decisions[k] != truth[k];
    nc.decision_error_rate = static_cast<double>(wrong) / static_cast<double>(truth.size());
    if (nc.decision_error_rate > 0.2)
      throw std::domain_error("nc_build: slicer error rate above 20 %, noise estimate invalid");
  }

  std::vector<double> e(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) e[k] = y[k] - decisions[k];
  const BurgResult fwd = burg_ar(e, order);
  std::reverse(e.begin(), e.end());
  const BurgResult bwd = burg_ar(e, order);

  const auto o = static_cast<std::size_t>(order);
  std::vector<double> taps(2 * o + 1, 0.0);
  taps[o] = 1.0;
  for (std::size_t i = 1; i <= o; ++i) {
    taps[o + i] = -0.5 * fwd.coefficients[i - 1];  // acts on e[k - i]
    taps[o - i] = -0.5 * bwd.coefficients[i - 1];  // acts on e[k + i]
    nc.postcursor.push_back(taps[o + i]);
    nc.precursor.push_back(taps[o - i]);
  }
  nc.whitening = FirFilter(std::move(taps), order);
  return nc;
}

std::vector<double> nc_apply(std::span<const double> y, std::span<const double> decisions, const NoiseCanceler& nc) {
  if (y.size() != decisions.size()) throw std::invalid_argument("nc_apply: y and decisions differ in length");
  std::vector<double> e(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) e[k] = y[k] - decisions[k];
  std::vector<double> z = fir_apply(std::span<const double>(e), nc.whitening);
  for (std::size_t k = 0; k < z.size(); ++k) z[k] += decisions[k];
  return z;
}

}  // namespace vlink
