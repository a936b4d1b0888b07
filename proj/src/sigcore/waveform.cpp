#include "vlink/waveform.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace vlink {

Waveform::Waveform(double rate, std::vector<double> s, double start)
    : sample_rate(rate), samples(std::move(s)), t0(start) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw std::invalid_argument("sample rate must be positive");
}

void Waveform::check_finite(const char* stage) const {
  for (double v : samples)
    if (!std::isfinite(v)) throw std::domain_error(std::string(stage) + ": non-finite sample");
}

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double acc = 0.0;
  for (double v : x) acc += (v - m) * (v - m);
  return acc / static_cast<double>(x.size());
}

double rms(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc / static_cast<double>(x.size()));
}

}  // namespace vlink
