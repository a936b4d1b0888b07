#include "vlink/burg.hpp"

#include <stdexcept>

#include "vlink/waveform.hpp"

namespace vlink {

BurgResult burg_ar(std::span<const double> e, int order) {
  if (order < 1) throw std::invalid_argument("burg_ar: order must be >= 1");
  const std::size_t n = e.size();
  if (n <= static_cast<std::size_t>(10 * order)) throw std::invalid_argument("burg_ar: need more than 10*order samples");
  if (!(variance(e) > 0.0)) throw std::domain_error("burg_ar: constant input");

  std::vector<double> f(e.begin(), e.end());
  std::vector<double> b(e.begin(), e.end());
  // Prediction-error filter 1 + sum alpha_i z^-i.
  std::vector<double> alpha(static_cast<std::size_t>(order) + 1, 0.0);
  alpha[0] = 1.0;

  BurgResult res;
  double power = 0.0;
  for (double v : e) power += v * v;
  power /= static_cast<double>(n);

  for (int m = 1; m <= order; ++m) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = static_cast<std::size_t>(m); k < n; ++k) {
      num += f[k] * b[k - 1];
      den += f[k] * f[k] + b[k - 1] * b[k - 1];
    }
    const double km = -2.0 * num / den;
    res.reflection.push_back(km);

    std::vector<double> prev(alpha);
    for (int i = 1; i <= m; ++i) alpha[static_cast<std::size_t>(i)] = prev[static_cast<std::size_t>(i)] + km * prev[static_cast<std::size_t>(m - i)];

    for (std::size_t k = n - 1; k >= static_cast<std::size_t>(m); --k) {
      const double fk = f[k];
      f[k] = fk + km * b[k - 1];
      b[k] = b[k - 1] + km * fk;
    }
    power *= 1.0 - km * km;
  }
  for (int i = 1; i <= order; ++i) res.coefficients.push_back(-alpha[static_cast<std::size_t>(i)]);
  res.error_power = power;
  return res;
}

}  // namespace vlink
