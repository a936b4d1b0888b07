#include "vlink/mlse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace vlink {

SymbolSeq mlse_detect(std::span<const double> z, const TrellisSpec& spec) {
  const int m = spec.alphabet.order();
  const auto ms = static_cast<std::size_t>(m);
  if (spec.traceback < 1) throw std::invalid_argument("mlse: traceback must be >= 1");
  const std::size_t n = z.size();
  const auto depth = static_cast<std::size_t>(spec.traceback);

  std::vector<double> target(ms * ms);  // [i * m + j]: previous j -> current i
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) target[static_cast<std::size_t>(i * m + j)] = spec.alphabet.level(i) + spec.alphabet.level(j);

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> pm(ms, 0.0), next(ms);
  if (spec.initial_state) {
    if (*spec.initial_state < 0 || *spec.initial_state >= m) throw std::out_of_range("mlse: initial state");
    std::fill(pm.begin(), pm.end(), inf);
    pm[static_cast<std::size_t>(*spec.initial_state)] = 0.0;
  }

  std::vector<std::uint8_t> survivor(n * ms);
  std::vector<int> out(n, 0);
  auto best_state = [&](const std::vector<double>& metric) {
    std::size_t b = 0;
    for (std::size_t s = 1; s < ms; ++s)
      if (metric[s] < metric[b]) b = s;
    return b;
  };
  auto trace = [&](std::size_t k, std::size_t s, std::size_t steps) {
    for (std::size_t t = 0; t < steps; ++t) s = survivor[(k - t) * ms + s];
    return s;
  };

  for (std::size_t k = 0; k < n; ++k) {
    const double zk = z[k];
    std::uint8_t* surv = &survivor[k * ms];
    for (std::size_t i = 0; i < ms; ++i) {
      double best = inf;
      std::uint8_t arg = 0;
      for (std::size_t j = 0; j < ms; ++j) {
        const double d = zk - target[i * ms + j];
        const double cand = pm[j] + d * d;
        if (cand < best) {
          best = cand;
          arg = static_cast<std::uint8_t>(j);
        }
      }
      next[i] = best;
      surv[i] = arg;
    }
    const double lo = *std::min_element(next.begin(), next.end());
    for (std::size_t i = 0; i < ms; ++i) pm[i] = next[i] - lo;

    if (k >= depth) {
      // Decide symbol k - depth from the current best state.
      out[k - depth] = static_cast<int>(trace(k, best_state(pm), depth));
    }
  }
  if (n > 0) {
    std::size_t s = best_state(pm);
    const std::size_t undecided = std::min(n, depth + 1);
    for (std::size_t t = 0; t < undecided; ++t) {
      const std::size_t k = n - 1 - t;
      out[k] = static_cast<int>(s);
      if (k > 0) s = survivor[k * ms + s];
    }
  }
  return SymbolSeq(spec.alphabet, std::move(out));
}

SymbolSeq db_decode(const SymbolSeq& p, int p0) {
  const int m = p.alphabet.order();
  std::vector<int> s(p.size());
  int prev = p0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    s[k] = (p[k] + prev) % m;
    prev = p[k];
  }
  return SymbolSeq(p.alphabet, std::move(s));
}

int db_slice_index(double y, int order) {
  const double q = std::round((y + 2.0 * (order - 1)) / 2.0);
  return static_cast<int>(std::clamp(q, 0.0, 2.0 * (order - 1)));
}

}  // namespace vlink
