#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vlink/resample.hpp"
#include "vlink/txdsp.hpp"

namespace vlink {

namespace {

// Windowed-sinc fractional delay of `delay` samples, unit DC gain.
std::vector<double> fractional_delay(double delay, int length) {
  std::vector<double> h(static_cast<std::size_t>(length));
  const int c = (length - 1) / 2;
  const double half = c + 1.0;
  double s = 0.0;
  for (int j = 0; j < length; ++j) {
    const double t = j - c - delay;
    const double sinc = std::abs(t) < 1e-12 ? 1.0 : std::sin(std::numbers::pi * t) / (std::numbers::pi * t);
    const double x = (j - c - delay) / half;
    const double win = std::abs(x) < 1.0 ? 0.5 + 0.5 * std::cos(std::numbers::pi * x) : 0.0;
    h[static_cast<std::size_t>(j)] = sinc * win;
    s += h[static_cast<std::size_t>(j)];
  }
  for (auto& v : h) v /= s;
  return h;
}

}  // namespace

Waveform apply_preskew(const SymbolSeq& s, const PreskewConfig& cfg, int sps, double baud) {
  const int m = s.alphabet.order();
  if (sps < 1) throw std::invalid_argument("preskew: sps must be >= 1");
  if (cfg.interpolator_length < 1 || cfg.interpolator_length % 2 == 0)
    throw std::invalid_argument("preskew: interpolator length must be odd");
  std::vector<double> delays(static_cast<std::size_t>(m), 0.0);
  if (!cfg.delays.empty()) {
    if (static_cast<int>(cfg.delays.size()) != m) throw std::invalid_argument("preskew: need one delay per level");
    delays = cfg.delays;
  }
  bool any = false;
  for (double d : delays) {
    if (!std::isfinite(d) || std::abs(d) > 0.5) throw std::invalid_argument("preskew: |delay| must be <= 0.5 UI");
    any = any || d != 0.0;
  }
  if (any && sps < 2) throw std::invalid_argument("preskew: nonzero delays need sps >= 2");

  std::vector<std::vector<double>> bank;
  for (double d : delays) bank.push_back(fractional_delay(d * sps, cfg.interpolator_length));
  const int c = (cfg.interpolator_length - 1) / 2;

  const std::size_t n = s.size() * static_cast<std::size_t>(sps);
  std::vector<double> steps(n, 0.0);
  double prev = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double a = s.alphabet.level(s[k]);
    const double jump = a - prev;
    prev = a;
    if (jump == 0.0) continue;
    const auto& h = bank[static_cast<std::size_t>(s[k])];
    const auto base = static_cast<std::ptrdiff_t>(k) * sps - c;
    for (int j = 0; j < cfg.interpolator_length; ++j) {
      // Taps that land before the first sample still belong to the step.
      const std::ptrdiff_t i = std::max<std::ptrdiff_t>(base + j, 0);
      if (i < static_cast<std::ptrdiff_t>(n)) steps[static_cast<std::size_t>(i)] += jump * h[static_cast<std::size_t>(j)];
    }
  }
  double acc = 0.0;
  for (auto& v : steps) {
    acc += v;
    v = acc;
  }
  return Waveform(baud * sps, std::move(steps), 0.0);
}

FirFilter dpd_filter(const DpdConfig& cfg) {
  if (!std::isfinite(cfg.boost) || cfg.boost < 0.0) throw std::invalid_argument("DPD boost must be >= 0");
  const double a = cfg.boost;
  return FirFilter({-a, 1.0 + 2.0 * a, -a}, 1);
}

double gross_rate_gbps(Modulation m, double baud) { return baud * Alphabet::of(m).bits_per_symbol() / 1e9; }

TxOutput tx_chain(std::span<const std::uint8_t> bits, const TxConfig& cfg) {
  if (!(cfg.baud > 0.0)) throw std::invalid_argument("tx: baud must be positive");
  const Alphabet alphabet = Alphabet::of(cfg.modulation);
  SymbolSeq data = map_bits(bits, alphabet);
  SymbolSeq sent = cfg.precoding ? db_precode(data, 0) : data;

  Waveform w = apply_preskew(sent, cfg.preskew, cfg.sps, cfg.baud);
  const double norm = 1.0 / (alphabet.order() - 1);
  for (auto& v : w.samples) v *= norm;
  w = fir_apply(w, dpd_filter(cfg.dpd).upsampled(cfg.sps));
  if (cfg.dac_rate && *cfg.dac_rate != w.sample_rate) w = resample(w, *cfg.dac_rate);

  return TxOutput{std::move(w), std::move(data), std::move(sent), gross_rate_gbps(cfg.modulation, cfg.baud)};
}

}  // namespace vlink
