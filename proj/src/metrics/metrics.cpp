#include "vlink/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vlink {

Interval wilson_interval(std::uint64_t k, std::uint64_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double den = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / den;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / den;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

BerEstimate ber_from_counts(std::uint64_t errors, std::uint64_t bits) {
  BerEstimate b;
  b.errors = errors;
  b.bits = bits;
  b.ber = bits ? static_cast<double>(errors) / static_cast<double>(bits) : 0.0;
  b.ci = wilson_interval(errors, bits);
  b.unreliable = errors < 100;
  return b;
}

BerEstimate& BerEstimate::operator+=(const BerEstimate& o) {
  *this = ber_from_counts(errors + o.errors, bits + o.bits);
  return *this;
}

BerEstimate ber(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx) {
  if (tx.size() != rx.size()) throw std::invalid_argument("ber: bit streams differ in length");
  std::uint64_t e = 0;
  for (std::size_t k = 0; k < tx.size(); ++k) e += (tx[k] != 0) != (rx[k] != 0);
  return ber_from_counts(e, tx.size());
}

SerEstimate ser(std::span<const int> tx, std::span<const int> rx) {
  if (tx.size() != rx.size()) throw std::invalid_argument("ser: symbol streams differ in length");
  SerEstimate s;
  for (std::size_t k = 0; k < tx.size(); ++k) s.errors += tx[k] != rx[k];
  s.symbols = tx.size();
  s.ser = s.symbols ? static_cast<double>(s.errors) / static_cast<double>(s.symbols) : 0.0;
  return s;
}

Kp4Verdict kp4_verdict(double pre_fec_ber, double baud_gbd, double bits_per_symbol) {
  if (!(pre_fec_ber >= 0.0 && pre_fec_ber <= 0.5)) throw std::domain_error("kp4_verdict: ber outside [0, 0.5]");
  return {pre_fec_ber <= kKp4Threshold, baud_gbd * bits_per_symbol * 514.0 / 544.0};
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("binary_entropy: p outside [0, 1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double inverse_binary_entropy(double h) {
  if (!(h >= 0.0 && h <= 1.0)) throw std::domain_error("inverse_binary_entropy: h outside [0, 1]");
  double lo = 0.0, hi = 0.5;
  for (int i = 0; i < 200 && hi - lo > 1e-18; ++i) {
    const double mid = 0.5 * (lo + hi);
    (binary_entropy(mid) < h ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double air_hd(double pre_fec_ber, double baud_gbd, double bits_per_symbol) {
  if (!(pre_fec_ber >= 0.0 && pre_fec_ber <= 0.5)) throw std::domain_error("air_hd: ber outside [0, 0.5]");
  return baud_gbd * bits_per_symbol * (1.0 - binary_entropy(pre_fec_ber));
}

BurstStats burst_stats(std::span<const int> tx, std::span<const int> rx) {
  if (tx.size() != rx.size()) throw std::invalid_argument("burst_stats: symbol streams differ in length");
  BurstStats b;
  std::uint64_t run = 0;
  auto close = [&] {
    if (run == 0) return;
    if (b.histogram.size() < run) b.histogram.resize(run, 0);
    ++b.histogram[run - 1];
    ++b.runs;
    b.max_run = std::max(b.max_run, run);
    run = 0;
  };
  for (std::size_t k = 0; k < tx.size(); ++k) {
    if (tx[k] != rx[k]) ++run;
    else close();
  }
  close();
  return b;
}

std::uint64_t EyeHistogram::total() const {
  std::uint64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

EyeHistogram eye_histogram(const Waveform& w, double baud, int bins_phase, int bins_amp,
                           std::optional<Interval> amp_range) {
  if (bins_phase < 1 || bins_amp < 1) throw std::invalid_argument("eye_histogram: bin counts must be positive");
  if (w.sample_rate < 2.0 * baud * (1.0 - 1e-9)) throw std::invalid_argument("eye_histogram: need >= 2 samples per UI");
  const double n_ui = static_cast<double>(w.size()) * baud / w.sample_rate;
  if (n_ui < 1000.0) throw std::invalid_argument("eye_histogram: need at least 1000 symbols");

  EyeHistogram eye;
  eye.bins_phase = bins_phase;
  eye.bins_amp = bins_amp;
  if (amp_range) {
    if (!(amp_range->hi > amp_range->lo)) throw std::invalid_argument("eye_histogram: empty amplitude range");
    eye.amp_min = amp_range->lo;
    eye.amp_max = amp_range->hi;
  } else {
    const auto [lo, hi] = std::minmax_element(w.samples.begin(), w.samples.end());
    eye.amp_min = *lo;
    eye.amp_max = *hi > *lo ? *hi : *lo + 1.0;
  }
  eye.counts.assign(static_cast<std::size_t>(bins_phase) * static_cast<std::size_t>(bins_amp), 0);
  const double amp_step = (eye.amp_max - eye.amp_min) / bins_amp;
  for (std::size_t k = 0; k < w.size(); ++k) {
    // Phase in UI, rounded to 1e-9 UI so integer-UI shifts of t0 map identically.
    const double ui = std::round(w.time_at(k) * baud * 1e9) / 1e9;
    const double frac = ui - std::floor(ui);
    const int pb = std::min(bins_phase - 1, static_cast<int>(std::floor(frac * bins_phase)));
    const double a = std::floor((w.samples[k] - eye.amp_min) / amp_step);
    const int ab = static_cast<int>(std::clamp(a, 0.0, static_cast<double>(bins_amp - 1)));
    ++eye.counts[static_cast<std::size_t>(pb) * static_cast<std::size_t>(bins_amp) + static_cast<std::size_t>(ab)];
  }
  return eye;
}

double rate_greater_pvalue(std::uint64_t e1, std::uint64_t n1, std::uint64_t e2, std::uint64_t n2) {
  if (n1 == 0 || n2 == 0) throw std::invalid_argument("rate_greater_pvalue: empty sample");
  const std::uint64_t n = e1 + e2;
  if (e1 == 0) return 1.0;
  const double p = static_cast<double>(n1) / static_cast<double>(n1 + n2);
  const double lp = std::log(p), lq = std::log1p(-p);
  const double lgn = std::lgamma(static_cast<double>(n) + 1.0);
  double sum = 0.0;
  for (std::uint64_t x = e1; x <= n; ++x) {
    const double xd = static_cast<double>(x);
    const double lt = lgn - std::lgamma(xd + 1.0) - std::lgamma(static_cast<double>(n - x) + 1.0) + xd * lp +
                      static_cast<double>(n - x) * lq;
    sum += std::exp(lt);
  }
  return std::min(1.0, sum);
}

MetricsReport make_report(std::span<const std::uint8_t> tx_bits, std::span<const std::uint8_t> rx_bits,
                          std::span<const int> tx_symbols, std::span<const int> rx_symbols, double baud_gbd,
                          double bits_per_symbol) {
  MetricsReport r;
  r.gross_rate_gbps = baud_gbd * bits_per_symbol;
  r.pre_fec_ber = ber(tx_bits, rx_bits);
  r.ser = ser(tx_symbols, rx_symbols);
  const double p = std::min(r.pre_fec_ber.ber, 0.5);
  const Kp4Verdict v = kp4_verdict(p, baud_gbd, bits_per_symbol);
  r.kp4_pass = v.pass;
  r.net_rate_kp4_gbps = v.pass ? v.net_gbps : 0.0;
  r.air_hd_gbps = air_hd(p, baud_gbd, bits_per_symbol);
  r.bursts = burst_stats(tx_symbols, rx_symbols);
  return r;
}

}  // namespace vlink
