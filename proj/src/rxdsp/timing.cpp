#include "vlink/timing.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "vlink/resample.hpp"
#include "vlink/vnle.hpp"

namespace vlink {

namespace {

// Stream sampled at absolute times (j + phase) / baud for j in [first, first + count).
std::vector<double> sample_stream(const Waveform& w, const FractionalInterpolator& interp, double baud,
                                  double phase, long first, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = (static_cast<double>(first + static_cast<long>(i)) + phase) / baud;
    out[i] = interp.at(w.samples, (t - w.t0) * w.sample_rate);
  }
  return out;
}

struct Probe {
  int lag = 0;
  double mse = 0.0;
};

// Lag by correlation with the training levels, then LS fit of a short
// equalizer to the duobinary target.
Probe probe_phase(const Waveform& w, const FractionalInterpolator& interp, double baud, double phase,
                  std::span<const double> levels, std::span<const double> targets, const TimingConfig& cfg) {
  const long min_lag = -8;
  const int half = cfg.scratch_taps / 2;
  const std::size_t n = levels.size();
  const long first = min_lag - half - 1;
  const std::size_t count = n + static_cast<std::size_t>(cfg.max_lag - min_lag + 2 * half + 2);
  std::vector<double> x = sample_stream(w, interp, baud, phase, first, count);
  const double m = mean(x);
  for (auto& v : x) v -= m;
  auto at = [&](long j) { return x[static_cast<std::size_t>(j - first)]; };

  Probe best;
  double best_corr = -std::numeric_limits<double>::infinity();
  for (long lag = min_lag; lag <= cfg.max_lag; ++lag) {
    double c = 0.0;
    for (std::size_t k = 0; k < n; ++k) c += at(static_cast<long>(k) + lag) * levels[k];
    if (c > best_corr) {
      best_corr = c;
      best.lag = static_cast<int>(lag);
    }
  }

  // Taps k - half - 1 .. k + half sit symmetrically about the duobinary
  // target's centre at k - 1/2, so a symmetric channel gives a symmetric curve.
  const int ntaps = 2 * half + 2;
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(ntaps, ntaps);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(ntaps);
  Eigen::VectorXd u(ntaps);
  double tpow = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    for (int t = 0; t < ntaps; ++t) u[t] = at(static_cast<long>(k) + best.lag + t - half - 1);
    r.selfadjointView<Eigen::Lower>().rankUpdate(u);
    p += targets[k] * u;
    tpow += targets[k] * targets[k];
  }
  r = r.selfadjointView<Eigen::Lower>();
  r.diagonal().array() += 1e-9 * r.trace() / ntaps;
  const Eigen::VectorXd c = r.ldlt().solve(p);
  // Residual energy of the LS fit: |d|^2 - p'c.
  best.mse = std::max(0.0, (tpow - p.dot(c)) / tpow);
  return best;
}

}  // namespace

Waveform sample_at_phase(const Waveform& w, double baud, std::size_t n_symbols, double phase_ui, int lag) {
  const FractionalInterpolator interp(8, 0.9);
  auto s = sample_stream(w, interp, baud, phase_ui, lag, n_symbols);
  return Waveform(baud, std::move(s), (lag + phase_ui) / baud);
}

TimingResult timing_recover(const Waveform& w, const SymbolSeq& training, double baud, std::size_t n_symbols,
                            const TimingConfig& cfg) {
  if (training.size() < 256) throw std::invalid_argument("timing recovery needs at least 256 training symbols");
  if (w.sample_rate < baud * (1.0 - 1e-9)) throw std::invalid_argument("timing recovery needs >= 1 sample per symbol");
  if (cfg.phases < 3) throw std::invalid_argument("timing recovery needs >= 3 phases");

  const std::size_t n = std::min(cfg.window, training.size());
  std::vector<double> levels(n);
  for (std::size_t k = 0; k < n; ++k) levels[k] = training.alphabet.level(training[k]);
  const SymbolSeq head(training.alphabet, std::vector<int>(training.indices.begin(), training.indices.begin() + static_cast<std::ptrdiff_t>(n)));
  const std::vector<double> targets = db_targets(head);

  const FractionalInterpolator interp(8, 0.9);
  TimingResult res;
  if (cfg.genie_phase) {
    res.phase_ui = *cfg.genie_phase - std::floor(*cfg.genie_phase);
    const Probe pr = probe_phase(w, interp, baud, res.phase_ui, levels, targets, cfg);
    res.lag = cfg.genie_lag ? *cfg.genie_lag : pr.lag;
    res.mse = pr.mse;
  } else {
    res.phase_mse.resize(static_cast<std::size_t>(cfg.phases));
    for (int j = 0; j < cfg.phases; ++j)
      res.phase_mse[static_cast<std::size_t>(j)] =
          probe_phase(w, interp, baud, static_cast<double>(j) / cfg.phases, levels, targets, cfg).mse;
    const auto jbest = static_cast<int>(std::min_element(res.phase_mse.begin(), res.phase_mse.end()) - res.phase_mse.begin());
    const double m0 = res.phase_mse[static_cast<std::size_t>((jbest + cfg.phases - 1) % cfg.phases)];
    const double m1 = res.phase_mse[static_cast<std::size_t>(jbest)];
    const double m2 = res.phase_mse[static_cast<std::size_t>((jbest + 1) % cfg.phases)];
    const double den = m0 - 2.0 * m1 + m2;
    double delta = den > 0.0 ? 0.5 * (m0 - m2) / den : 0.0;
    delta = std::clamp(delta, -0.5, 0.5);
    double phase = (jbest + delta) / cfg.phases;
    res.phase_ui = phase - std::floor(phase);
    const Probe pr = probe_phase(w, interp, baud, res.phase_ui, levels, targets, cfg);
    res.lag = pr.lag;
    res.mse = pr.mse;
  }
  auto s = sample_stream(w, interp, baud, res.phase_ui, res.lag, n_symbols);
  res.output = Waveform(baud, std::move(s), (res.lag + res.phase_ui) / baud);
  return res;
}

}  // namespace vlink
