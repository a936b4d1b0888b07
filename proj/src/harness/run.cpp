#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "vlink/harness.hpp"
#include "vlink/prbs.hpp"
#include "vlink/random.hpp"
#include "vlink/timing.hpp"
#include "vlink/txdsp.hpp"

namespace vlink {

using nlohmann::json;

RxConfig rx_config(const LinkConfig& c) {
  RxConfig r;
  r.mode = c.dsp.mode;
  r.precoding = c.dsp.precoding;
  r.timing.phases = c.dsp.timing_phases;
  r.timing.genie_phase = c.dsp.genie_phase;
  r.vnle.linear_taps = c.dsp.vnle_linear_taps;
  r.vnle.memory = c.dsp.vnle_memory;
  r.vnle.mu_linear = c.dsp.mu_linear;
  r.vnle.mu_nonlinear = c.dsp.mu_nonlinear;
  r.vnle.mu_bias = c.dsp.mu_bias;
  r.vnle.training_symbols = c.dsp.training_symbols;
  r.vnle.decision_directed = c.dsp.decision_directed;
  r.nc_order = c.dsp.nc_order;
  r.traceback = c.dsp.traceback;
  return r;
}

TxConfig tx_config(const LinkConfig& c) {
  TxConfig t;
  t.modulation = c.modulation;
  t.baud = c.baud_gbd * 1e9;
  t.sps = c.sps_sim;
  t.precoding = c.dsp.precoding;
  t.preskew.delays = c.dsp.preskew_delays;
  t.dpd.boost = c.dsp.dpd_boost;
  return t;
}

namespace {

constexpr int kEyePhases = 32;
constexpr std::size_t kEyeSymbols = 4000;

// Trained equalizer swept over kEyePhases sampling offsets spanning one UI
// around the recovered phase; the decision instant lands in the middle bin.
EyeHistogram render_eye(const Waveform& captured, const RxResult& rx, double baud, std::size_t start) {
  const std::size_t n = start + kEyeSymbols;
  std::vector<double> interleaved(kEyeSymbols * kEyePhases);
  for (int j = 0; j < kEyePhases; ++j) {
    const double offset = static_cast<double>(j) / kEyePhases - 0.5;
    const Waveform s = sample_at_phase(captured, baud, n, rx.diag.timing_phase_ui + offset, rx.diag.timing_lag);
    VnleState st = rx.trained;
    const std::vector<double> y = vnle_apply(s.samples, st);
    for (std::size_t k = 0; k < kEyeSymbols; ++k)
      interleaved[k * kEyePhases + static_cast<std::size_t>(j)] = y[start + k];
  }
  // Sample j of symbol k sits at (k + j / P) UI; bin P/2 is the decision instant.
  const Waveform eye_w(baud * kEyePhases, std::move(interleaved), 0.0);
  const double span = rx.trained.targets.back() - rx.trained.targets.front();
  return eye_histogram(eye_w, baud, kEyePhases, 128,
                       Interval{rx.trained.targets.front() - 0.25 * span, rx.trained.targets.back() + 0.25 * span});
}

PointResult run_once(const LinkConfig& cfg, std::size_t symbols) {
  PointResult res;
  res.config = cfg;
  res.symbols = symbols;
  const Alphabet alphabet = Alphabet::of(cfg.modulation);
  const double baud = cfg.baud_gbd * 1e9;
  const std::size_t start = cfg.dsp.training_symbols + kGuardSymbols;
  const std::size_t n_total = start + symbols + kGuardSymbols;
  const std::size_t n_bits = alphabet.order() == 4 ? 2 * n_total : n_total / 2 * 5;

  std::string stage = "tx";
  try {
    const auto bits = prbs_bits(31, derive_seed(cfg.seed, SeedStream::data) | 1u, n_bits);
    const TxOutput tx = tx_chain(bits, tx_config(cfg));
    stage = "channel";
    res.rx_3db_hz = cfg.link.bandwidths.rx_3db > 0.0 ? cfg.link.bandwidths.rx_3db
                                                     : calibrate_rx_bw(cfg.link.bandwidths, cfg.link.vcsel);
    LinkModelConfig link = cfg.link;
    link.bandwidths.rx_3db = res.rx_3db_hz;
    const Waveform captured = simulate_channel(tx.waveform, link, alphabet.order(), baud, cfg.seed);
    stage = "rx";
    const RxResult rx = rx_chain(captured, alphabet, baud, n_total, tx.transmitted, rx_config(cfg));
    res.diag = rx.diag;

    stage = "metrics";
    const auto first = static_cast<std::ptrdiff_t>(start);
    const auto last = static_cast<std::ptrdiff_t>(start + symbols);
    const SymbolSeq ts(alphabet, std::vector<int>(tx.data.indices.begin() + first, tx.data.indices.begin() + last));
    const SymbolSeq rs(alphabet, std::vector<int>(rx.data.indices.begin() + first, rx.data.indices.begin() + last));
    const auto tb = demap_symbols(ts);
    const auto rb = demap_symbols(rs);
    res.report = make_report(tb, rb, ts.indices, rs.indices, cfg.baud_gbd, alphabet.bits_per_symbol());
    if (cfg.capture_eye) {
      stage = "eye";
      res.eye = render_eye(captured, rx, baud, start);
    }
    res.ok = true;
  } catch (const StageError& e) {
    res.error = e.what();
    res.error_stage = e.stage();
  } catch (const std::exception& e) {
    res.error = e.what();
    res.error_stage = stage;
  }
  return res;
}

// Points whose interval reaches within a decade of the KP4 threshold.
bool near_threshold(const BerEstimate& b) {
  return b.ci.hi >= kKp4Threshold / 10.0 && b.ci.lo <= kKp4Threshold * 10.0;
}

}  // namespace

PointResult run_point(const LinkConfig& cfg) {
  validate(cfg);
  PointResult res = run_once(cfg, cfg.symbols);
  if (cfg.auto_extend && res.ok && res.report.pre_fec_ber.errors < 100 && near_threshold(res.report.pre_fec_ber)) {
    const std::uint64_t e = std::max<std::uint64_t>(res.report.pre_fec_ber.errors, 1);
    const int factor = static_cast<int>(std::min<std::uint64_t>(4, (100 + e - 1) / e));
    if (factor > 1) {
      std::size_t symbols = cfg.symbols * static_cast<std::size_t>(factor);
      PointResult ext = run_once(cfg, symbols);
      if (ext.ok) {
        ext.extend_factor = factor;
        ext.extend_capped = factor == 4 && ext.report.pre_fec_ber.errors < 100;
        res = std::move(ext);
      }
    }
  }
  return res;
}

std::vector<SweepPoint> expand_sweep(const SweepSpec& spec) {
  if (spec.repeats < 1) throw ConfigError("repeats", "must be >= 1");
  const json base = to_json(spec.base);
  std::size_t combos = 1;
  for (std::size_t a = 0; a < spec.axes.size(); ++a) {
    if (spec.axes[a].values.empty())
      throw ConfigError("axes[" + std::to_string(a) + "].values", "must not be empty");
    combos *= spec.axes[a].values.size();
  }
  std::vector<SweepPoint> points;
  points.reserve(combos * spec.repeats);
  std::vector<std::size_t> idx(spec.axes.size(), 0);
  for (std::size_t c = 0; c < combos; ++c) {
    std::size_t rem = c;
    for (std::size_t a = spec.axes.size(); a-- > 0;) {
      idx[a] = rem % spec.axes[a].values.size();
      rem /= spec.axes[a].values.size();
    }
    json patch = json::object();
    json coords = json::object();
    for (std::size_t a = 0; a < spec.axes.size(); ++a) {
      const auto& axis = spec.axes[a];
      const json& value = axis.values[idx[a]];
      coords[axis.path] = value;
      json::json_pointer ptr("/" + [&] {
        std::string p = axis.path;
        std::replace(p.begin(), p.end(), '.', '/');
        return p;
      }());
      if (!base.contains(ptr)) throw ConfigError(axis.path, "unknown sweep axis path");
      patch[ptr] = value;
    }
    for (std::size_t r = 0; r < spec.repeats; ++r) {
      SweepPoint pt;
      pt.index = points.size();
      pt.coordinates = coords;
      if (spec.repeats > 1) pt.coordinates["repeat"] = r;
      patch["seed"] = spec.base_seed ^ (static_cast<std::uint64_t>(pt.index) * 0x9E3779B97F4A7C15ULL);
      try {
        pt.config = config_from_json(patch, spec.base);
      } catch (const ConfigError& e) {
        throw ConfigError(e.path(), std::string("point ") + std::to_string(pt.index) + ": " + e.what());
      }
      points.push_back(std::move(pt));
    }
  }
  return points;
}

std::vector<PointResult> run_sweep(const SweepSpec& spec, int parallelism) {
  const std::vector<SweepPoint> points = expand_sweep(spec);
  std::vector<PointResult> results(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      results[i] = run_point(points[i].config);
      results[i].index = points[i].index;
      results[i].coordinates = points[i].coordinates;
    }
  };
  const int n = std::max(1, std::min<int>(parallelism, static_cast<int>(points.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace vlink
