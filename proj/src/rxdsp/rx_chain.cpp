#include "vlink/rxdsp.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>

#include "vlink/txdsp.hpp"

namespace vlink {

std::string to_string(DspMode m) {
  switch (m) {
    case DspMode::vnle: return "vnle";
    case DspMode::vnle_mlse: return "vnle_mlse";
    case DspMode::vnle_nc_mlse: return "vnle_nc_mlse";
  }
  throw std::invalid_argument("unknown DSP mode");
}

DspMode dsp_mode_from_string(const std::string& name) {
  if (name == "vnle") return DspMode::vnle;
  if (name == "vnle_mlse") return DspMode::vnle_mlse;
  if (name == "vnle_nc_mlse") return DspMode::vnle_nc_mlse;
  throw std::invalid_argument("unknown DSP mode '" + name + "' (expected vnle, vnle_mlse or vnle_nc_mlse)");
}

namespace {

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

}  // namespace

RxResult rx_chain(const Waveform& captured, const Alphabet& alphabet, double baud, std::size_t n_symbols,
                  const SymbolSeq& training, const RxConfig& cfg) {
  const std::size_t n_train = cfg.vnle.training_symbols;
  if (training.size() < n_train) throw std::invalid_argument("rx_chain: training sequence shorter than training_symbols");
  if (n_symbols < n_train) throw std::invalid_argument("rx_chain: fewer symbols than the training span");
  if (!(training.alphabet == alphabet)) throw std::invalid_argument("rx_chain: training alphabet mismatch");
  const int m = alphabet.order();

  RxResult res{SymbolSeq(alphabet, {}), {}, {}, {}, {}};
  RxDiagnostics& dg = res.diag;

  const SymbolSeq train(alphabet, std::vector<int>(training.indices.begin(),
                                                   training.indices.begin() + static_cast<std::ptrdiff_t>(n_train)));
  const TimingResult tr = stage("timing", [&] {
    captured.check_finite("timing");
    return timing_recover(captured, train, baud, n_symbols, cfg.timing);
  });
  dg.timing_phase_ui = tr.phase_ui;
  dg.timing_lag = tr.lag;
  dg.timing_mse = tr.mse;

  const std::vector<double> targets = db_targets(train);
  std::vector<double> y = stage("vnle", [&] {
    VnleTrainReport rep;
    VnleState st = vnle_train(tr.output.samples, targets, VnleState::create(alphabet, cfg.vnle), cfg.vnle, &rep);
    dg.train_mse = rep.final_mse;
    dg.train_mse_db = 10.0 * std::log10(rep.final_mse / rep.target_power);
    dg.mse_trace = rep.mse_trace;
    res.trained = st;
    VnleApplyOptions opt;
    opt.adapt = cfg.vnle.decision_directed;
    opt.known = targets;
    opt.reference_power = rep.target_power;
    auto out = vnle_apply(tr.output.samples, st, opt);
    if (!st.finite()) throw std::runtime_error("VNLE taps became non-finite during decision-directed adaptation");
    dg.linear_taps = st.linear;
    dg.nonlinear_taps = st.nonlinear;
    return out;
  });

  dg.level_histogram.assign(static_cast<std::size_t>(2 * m - 1), 0);
  std::vector<int> q(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) {
    q[k] = db_slice_index(y[k], m);
    ++dg.level_histogram[static_cast<std::size_t>(q[k])];
  }

  std::vector<int> data(y.size());
  if (cfg.mode == DspMode::vnle) {
    if (cfg.precoding) {
      for (std::size_t k = 0; k < q.size(); ++k) data[k] = q[k] % m;
    } else {
      // Feedback decoder: s[k] = q[k] - s[k-1].
      int prev = 0;
      for (std::size_t k = 0; k < q.size(); ++k) {
        data[k] = std::clamp(q[k] - prev, 0, m - 1);
        prev = data[k];
      }
    }
  } else {
    std::vector<double> z = y;
    if (cfg.mode == DspMode::vnle_nc_mlse) {
      z = stage("nc", [&] {
        std::vector<double> d(y.size());
        for (std::size_t k = 0; k < y.size(); ++k) d[k] = 2.0 * q[k] - 2.0 * (m - 1);
        const std::span<const double> ys(y), ds(d);
        const NoiseCanceler nc = nc_build(ys.first(n_train), ds.first(n_train), cfg.nc_order, targets);
        dg.nc_taps = nc.whitening.taps;
        dg.nc_decision_error_rate = nc.decision_error_rate;
        return nc_apply(y, d, nc);
      });
    }
    const SymbolSeq p = stage("mlse", [&] {
      TrellisSpec spec;
      spec.alphabet = alphabet;
      spec.traceback = cfg.traceback;
      return mlse_detect(z, spec);
    });
    if (cfg.precoding) data = db_decode(p).indices;
    else data = p.indices;
  }

  res.data = SymbolSeq(alphabet, std::move(data));
  res.bits = stage("demap", [&] {
    if (alphabet.order() == 6 && res.data.size() % 2 != 0)
      return demap_symbols(SymbolSeq(alphabet, std::vector<int>(res.data.indices.begin(), res.data.indices.end() - 1)));
    return demap_symbols(res.data);
  });
  res.equalized = std::move(y);
  return res;
}

}  // namespace vlink
