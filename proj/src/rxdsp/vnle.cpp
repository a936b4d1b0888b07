#include "vlink/vnle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "vlink/txdsp.hpp"

namespace vlink {

namespace {

struct Kernel {
  const double* w;  // padded input; w[k + j] is x[k + j - c]
  int n_lin;
  int c;
  int m;
};

inline double linear_dot(const double* taps, const double* win, int n) {
  double acc = 0.0;
#pragma omp simd reduction(+ : acc)
  for (int j = 0; j < n; ++j) acc += taps[j] * win[j];
  return acc;
}

inline double evaluate(const VnleState& st, const double* win, int c) {
  double y = linear_dot(st.linear.data(), win, static_cast<int>(st.linear.size())) + st.bias;
  const int m = st.memory;
  const double* nl = st.nonlinear.data();
  for (int i = 0; i < m; ++i) y += nl[i] * win[c - i] * win[c - i];
  for (int i = 0; i < m - 1; ++i) y += nl[m + i] * win[c - i] * win[c - i - 1];
  return y;
}

inline void update(VnleState& st, const double* win, int c, double err) {
  const double gl = st.mu_linear * err;
  double* lin = st.linear.data();
  const int n = static_cast<int>(st.linear.size());
#pragma omp simd
  for (int j = 0; j < n; ++j) lin[j] += gl * win[j];
  const double gn = st.mu_nonlinear * err;
  const int m = st.memory;
  double* nl = st.nonlinear.data();
  for (int i = 0; i < m; ++i) nl[i] += gn * win[c - i] * win[c - i];
  for (int i = 0; i < m - 1; ++i) nl[m + i] += gn * win[c - i] * win[c - i - 1];
  st.bias += st.mu_bias * err;
}

std::vector<double> padded_input(std::span<const double> x, const VnleState& st) {
  const int c = st.center();
  std::vector<double> p(x.size() + 2 * static_cast<std::size_t>(c) + 1, 0.0);
  for (std::size_t k = 0; k < x.size(); ++k) p[k + static_cast<std::size_t>(c)] = (x[k] - st.input_offset) * st.input_scale;
  return p;
}

}  // namespace

VnleState VnleState::identity(const Alphabet& a, int linear_taps, int memory) {
  if (linear_taps < 1 || linear_taps % 2 == 0) throw std::invalid_argument("VNLE needs an odd number of linear taps");
  if (memory < 1 || memory > linear_taps / 2 + 1) throw std::invalid_argument("VNLE memory must fit in the window");
  VnleState st;
  st.linear.assign(static_cast<std::size_t>(linear_taps), 0.0);
  st.linear[static_cast<std::size_t>(linear_taps / 2)] = 1.0;
  st.memory = memory;
  st.nonlinear.assign(static_cast<std::size_t>(2 * memory - 1), 0.0);
  st.targets = db_target_levels(a);
  return st;
}

VnleState VnleState::create(const Alphabet& a, const VnleConfig& cfg) {
  VnleState st = identity(a, cfg.linear_taps, cfg.memory);
  st.mu_linear = cfg.mu_linear;
  st.mu_nonlinear = cfg.mu_nonlinear;
  st.mu_bias = cfg.mu_bias;
  // Start from the duobinary response of an unimpaired unit-RMS input.
  const double g = std::sqrt(a.level_power());
  const auto c = static_cast<std::size_t>(st.center());
  st.linear[c] = g;
  st.linear[c - 1] = g;
  return st;
}

double VnleState::slice(double y) const {
  // Targets are uniformly spaced and ascending.
  const double lo = targets.front(), step = targets[1] - targets[0];
  const long q = std::lround((y - lo) / step);
  const long qmax = static_cast<long>(targets.size()) - 1;
  return lo + step * static_cast<double>(std::clamp(q, 0L, qmax));
}

bool VnleState::finite() const {
  auto ok = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double t) { return std::isfinite(t); });
  };
  return ok(linear) && ok(nonlinear) && std::isfinite(bias);
}

std::vector<double> vnle_features(std::span<const double> window, int memory) {
  const int n = static_cast<int>(window.size());
  const int c = n / 2;
  if (n % 2 == 0 || memory < 1 || memory > c + 1) throw std::invalid_argument("vnle_features: bad window or memory");
  std::vector<double> f(window.begin(), window.end());
  f.reserve(static_cast<std::size_t>(n + 2 * memory - 1));
  for (int i = 0; i < memory; ++i) f.push_back(window[static_cast<std::size_t>(c - i)] * window[static_cast<std::size_t>(c - i)]);
  for (int i = 0; i < memory - 1; ++i)
    f.push_back(window[static_cast<std::size_t>(c - i)] * window[static_cast<std::size_t>(c - i - 1)]);
  return f;
}

std::vector<double> db_targets(const SymbolSeq& p, int p0) {
  std::vector<double> t(p.size());
  double prev = p.alphabet.level(p0);
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double cur = p.alphabet.level(p[k]);
    t[k] = cur + prev;
    prev = cur;
  }
  return t;
}

VnleState vnle_train(std::span<const double> x, std::span<const double> targets, VnleState st, const VnleConfig& cfg,
                     VnleTrainReport* report) {
  const std::size_t n = std::min(x.size(), targets.size());
  if (n < cfg.training_symbols) throw std::invalid_argument("vnle_train: fewer samples than the training length");
  const std::size_t len = cfg.training_symbols;
  const std::span<const double> head = x.first(len);
  st.input_offset = mean(head);
  const double sd = std::sqrt(variance(head));
  if (!(sd > 0.0)) throw std::domain_error("vnle_train: constant input");
  st.input_scale = 1.0 / sd;

  const std::vector<double> xp = padded_input(x.first(len), st);
  const int c = st.center();
  const auto block = static_cast<std::size_t>(std::max(1, cfg.block));

  VnleTrainReport rep;
  double tp = 0.0;
  for (std::size_t k = 0; k < len; ++k) tp += targets[k] * targets[k];
  rep.target_power = tp / static_cast<double>(len);

  double acc = 0.0;
  std::size_t in_block = 0;
  int rising = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < len; ++k) {
    const double* win = xp.data() + k;
    const double e = targets[k] - evaluate(st, win, c);
    update(st, win, c, e);
    acc += e * e;
    if (++in_block == block || k + 1 == len) {
      const double mse = acc / static_cast<double>(in_block);
      if (!std::isfinite(mse) || !st.finite())
        throw std::runtime_error("VNLE diverged (non-finite taps) with mu_linear=" + std::to_string(st.mu_linear) +
                                 " mu_nonlinear=" + std::to_string(st.mu_nonlinear));
      if (!rep.mse_trace.empty() && mse > rep.mse_trace.back()) ++rising;
      else rising = 0;
      best = std::min(best, mse);
      rep.mse_trace.push_back(mse);
      if (rising >= 5 && mse > 2.0 * best)
        throw std::runtime_error("VNLE diverged (MSE rising for 5 blocks) with mu_linear=" +
                                 std::to_string(st.mu_linear) + " mu_nonlinear=" + std::to_string(st.mu_nonlinear));
      acc = 0.0;
      in_block = 0;
    }
  }
  rep.final_mse = rep.mse_trace.back();
  if (report) *report = std::move(rep);
  return st;
}

std::vector<double> vnle_apply(std::span<const double> x, VnleState& st, const VnleApplyOptions& opt) {
  const std::vector<double> xp = padded_input(x, st);
  const int c = st.center();
  std::vector<double> y(x.size());
  bool adapt = opt.adapt;
  VnleState anchor;
  double running = 0.0;
  std::size_t wrong = 0;
  constexpr double kForget = 1.0 / 2000.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double* win = xp.data() + k;
    const double out = evaluate(st, win, c);
    y[k] = out;
    if (k < opt.known.size()) {
      if (adapt) update(st, win, c, opt.known[k] - out);
      if (2 * k >= opt.known.size()) wrong += st.slice(out) != opt.known[k];
      continue;
    }
    if (k == opt.known.size() && adapt) {
      const std::size_t half = opt.known.size() - opt.known.size() / 2;
      adapt = half == 0 || static_cast<double>(wrong) <= opt.max_known_slicer_errors * static_cast<double>(half);
    }
    if (!adapt) continue;
    if (k == opt.known.size()) {
      anchor = st;
      running = opt.reference_power;
    }
    running += kForget * (out * out - running);
    if (opt.reference_power > 0.0 && (running < 0.5 * opt.reference_power || running > 2.0 * opt.reference_power)) {
      st = anchor;
      adapt = false;
      continue;
    }
    update(st, win, c, st.slice(out) - out);
  }
  return y;
}

}  // namespace vlink
