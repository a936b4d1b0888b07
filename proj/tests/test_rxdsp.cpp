#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "oracles.hpp"
#include "vlink/rxdsp.hpp"
#include "vlink/spectrum.hpp"
#include "vlink/txdsp.hpp"

using namespace vlink;

namespace {

std::vector<double> levels_of(const SymbolSeq& s) {
  std::vector<double> v(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) v[k] = s.alphabet.level(s[k]);
  return v;
}

// Gaussian pulses centred on integer UI, sampled at `sps` per UI starting
// `offset_ui` late, with additive white noise.
Waveform pulse_channel(const SymbolSeq& p, double baud, int sps, double pulse_sigma_ui, double noise_sigma,
                       double offset_ui, std::uint64_t seed) {
  const auto n = p.size() * static_cast<std::size_t>(sps);
  const auto noise = oracle::gaussian(n, seed, noise_sigma);
  const int reach = 5;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sps + offset_ui;
    const auto k0 = static_cast<long>(std::floor(t));
    double acc = 0.0;
    for (long k = k0 - reach; k <= k0 + reach; ++k) {
      if (k < 0 || k >= static_cast<long>(p.size())) continue;
      const double d = t - static_cast<double>(k);
      acc += p.alphabet.level(p[static_cast<std::size_t>(k)]) * std::exp(-0.5 * d * d / (pulse_sigma_ui * pulse_sigma_ui));
    }
    x[i] = acc + noise[i];
  }
  return Waveform(baud * sps, std::move(x), 0.0);
}

double circular_ui(double a) { return a - std::round(a); }

SymbolSeq random_seq(int m, std::size_t n, std::uint64_t seed) {
  return SymbolSeq(Alphabet::pam(m), oracle::uniform_symbols(n, m, seed));
}

}  // namespace

TEST_CASE("VNLE feature vector layout") {
  std::vector<double> w(201, 0.0);
  const auto zero = vnle_features(w, 11);
  CHECK(zero.size() == 222);
  CHECK(std::all_of(zero.begin(), zero.end(), [](double v) { return v == 0.0; }));
  w[100] = 1.0;
  const auto imp = vnle_features(w, 11);
  CHECK(std::count_if(imp.begin(), imp.end(), [](double v) { return v != 0.0; }) == 2);
  CHECK(imp[100] == 1.0);
  CHECK(imp[201] == 1.0);
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = static_cast<double>(j);
  const auto f = vnle_features(w, 11);
  CHECK(f[201 + 3] == 97.0 * 97.0);
  CHECK(f[212 + 2] == 98.0 * 97.0);
  CHECK(VnleState::create(Alphabet::pam(4), VnleConfig{}).feature_count() == 222);
  CHECK(VnleState::create(Alphabet::pam(4), VnleConfig{}).nonlinear.size() == 21);
}

TEST_CASE("VNLE on an ideal duobinary channel keeps a pass-through") {
  const Alphabet a = Alphabet::pam(4);
  const SymbolSeq p = random_seq(4, 40000, 1);
  const auto t = db_targets(p);
  VnleConfig cfg;
  VnleState init = VnleState::identity(a);
  init.mu_linear = cfg.mu_linear;
  init.mu_nonlinear = cfg.mu_nonlinear;
  init.mu_bias = cfg.mu_bias;
  // Unit gain once training has normalised the input to zero mean, unit RMS.
  const std::span<const double> head = std::span<const double>(t).first(cfg.training_symbols);
  const double mu = std::accumulate(head.begin(), head.end(), 0.0) / static_cast<double>(head.size());
  double var = 0.0;
  for (double v : head) var += (v - mu) * (v - mu);
  init.linear[100] = std::sqrt(var / static_cast<double>(head.size()));
  init.bias = mu;
  VnleTrainReport rep;
  const VnleState st = vnle_train(t, t, init, cfg, &rep);
  CHECK(rep.final_mse < 1e-6);
  const double g = 1.0 / st.input_scale;
  CHECK(st.linear[100] / g == doctest::Approx(1.0).epsilon(1e-3));
  for (int j = 0; j < 201; ++j)
    if (j != 100) CHECK(std::abs(st.linear[static_cast<std::size_t>(j)]) < 1e-3);
  for (double v : st.nonlinear) CHECK(std::abs(v) < 1e-3);
}

TEST_CASE("VNLE default initialisation is exact for an unimpaired symbol stream") {
  const Alphabet a = Alphabet::pam(4);
  const SymbolSeq p = random_seq(4, 30000, 2);
  VnleConfig cfg;
  VnleTrainReport rep;
  const VnleState st = vnle_train(levels_of(p), db_targets(p), VnleState::create(a, cfg), cfg, &rep);
  CHECK(rep.final_mse < 1e-6);
  CHECK(st.finite());
}

TEST_CASE("VNLE on a linear ISI channel approaches the Wiener solution") {
  const Alphabet a = Alphabet::pam(4);
  const SymbolSeq p = random_seq(4, 80000, 3);
  const auto lv = levels_of(p);
  const auto noise = oracle::gaussian(lv.size(), 4, 0.05);
  std::vector<double> x(lv.size());
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = lv[k] + 0.5 * (k ? lv[k - 1] : a.level(0)) + noise[k];
  const auto t = db_targets(p);

  VnleConfig cfg;
  VnleTrainReport rep;
  VnleState st = vnle_train(x, t, VnleState::create(a, cfg), cfg, &rep);
  CHECK(10.0 * std::log10(rep.final_mse / rep.target_power) < -25.0);

  // Least-squares optimum over the same span: 201 linear taps plus bias.
  const std::size_t n = cfg.training_symbols;
  const int taps = 201, c = 100;
  Eigen::MatrixXd A(static_cast<Eigen::Index>(n), taps + 1);
  Eigen::VectorXd b(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    for (int j = 0; j < taps; ++j) {
      const long i = static_cast<long>(k) + j - c;
      A(static_cast<Eigen::Index>(k), j) = i >= 0 ? x[static_cast<std::size_t>(i)] : 0.0;
    }
    A(static_cast<Eigen::Index>(k), taps) = 1.0;
    b(static_cast<Eigen::Index>(k)) = t[k];
  }
  const Eigen::VectorXd w = A.colPivHouseholderQr().solve(b);
  const double wiener = (A * w - b).squaredNorm() / static_cast<double>(n);
  CHECK(10.0 * std::log10(rep.final_mse / wiener) < 1.0);

  // Held-out generalisation.
  VnleState copy = st;
  const std::span<const double> held = std::span<const double>(x).subspan(n, 40000);
  const auto y = vnle_apply(held, copy);
  double mse = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) mse += std::pow(y[k] - t[n + k], 2);
  mse /= static_cast<double>(y.size());
  CHECK(std::abs(10.0 * std::log10(mse / rep.final_mse)) < 1.0);

  // Trailing five-block MSE never rises more than 5 % above its running minimum.
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 5; i <= rep.mse_trace.size(); ++i) {
    const double avg = std::accumulate(rep.mse_trace.begin() + static_cast<std::ptrdiff_t>(i - 5),
                                       rep.mse_trace.begin() + static_cast<std::ptrdiff_t>(i), 0.0) / 5.0;
    CHECK(avg <= 1.05 * best + 1e-12);
    best = std::min(best, avg);
  }
}

TEST_CASE("VNLE cancels an adjacent-product distortion") {
  const Alphabet a = Alphabet::pam(4);
  const SymbolSeq p = random_seq(4, 100000, 5);
  const auto lv = levels_of(p);
  const auto noise = oracle::gaussian(lv.size(), 6, 0.02);
  const double beta = 0.05;
  std::vector<double> x(lv.size());
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = lv[k] + beta * lv[k] * (k ? lv[k - 1] : a.level(0)) + noise[k];
  VnleConfig cfg;
  cfg.training_symbols = 100000;
  const VnleState st = vnle_train(x, db_targets(p), VnleState::create(a, cfg), cfg);
  // To first order s = x - beta x[k] x[k-1], so both products feeding the
  // duobinary sum need a raw-unit weight of -beta.
  const double g2 = st.input_scale * st.input_scale;
  CHECK(st.nonlinear[11] * g2 == doctest::Approx(-beta).epsilon(0.1));
  CHECK(st.nonlinear[12] * g2 == doctest::Approx(-beta).epsilon(0.1));
  CHECK(std::abs(st.nonlinear[13] * g2) < 0.1 * beta);
  CHECK(std::abs(st.nonlinear[0] * g2) < 0.1 * beta);
}

TEST_CASE("VNLE identity apply and multi-level output") {
  for (int m : {4, 6}) {
    const Alphabet a = Alphabet::pam(m);
    const SymbolSeq p = random_seq(m, 5000, 7);
    const auto t = db_targets(p);
    VnleState id = VnleState::identity(a);
    CHECK(vnle_apply(t, id) == t);
    std::vector<int> hits(static_cast<std::size_t>(2 * m - 1), 0);
    for (double y : t) ++hits[static_cast<std::size_t>(db_slice_index(y, m))];
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h > 0; }));
    CHECK(id.slice(0.4) == 0.0);
    CHECK(id.slice(1e9) == 2.0 * (m - 1));
  }
}

TEST_CASE("VNLE reports divergence") {
  const Alphabet a = Alphabet::pam(4);
  const SymbolSeq p = random_seq(4, 20000, 8);
  VnleConfig cfg;
  cfg.mu_linear = 0.5;
  VnleState st = VnleState::create(a, cfg);
  const auto noise = oracle::gaussian(p.size(), 9, 0.3);
  auto x = levels_of(p);
  for (std::size_t k = 0; k < x.size(); ++k) x[k] += noise[k];
  CHECK_THROWS_AS(vnle_train(x, db_targets(p), st, cfg), std::runtime_error);
}

TEST_CASE("VNLE decision-directed adaptation is gated and guarded") {
  const Alphabet a = Alphabet::pam(4);
  const SymbolSeq p = random_seq(4, 30000, 10);
  const auto t = db_targets(p);
  const std::size_t n_known = 15000;
  const std::span<const double> known(t.data(), n_known);

  // Taps at the end of the known span, and after running the whole input.
  auto run = [&](const std::vector<double>& x) {
    VnleState st = VnleState::identity(a, 21, 3);
    VnleApplyOptions opt;
    opt.adapt = true;
    opt.known = known;
    opt.reference_power = a.level_power() * 2.0;
    VnleState head = st;
    VnleApplyOptions known_only = opt;
    known_only.max_known_slicer_errors = -1.0;  // never leaves data-aided mode
    vnle_apply(x, head, known_only);
    vnle_apply(x, st, opt);
    return std::pair{head.linear, st.linear};
  };

  auto channel = [&](double sigma, double tail_gain) {
    const auto lv = levels_of(p);
    const auto noise = oracle::gaussian(lv.size(), 11, sigma);
    std::vector<double> x(lv.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
      x[k] = lv[k] + (k ? lv[k - 1] : a.level(0)) + noise[k];
      if (k >= n_known) x[k] *= tail_gain;
    }
    return x;
  };

  SUBCASE("open eye keeps adapting") {
    const auto [head, full] = run(channel(0.05, 1.0));
    CHECK(head != full);
  }
  SUBCASE("closed eye never switches to decisions") {
    const auto [head, full] = run(channel(0.8, 1.0));
    CHECK(head == full);
  }
  SUBCASE("collapsing output power restores the trained taps") {
    const auto [head, full] = run(channel(0.05, 0.1));
    CHECK(head == full);
  }
}

TEST_CASE("Burg on white noise finds no structure") {
  const std::size_t n = 10000;
  const BurgResult r = burg_ar(oracle::gaussian(n, 10), 3);
  REQUIRE(r.coefficients.size() == 3);
  for (double v : r.coefficients) CHECK(std::abs(v) < 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(r.error_power == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("Burg recovers an AR(2) process") {
  const std::vector<double> a{1.0, -0.5};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const BurgResult r = burg_ar(oracle::ar_process(a, 10000, seed), 2);
    CHECK(r.coefficients[0] == doctest::Approx(1.0).epsilon(0.05));
    CHECK(std::abs(r.coefficients[1] + 0.5) < 0.05);
    for (double k : r.reflection) CHECK(std::abs(k) < 1.0);
  }
}

TEST_CASE("Burg order one is the harmonic-mean estimate") {
  for (std::uint64_t seed = 20; seed < 25; ++seed) {
    const auto e = oracle::ar_process(std::vector<double>{0.9}, 500, seed);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 1; k < e.size(); ++k) {
      num += e[k] * e[k - 1];
      den += e[k] * e[k] + e[k - 1] * e[k - 1];
    }
    const BurgResult r = burg_ar(e, 1);
    CHECK(r.coefficients[0] == doctest::Approx(2.0 * num / den).epsilon(1e-12));
    CHECK(std::abs(r.coefficients[0]) < 1.0);
  }
  std::vector<double> ramp(100);
  std::iota(ramp.begin(), ramp.end(), 0.0);
  CHECK(std::abs(burg_ar(ramp, 1).coefficients[0]) < 1.0);
  CHECK_THROWS_AS(burg_ar(std::vector<double>(100, 2.0), 2), std::domain_error);
  CHECK_THROWS(burg_ar(oracle::gaussian(30, 1), 3));
}

TEST_CASE("noise canceler structure") {
  const auto p = random_seq(4, 20000, 11);
  const auto d = db_targets(p);
  const auto e = oracle::gaussian(d.size(), 12, 0.2);
  std::vector<double> y(d.size());
  for (std::size_t k = 0; k < y.size(); ++k) y[k] = d[k] + e[k];
  const NoiseCanceler nc = nc_build(y, d, 3, d);
  CHECK(nc.whitening.taps.size() == 7);
  CHECK(nc.whitening.center == 3);
  CHECK(nc.whitening.taps[3] == 1.0);
  CHECK(nc.learned_taps() == 6);
  CHECK(nc.precursor.size() == 3);
  CHECK(nc.postcursor.size() == 3);
  CHECK(nc.decision_error_rate == 0.0);
  // White noise: nothing to whiten.
  for (double v : nc.precursor) CHECK(std::abs(v) < 3.0 / std::sqrt(20000.0));
  for (double v : nc.postcursor) CHECK(std::abs(v) < 3.0 / std::sqrt(20000.0));

  NoiseCanceler zero = nc;
  zero.whitening = FirFilter({0, 0, 0, 1, 0, 0, 0}, 3);
  const auto z = nc_apply(y, d, zero);
  for (std::size_t k = 0; k < y.size(); ++k) CHECK(z[k] == doctest::Approx(y[k]).epsilon(1e-12));
}

TEST_CASE("noise canceler whitens AR(1) noise") {
  const auto p = random_seq(4, 100000, 13);
  const auto d = db_targets(p);
  const auto e = oracle::ar_process(std::vector<double>{0.6}, d.size(), 14);
  std::vector<double> y(d.size());
  for (std::size_t k = 0; k < y.size(); ++k) y[k] = d[k] + 0.2 * e[k];
  const NoiseCanceler nc = nc_build(y, d, 3, d);
  const auto z = nc_apply(y, d, nc);
  std::vector<double> rin(y.size()), rout(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) {
    rin[k] = y[k] - d[k];
    rout[k] = z[k] - d[k];
  }
  const double before = std::abs(autocorrelation(rin, 1)), after = std::abs(autocorrelation(rout, 1));
  CHECK(before == doctest::Approx(0.6).epsilon(0.05));
  CHECK(after * 5.0 <= before);
  CHECK(spectral_flatness(welch_psd(rout, 1.0).power) > spectral_flatness(welch_psd(rin, 1.0).power));
}

TEST_CASE("noise canceler refuses unreliable decisions") {
  const auto p = random_seq(4, 1000, 15);
  const auto t = db_targets(p);
  std::vector<double> d = t;
  for (std::size_t k = 0; k < d.size(); k += 4) d[k] += 2.0;  // 25 % wrong
  CHECK_THROWS_AS(nc_build(t, d, 3, t), std::domain_error);
}

TEST_CASE("noise cancellation does not hurt MLSE under coloured noise") {
  const int m = 4;
  const auto p = random_seq(m, 200000, 16);
  const auto t = db_targets(p);
  const auto e = oracle::ar_process(std::vector<double>{0.6}, t.size(), 17);
  std::vector<double> y(t.size()), d(t.size());
  for (std::size_t k = 0; k < y.size(); ++k) {
    y[k] = t[k] + 0.45 * e[k];
    d[k] = 2.0 * db_slice_index(y[k], m) - 2.0 * (m - 1);
  }
  const NoiseCanceler nc = nc_build(std::span<const double>(y).first(20000), std::span<const double>(d).first(20000), 3);
  const auto z = nc_apply(y, d, nc);
  TrellisSpec spec;
  auto errors = [&](const std::vector<double>& in) {
    const SymbolSeq det = mlse_detect(in, spec);
    std::size_t err = 0;
    for (std::size_t k = 0; k < p.size(); ++k) err += det[k] != p[k];
    return err;
  };
  const std::size_t with_nc = errors(z), without = errors(y);
  CHECK(without > 100);
  CHECK(with_nc <= without);
}

TEST_CASE("MLSE recovers a noiseless duobinary sequence") {
  for (int m : {4, 6}) {
    const auto p = random_seq(m, 5000, 18);
    TrellisSpec spec;
    spec.alphabet = Alphabet::pam(m);
    CHECK(mlse_detect(db_targets(p), spec).indices == p.indices);
    spec.initial_state.reset();
    CHECK(mlse_detect(db_targets(p), spec).indices == p.indices);
  }
}

TEST_CASE("MLSE equals exhaustive search on short blocks") {
  struct Case {
    int m;
    std::size_t len;
    int blocks;
  };
  for (const Case c : {Case{4, 8, 1000}, Case{6, 6, 1000}}) {
    const Alphabet a = Alphabet::pam(c.m);
    TrellisSpec spec;
    spec.alphabet = a;
    spec.traceback = static_cast<int>(c.len);
    int mismatches = 0;
    for (int b = 0; b < c.blocks; ++b) {
      const auto p = random_seq(c.m, c.len, 1000 + static_cast<std::uint64_t>(b));
      auto z = db_targets(p);
      const auto noise = oracle::gaussian(z.size(), 5000 + static_cast<std::uint64_t>(b), 1.0);
      for (std::size_t k = 0; k < z.size(); ++k) z[k] += noise[k];
      const auto want = oracle::brute_force_ml(z, a.levels(), 0);
      mismatches += mlse_detect(z, spec).indices != want;
    }
    CHECK(mismatches == 0);
  }
}

TEST_CASE("MLSE ties go to the smaller state") {
  TrellisSpec spec;
  // -3 is halfway between level(1)+level(0) = -4 and level(2)+level(0) = -2.
  CHECK(mlse_detect(std::vector<double>{-3.0}, spec).indices == std::vector<int>{1});
  CHECK(mlse_detect(std::vector<double>{-5.0}, spec).indices == std::vector<int>{0});
}

TEST_CASE("MLSE beats the symbol-by-symbol slicer on AWGN") {
  const int m = 4;
  const auto s = random_seq(m, 200000, 19);
  const SymbolSeq p = db_precode(s, 0);
  auto z = db_targets(p);
  const auto noise = oracle::gaussian(z.size(), 20, 0.6);
  for (std::size_t k = 0; k < z.size(); ++k) z[k] += noise[k];
  TrellisSpec spec;
  const SymbolSeq ml = db_decode(mlse_detect(z, spec));
  std::size_t err_ml = 0, err_sl = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    err_ml += ml[k] != s[k];
    err_sl += db_slice_index(z[k], m) % m != s[k];
  }
  CHECK(err_sl > 200);
  CHECK(err_ml < err_sl);

  TrellisSpec full = spec;
  full.traceback = static_cast<int>(z.size());
  const SymbolSeq windowed = mlse_detect(z, spec), exact = mlse_detect(z, full);
  std::size_t differ = 0;
  for (std::size_t k = 0; k < z.size(); ++k) differ += windowed[k] != exact[k];
  CHECK(differ * 10000 < z.size());
}

TEST_CASE("duobinary decode") {
  for (int m : {4, 6}) {
    const auto s = random_seq(m, 100000, 21);
    CHECK(db_decode(db_precode(s, 0), 0).indices == s.indices);
    CHECK(db_decode(db_precode(s, 3), 3).indices == s.indices);
  }
  const auto s = random_seq(4, 64, 22);
  const SymbolSeq p = db_precode(s, 0);
  for (std::size_t pos = 0; pos < p.size(); ++pos)
    for (int v = 0; v < 4; ++v) {
      if (v == p[pos]) continue;
      SymbolSeq bad = p;
      bad.indices[pos] = v;
      const SymbolSeq d = db_decode(bad, 0);
      std::size_t err = 0;
      for (std::size_t k = 0; k < s.size(); ++k) err += d[k] != s[k];
      CHECK(err >= 1);
      CHECK(err <= 2);
    }
  CHECK(db_slice_index(-100.0, 4) == 0);
  CHECK(db_slice_index(100.0, 4) == 6);
  CHECK(db_slice_index(0.9, 4) == 3);
}

TEST_CASE("timing recovery on a symmetric pulse channel") {
  const double baud = 100e9;
  const auto p = random_seq(4, 30000, 23);
  const SymbolSeq train(p.alphabet, std::vector<int>(p.indices.begin(), p.indices.begin() + 20000));
  const TimingResult r0 = timing_recover(pulse_channel(p, baud, 2, 0.35, 0.05, 0.0, 1), train, baud, p.size());
  CHECK(std::abs(circular_ui(r0.phase_ui)) < 0.03);
  CHECK(r0.output.size() == p.size());
  CHECK(r0.output.sample_rate == baud);

  // A sampler running 0.25 UI late puts the symbol centres 0.25 UI early on the nominal grid.
  const TimingResult r1 = timing_recover(pulse_channel(p, baud, 2, 0.35, 0.05, 0.25, 1), train, baud, p.size());
  CHECK(std::abs(circular_ui(r1.phase_ui + 0.25)) < 0.03);
  CHECK_THROWS(timing_recover(pulse_channel(p, baud, 2, 0.35, 0.05, 0.0, 1),
                              SymbolSeq(p.alphabet, std::vector<int>(100, 0)), baud, p.size()));
}

TEST_CASE("recovered timing is within 0.2 dB of genie sampling") {
  const double baud = 100e9;
  const Alphabet a = Alphabet::pam(4);
  const auto p = random_seq(4, 40000, 24);
  const Waveform w = pulse_channel(p, baud, 2, 0.45, 0.15, 0.4, 2);
  const SymbolSeq train(a, std::vector<int>(p.indices.begin(), p.indices.begin() + 20000));
  const auto t = db_targets(train);
  VnleConfig cfg;
  auto train_mse = [&](const Waveform& x) {
    VnleTrainReport rep;
    vnle_train(x.samples, t, VnleState::create(a, cfg), cfg, &rep);
    double tail = 0.0;
    for (std::size_t i = rep.mse_trace.size() - 5; i < rep.mse_trace.size(); ++i) tail += rep.mse_trace[i];
    return tail / 5.0;
  };
  const TimingResult rec = timing_recover(w, train, baud, p.size());
  const double genie = train_mse(sample_at_phase(w, baud, p.size(), -0.4, 0));
  CHECK(std::abs(10.0 * std::log10(train_mse(rec.output) / genie)) < 0.2);
}

TEST_CASE("receiver chain on a near-ideal channel") {
  const double baud = 100e9;
  for (const bool precoding : {true, false}) {
    const auto s = random_seq(4, 100000, 25);
    const SymbolSeq sent = precoding ? db_precode(s, 0) : s;
    const Waveform w = pulse_channel(sent, baud, 2, 0.3, 0.03, 0.1, 3);
    for (const DspMode mode : {DspMode::vnle, DspMode::vnle_mlse, DspMode::vnle_nc_mlse}) {
      RxConfig cfg;
      cfg.mode = mode;
      cfg.precoding = precoding;
      const RxResult r = rx_chain(w, s.alphabet, baud, s.size(), sent, cfg);
      // The first symbols sit on the capture edge; the harness never counts them.
      std::size_t err = 0;
      for (std::size_t k = 16; k < s.size(); ++k) err += r.data[k] != s[k];
      CHECK(err == 0);
      CHECK(r.bits.size() == 2 * s.size());
      CHECK(r.diag.level_histogram.size() == 7);
      CHECK(std::all_of(r.diag.level_histogram.begin(), r.diag.level_histogram.end(), [](auto h) { return h > 0; }));
      if (mode == DspMode::vnle_nc_mlse) CHECK(r.diag.nc_taps.size() == 7);
    }
  }
}

TEST_CASE("receiver chain is deterministic and names failing stages") {
  const double baud = 100e9;
  const auto s = random_seq(4, 40000, 26);
  const SymbolSeq sent = db_precode(s, 0);
  const Waveform w = pulse_channel(sent, baud, 2, 0.4, 0.2, 0.0, 4);
  const RxConfig cfg;
  const RxResult a = rx_chain(w, s.alphabet, baud, s.size(), sent, cfg);
  const RxResult b = rx_chain(w, s.alphabet, baud, s.size(), sent, cfg);
  CHECK(a.data.indices == b.data.indices);
  CHECK(a.equalized == b.equalized);

  RxConfig bad = cfg;
  bad.vnle.mu_linear = 0.5;
  try {
    rx_chain(w, s.alphabet, baud, s.size(), sent, bad);
    FAIL("expected a stage error");
  } catch (const StageError& e) {
    CHECK(e.stage() == "vnle");
  }
  Waveform broken = w;
  broken.samples[100] = std::nan("");
  try {
    rx_chain(broken, s.alphabet, baud, s.size(), sent, cfg);
    FAIL("expected a stage error");
  } catch (const StageError& e) {
    CHECK(e.stage() == "timing");
  }
  CHECK(dsp_mode_from_string(to_string(DspMode::vnle_mlse)) == DspMode::vnle_mlse);
  CHECK_THROWS(dsp_mode_from_string("nc"));
}
