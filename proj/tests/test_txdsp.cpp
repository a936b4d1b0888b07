#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "oracles.hpp"
#include "vlink/fir.hpp"
#include "vlink/txdsp.hpp"

using namespace vlink;

namespace {

std::vector<std::uint8_t> random_bits(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> b(n);
  for (auto& v : b) v = static_cast<std::uint8_t>(rng() & 1u);
  return b;
}

// Position (in samples) of the cross-correlation peak of b against a, refined by a parabola.
double xcorr_peak(const std::vector<double>& a, const std::vector<double>& b, int max_lag) {
  std::vector<double> r;
  for (int lag = -max_lag; lag <= max_lag; ++lag) {
    double acc = 0.0;
    for (std::size_t i = static_cast<std::size_t>(max_lag); i + static_cast<std::size_t>(max_lag) < a.size(); ++i)
      acc += a[i] * b[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + lag)];
    r.push_back(acc);
  }
  const auto best = static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
  REQUIRE(best > 0);
  REQUIRE(best + 1 < r.size());
  const double y0 = r[best - 1], y1 = r[best], y2 = r[best + 1];
  return static_cast<double>(best) - max_lag + 0.5 * (y0 - y2) / (y0 - 2.0 * y1 + y2);
}

}  // namespace

TEST_CASE("PAM-4 Gray mapping") {
  const std::vector<std::uint8_t> bits{0, 0, 0, 1, 1, 1, 1, 0};
  const SymbolSeq s = map_bits(bits, Alphabet::pam(4));
  CHECK(s.indices == std::vector<int>{0, 1, 2, 3});
  CHECK(demap_symbols(s) == bits);
  CHECK_THROWS(map_bits(std::vector<std::uint8_t>{0, 1, 1}, Alphabet::pam(4)));
  CHECK_THROWS(map_bits(std::vector<std::uint8_t>{0, 1, 1, 0}, Alphabet::pam(6)));
}

TEST_CASE("PAM-6 pair code is a bijection onto the 32 allowed pairs") {
  const auto& code = Pam6PairCode::instance();
  std::set<std::pair<int, int>> used;
  for (unsigned w = 0; w < 32; ++w) {
    const auto p = code.encode(w);
    CHECK_FALSE(Pam6PairCode::excluded(p.first, p.second));
    CHECK(p.first >= 0);
    CHECK(p.first < 6);
    CHECK(p.second >= 0);
    CHECK(p.second < 6);
    CHECK(code.decode(p.first, p.second) == w);
    used.insert(p);
  }
  CHECK(used.size() == 32);
  int excluded = 0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) excluded += Pam6PairCode::excluded(i, j) ? 1 : 0;
  CHECK(excluded == 4);
  CHECK(Pam6PairCode::excluded(0, 0));
  CHECK(Pam6PairCode::excluded(0, 5));
  CHECK(Pam6PairCode::excluded(5, 0));
  CHECK(Pam6PairCode::excluded(5, 5));
  CHECK(code.encode(0) == std::pair{0, 1});
  CHECK(code.encode(31) == std::pair{5, 4});
  // Unused pairs fall back to a neighbouring used pair.
  CHECK(code.decode(0, 0) == code.decode(0, 1));
  CHECK_THROWS(code.encode(32));
}

TEST_CASE("PAM-6 random round trip") {
  const auto bits = random_bits(500000, 42);
  const SymbolSeq s = map_bits(bits, Alphabet::pam(6));
  CHECK(s.size() == 200000);
  for (std::size_t k = 0; k + 1 < s.size(); k += 2) CHECK_FALSE(Pam6PairCode::excluded(s[k], s[k + 1]));
  CHECK(demap_symbols(s) == bits);
}

TEST_CASE("duobinary precoder examples") {
  const Alphabet a = Alphabet::pam(4);
  CHECK(db_precode(SymbolSeq(a, {0, 0, 0, 0}), 0).indices == std::vector<int>{0, 0, 0, 0});
  CHECK(db_precode(SymbolSeq(a, {3, 3, 3}), 0).indices == std::vector<int>{3, 0, 3});
  CHECK(db_precode(SymbolSeq(a, {}), 0).size() == 0);
  CHECK_THROWS(db_precode(SymbolSeq(a, {1}), 4));
}

TEST_CASE("precode then duobinary sum mod M is the identity, exhaustively") {
  for (int m : {4, 6}) {
    const Alphabet a = Alphabet::pam(m);
    for (int len = 1; len <= 6; ++len) {
      int total = 1;
      for (int i = 0; i < len; ++i) total *= m;
      for (int code = 0; code < total; ++code) {
        std::vector<int> s(static_cast<std::size_t>(len));
        for (int i = 0, c = code; i < len; ++i, c /= m) s[static_cast<std::size_t>(i)] = c % m;
        for (int p0 = 0; p0 < m; ++p0) {
          const SymbolSeq p = db_precode(SymbolSeq(a, s), p0);
          int prev = p0;
          bool ok = true;
          for (int k = 0; k < len; ++k) {
            ok = ok && (p[static_cast<std::size_t>(k)] + prev) % m == s[static_cast<std::size_t>(k)];
            prev = p[static_cast<std::size_t>(k)];
          }
          if (!ok) FAIL("mismatch for M=" << m << " code " << code << " p0 " << p0);
        }
      }
    }
  }
}

TEST_CASE("precoder random round trip") {
  for (int m : {4, 6}) {
    const auto s = oracle::uniform_symbols(100000, m, 7 + static_cast<std::uint64_t>(m));
    const SymbolSeq p = db_precode(SymbolSeq(Alphabet::pam(m), s), 2);
    std::size_t bad = 0;
    for (std::size_t k = 0; k < s.size(); ++k) bad += ((p[k] + (k ? p[k - 1] : 2)) % m != s[k]) ? 1 : 0;
    CHECK(bad == 0);
  }
}

TEST_CASE("duobinary target levels") {
  CHECK(db_target_levels(Alphabet::pam(4)) == std::vector<double>{-6, -4, -2, 0, 2, 4, 6});
  const auto six = db_target_levels(Alphabet::pam(6));
  CHECK(six.size() == 11);
  CHECK(six.front() == -10.0);
  CHECK(six.back() == 10.0);
}

TEST_CASE("zero preskew is a zero-order hold") {
  const SymbolSeq s(Alphabet::pam(4), oracle::uniform_symbols(200, 4, 3));
  const Waveform w = apply_preskew(s, PreskewConfig{}, 4, 100e9);
  REQUIRE(w.size() == 800);
  CHECK(w.sample_rate == 400e9);
  for (std::size_t k = 0; k < w.size(); ++k) CHECK(w.samples[k] == doctest::Approx(s.alphabet.level(s[k / 4])).epsilon(1e-12));
}

TEST_CASE("uniform preskew delay moves the correlation peak") {
  const int sps = 8;
  const SymbolSeq s(Alphabet::pam(4), oracle::uniform_symbols(4000, 4, 5));
  const auto ref = apply_preskew(s, PreskewConfig{}, sps, 100e9).samples;
  PreskewConfig cfg;
  cfg.delays.assign(4, 0.25);
  const auto skewed = apply_preskew(s, cfg, sps, 100e9).samples;
  CHECK(xcorr_peak(ref, skewed, 3 * sps) / sps == doctest::Approx(0.25).epsilon(0.08));
}

TEST_CASE("opposite level delays skew rising and falling edges") {
  const int sps = 32;
  std::vector<int> idx;
  for (int k = 0; k < 200; ++k) idx.push_back(k % 2 ? 3 : 0);
  PreskewConfig cfg;
  cfg.delays = {-0.1, 0.0, 0.0, 0.1};
  cfg.interpolator_length = 33;
  const auto w = apply_preskew(SymbolSeq(Alphabet::pam(4), idx), cfg, sps, 100e9).samples;
  double rise = 0.0, fall = 0.0;
  int nr = 0, nf = 0;
  for (std::size_t i = 40 * sps; i + 1 < w.size() - 40 * sps; ++i) {
    if ((w[i] < 0.0) == (w[i + 1] < 0.0)) continue;
    const double t = (static_cast<double>(i) + w[i] / (w[i] - w[i + 1])) / sps;
    const double frac = t - std::round(t);
    if (w[i + 1] > w[i]) {
      rise += frac;
      ++nr;
    } else {
      fall += frac;
      ++nf;
    }
  }
  REQUIRE(nr > 50);
  REQUIRE(nf > 50);
  CHECK(rise / nr - fall / nf == doctest::Approx(0.2).epsilon(0.1));
}

TEST_CASE("preskew rejects out-of-range delays") {
  const SymbolSeq s(Alphabet::pam(4), {0, 1, 2, 3});
  PreskewConfig cfg;
  cfg.delays = {0.0, 0.6, 0.0, 0.0};
  CHECK_THROWS(apply_preskew(s, cfg, 4, 1e9));
  cfg.delays = {0.0, 0.1, 0.0};
  CHECK_THROWS(apply_preskew(s, cfg, 4, 1e9));
  cfg.delays = {0.0, 0.1, 0.0, 0.0};
  CHECK_THROWS(apply_preskew(s, cfg, 1, 1e9));
}

TEST_CASE("DPD is a unit-DC pre-emphasis") {
  const FirFilter f = dpd_filter(DpdConfig{0.2});
  CHECK(f.taps == std::vector<double>{-0.2, 1.4, -0.2});
  CHECK(f.dc_gain() == doctest::Approx(1.0));
  std::vector<double> freqs;
  for (int i = 0; i < 50; ++i) freqs.push_back(i * 0.5 / 50.0);
  const auto h = freq_response(f, freqs, 1.0);
  CHECK(std::abs(h[0]) == doctest::Approx(1.0));
  for (std::size_t i = 1; i < h.size(); ++i) CHECK(std::abs(h[i]) > std::abs(h[i - 1]));
  CHECK_THROWS(dpd_filter(DpdConfig{-0.1}));
}

TEST_CASE("tx chain without DPD or skew is the scaled precoded signal") {
  TxConfig cfg;
  cfg.dpd.boost = 0.0;
  const auto bits = random_bits(2000, 9);
  const TxOutput out = tx_chain(bits, cfg);
  CHECK(out.data.size() == 1000);
  CHECK(out.transmitted.indices == db_precode(out.data, 0).indices);
  for (std::size_t k = 0; k < out.waveform.size(); ++k)
    CHECK(out.waveform.samples[k] == doctest::Approx(out.transmitted.alphabet.level(out.transmitted[k / 4]) / 3.0));
  CHECK(out.gross_rate_gbps == doctest::Approx(212.5));
  cfg.precoding = false;
  CHECK(tx_chain(bits, cfg).transmitted.indices == tx_chain(bits, cfg).data.indices);
}

TEST_CASE("tx chain is deterministic and reports gross rates") {
  TxConfig cfg;
  const auto bits = random_bits(4000, 10);
  CHECK(tx_chain(bits, cfg).waveform.samples == tx_chain(bits, cfg).waveform.samples);
  CHECK(gross_rate_gbps(Modulation::pam6, 96e9) == doctest::Approx(240.0));
  CHECK(gross_rate_gbps(Modulation::pam4, 106.25e9) == doctest::Approx(212.5));
}
