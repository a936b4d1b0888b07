#include <stdexcept>

#include "vlink/txdsp.hpp"

namespace vlink {

namespace {
constexpr int kGrayToIndex[4] = {0, 1, 3, 2};  // bits b1b0 -> index
constexpr int kIndexToGray[4] = {0, 1, 3, 2};
}  // namespace

SymbolSeq map_bits(std::span<const std::uint8_t> bits, const Alphabet& alphabet) {
  std::vector<int> idx;
  if (alphabet.order() == 4) {
    if (bits.size() % 2 != 0) throw std::invalid_argument("PAM-4 mapping needs an even number of bits");
    idx.reserve(bits.size() / 2);
    for (std::size_t i = 0; i < bits.size(); i += 2) idx.push_back(kGrayToIndex[(bits[i] & 1) << 1 | (bits[i + 1] & 1)]);
  } else {
    if (bits.size() % 5 != 0) throw std::invalid_argument("PAM-6 mapping needs a multiple of 5 bits");
    const auto& code = Pam6PairCode::instance();
    idx.reserve(bits.size() / 5 * 2);
    for (std::size_t i = 0; i < bits.size(); i += 5) {
      unsigned w = 0;
      for (std::size_t b = 0; b < 5; ++b) w = (w << 1) | (bits[i + b] & 1u);
      const auto [a, c] = code.encode(w);
      idx.push_back(a);
      idx.push_back(c);
    }
  }
  return SymbolSeq(alphabet, std::move(idx));
}

std::vector<std::uint8_t> demap_symbols(const SymbolSeq& symbols) {
  std::vector<std::uint8_t> bits;
  if (symbols.alphabet.order() == 4) {
    bits.reserve(symbols.size() * 2);
    for (int s : symbols.indices) {
      const int g = kIndexToGray[s];
      bits.push_back(static_cast<std::uint8_t>(g >> 1));
      bits.push_back(static_cast<std::uint8_t>(g & 1));
    }
  } else {
    if (symbols.size() % 2 != 0) throw std::invalid_argument("PAM-6 demapping needs an even symbol count");
    const auto& code = Pam6PairCode::instance();
    bits.reserve(symbols.size() / 2 * 5);
    for (std::size_t i = 0; i < symbols.size(); i += 2) {
      const unsigned w = code.decode(symbols[i], symbols[i + 1]);
      for (int b = 4; b >= 0; --b) bits.push_back(static_cast<std::uint8_t>((w >> b) & 1u));
    }
  }
  return bits;
}

SymbolSeq db_precode(const SymbolSeq& s, int p0) {
  const int m = s.alphabet.order();
  if (p0 < 0 || p0 >= m) throw std::out_of_range("precoder initial state outside alphabet");
  std::vector<int> p(s.size());
  int prev = p0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    prev = ((s[k] - prev) % m + m) % m;
    p[k] = prev;
  }
  return SymbolSeq(s.alphabet, std::move(p));
}

std::vector<double> db_target_levels(const Alphabet& alphabet) {
  // level(i) + level(j) = 2 (i + j) - 2 (M - 1), one value per i + j.
  std::vector<double> out;
  const int m = alphabet.order();
  for (int q = 0; q <= 2 * (m - 1); ++q) out.push_back(2.0 * q - 2.0 * (m - 1));
  return out;
}

}  // namespace vlink
