#include <limits>
#include <stdexcept>

#include "vlink/txdsp.hpp"

namespace vlink {

bool Pam6PairCode::excluded(int first, int second) {
  return (first == 0 || first == 5) && (second == 0 || second == 5);
}

Pam6PairCode::Pam6PairCode() {
  unsigned word = 0;
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b)
      if (!excluded(a, b)) encode_[word++] = {a, b};

  for (int a = 0; a < 6; ++a) {
    for (int b = 0; b < 6; ++b) {
      int best_d = std::numeric_limits<int>::max();
      unsigned best_w = 0;
      for (unsigned w = 0; w < 32; ++w) {
        const auto [x, y] = encode_[w];
        const int d = (x - a) * (x - a) + (y - b) * (y - b);
        if (d < best_d) {  // encode_ is lexicographic, so the first hit wins ties
          best_d = d;
          best_w = w;
        }
      }
      decode_[static_cast<std::size_t>(a * 6 + b)] = best_w;
    }
  }
}

const Pam6PairCode& Pam6PairCode::instance() {
  static const Pam6PairCode code;
  return code;
}

std::pair<int, int> Pam6PairCode::encode(unsigned word) const {
  if (word >= 32) throw std::out_of_range("PAM-6 pair code word must be < 32");
  return encode_[word];
}

unsigned Pam6PairCode::decode(int first, int second) const {
  if (first < 0 || first > 5 || second < 0 || second > 5) throw std::out_of_range("PAM-6 index out of range");
  return decode_[static_cast<std::size_t>(first * 6 + second)];
}

}  // namespace vlink
