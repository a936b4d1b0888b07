#include "vlink/alphabet.hpp"

#include <stdexcept>

namespace vlink {

std::string to_string(Modulation m) { return m == Modulation::pam4 ? "PAM4" : "PAM6"; }

Modulation modulation_from_string(const std::string& name) {
  if (name == "PAM4" || name == "pam4") return Modulation::pam4;
  if (name == "PAM6" || name == "pam6") return Modulation::pam6;
  throw std::invalid_argument("unknown modulation '" + name + "' (expected PAM4 or PAM6)");
}

Alphabet::Alphabet(int order) : order_(order) {
  if (order != 4 && order != 6) throw std::invalid_argument("PAM order must be 4 or 6");
  levels_.reserve(static_cast<std::size_t>(order));
  for (int i = 0; i < order; ++i) levels_.push_back(2.0 * i - (order - 1));
}

Alphabet Alphabet::pam(int order) { return Alphabet(order); }

Alphabet Alphabet::of(Modulation m) { return Alphabet(m == Modulation::pam4 ? 4 : 6); }

double Alphabet::level_power() const {
  double acc = 0.0;
  for (double l : levels_) acc += l * l;
  return acc / order_;
}

SymbolSeq::SymbolSeq(Alphabet a, std::vector<int> idx) : alphabet(std::move(a)), indices(std::move(idx)) {
  for (int i : indices)
    if (i < 0 || i >= alphabet.order()) throw std::out_of_range("symbol index outside alphabet");
}

}  // namespace vlink
