#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace vlink {

enum class Modulation { pam4, pam6 };

std::string to_string(Modulation m);
Modulation modulation_from_string(const std::string& name);

/// PAM-M level set. Levels are the integers 2i - (M-1), i = 0..M-1, so
/// adjacent levels are 2 apart and the set is zero-mean.
class Alphabet {
 public:
  static Alphabet pam(int order);
  static Alphabet of(Modulation m);

  int order() const { return order_; }
  double level(int index) const { return levels_[static_cast<std::size_t>(index)]; }
  std::span<const double> levels() const { return levels_; }

  /// 4 for PAM-4 (2 bits/symbol), 5 for pair-coded PAM-6.
  int bits_per_2symbols() const { return order_ == 4 ? 4 : 5; }
  double bits_per_symbol() const { return bits_per_2symbols() / 2.0; }

  /// Mean of level^2 over equiprobable symbols.
  double level_power() const;

  Modulation modulation() const { return order_ == 4 ? Modulation::pam4 : Modulation::pam6; }

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  explicit Alphabet(int order);

  int order_;
  std::vector<double> levels_;
};

/// Index-domain symbol stream. Every index is in [0, M).
struct SymbolSeq {
  Alphabet alphabet;
  std::vector<int> indices;

  SymbolSeq(Alphabet a, std::vector<int> idx);

  std::size_t size() const { return indices.size(); }
  int operator[](std::size_t k) const { return indices[k]; }
};

}  // namespace vlink
