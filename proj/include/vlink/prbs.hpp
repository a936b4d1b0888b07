#pragma once

#include <cstdint>
#include <vector>

namespace vlink {

/// Maximal-length LFSR bits for x^7+x^6+1, x^15+x^14+1 or x^31+x^28+1.
/// `seed` is the initial register state (masked to `degree` bits, nonzero).
std::vector<std::uint8_t> prbs_bits(int degree, std::uint64_t seed, std::size_t n);

}  // namespace vlink
