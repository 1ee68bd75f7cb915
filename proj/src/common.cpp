#include "pathsel/common.hpp"

#include <cmath>

namespace pathsel {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  // seed_seq mixes the pair (seed, stream) into the full mt19937_64 state, so
  // distinct streams from one seed are decorrelated.
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream & 0xffffffffu),
                    static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

int popcount(const BinaryVector& bits) {
  int n = 0;
  for (auto b : bits) n += (b != 0);
  return n;
}

std::string to_hex(const BinaryVector& bits) {
  const int n = static_cast<int>(bits.size());
  const int n_digits = (n + 3) / 4;
  static const char* digits = "0123456789abcdef";
  std::string out(static_cast<std::size_t>(n_digits), '0');
  for (int d = 0; d < n_digits; ++d) {
    int nibble = 0;
    for (int b = 0; b < 4; ++b) {
      const int j = 4 * d + b;
      if (j < n && bits[j]) nibble |= 1 << b;
    }
    out[n_digits - 1 - d] = digits[nibble];
  }
  return out;
}

BinaryVector from_hex(const std::string& hex, int n_bits) {
  const int n_digits = (n_bits + 3) / 4;
  if (static_cast<int>(hex.size()) != n_digits)
    throw DataError("hex string '" + hex + "' does not encode " + std::to_string(n_bits) + " bits");
  BinaryVector bits(static_cast<std::size_t>(n_bits), 0);
  for (int d = 0; d < n_digits; ++d) {
    const char c = hex[n_digits - 1 - d];
    int nibble;
    if (c >= '0' && c <= '9') nibble = c - '0';
    else if (c >= 'a' && c <= 'f') nibble = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') nibble = c - 'A' + 10;
    else throw DataError(std::string("invalid hex digit '") + c + "'");
    for (int b = 0; b < 4; ++b) {
      const int j = 4 * d + b;
      if (j < n_bits) bits[j] = (nibble >> b) & 1;
      else if ((nibble >> b) & 1)
        throw DataError("hex string '" + hex + "' has bits beyond position " + std::to_string(n_bits - 1));
    }
  }
  return bits;
}

double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace pathsel
