#include "hse/rng.hpp"

#include "hse/types.hpp"

namespace hse {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t child_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

Rng Rng::split(std::uint64_t stream) const { return Rng(child_seed(seed_, stream)); }

std::uint64_t checked_pow(std::uint64_t base, unsigned exponent) {
  std::uint64_t result = 1;
  for (unsigned i = 0; i < exponent; ++i) {
    if (base != 0 && result > UINT64_MAX / base) {
      throw CapacityError("integer power overflows 64 bits");
    }
    result *= base;
  }
  return result;
}

}  // namespace hse
