#include "hse/fibonacci.hpp"

#include <stdexcept>

#include "hse/types.hpp"

namespace hse {

std::string fibonacci_word(int generation) {
  if (generation < 0) throw DomainError("Fibonacci generation must be >= 0");
  std::string older = "1";
  std::string current = "0";
  if (generation == 0) return older;
  for (int j = 1; j < generation; ++j) {
    std::string next = current + older;
    older = std::move(current);
    current = std::move(next);
  }
  return current;
}

int symbol_at(std::uint64_t t) {
  if (t < 1) throw DomainError("word positions are 1-indexed");
  // lengths[j] = |W_j|
  std::vector<std::uint64_t> lengths{1, 1};
  while (lengths.back() < t) lengths.push_back(lengths[lengths.size() - 1] + lengths[lengths.size() - 2]);
  std::size_t j = lengths.size() - 1;
  // W_j = W_{j-1} W_{j-2}
  while (j >= 2) {
    if (t <= lengths[j - 1]) {
      j -= 1;
    } else {
      t -= lengths[j - 1];
      j -= 2;
    }
  }
  return j == 1 ? 0 : 1;
}

DriveLabel drive_label(std::uint64_t step) { return symbol_at(step + 1) == 0 ? DriveLabel::A : DriveLabel::B; }

std::vector<DriveLabel> schedule(std::uint64_t horizon) {
  std::vector<DriveLabel> labels;
  labels.reserve(horizon);
  for (std::uint64_t k = 0; k < horizon; ++k) labels.push_back(drive_label(k));
  return labels;
}

char to_char(DriveLabel label) { return label == DriveLabel::A ? 'A' : 'B'; }

}  // namespace hse
