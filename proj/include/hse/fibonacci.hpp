#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hse {

// Gate label of one time step of the aperiodic drive.
enum class DriveLabel : std::uint8_t { A, B };

// W_0 = "1", W_1 = "0", W_{j+1} = W_j W_{j-1}. Length is F(j) with F(0)=F(1)=1.
std::string fibonacci_word(int generation);

// Letter t (1-indexed) of the infinite word W_inf = 0100101001001...,
// in O(log t) by descending the length ladder.
int symbol_at(std::uint64_t t);

// Step k (0-based) applies U^(A) when symbol_at(k+1) == 0, else U^(B).
// Applying the labels in order gives ... U^(B) U^(A), rightmost first, so
// the first four steps are A, B, A, A.
DriveLabel drive_label(std::uint64_t step);

std::vector<DriveLabel> schedule(std::uint64_t horizon);

char to_char(DriveLabel label);

}  // namespace hse
