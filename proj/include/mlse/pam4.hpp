#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mlse {

// PAM4 amplitude levels in ascending order.
inline constexpr std::array<int, 4> kPam4Levels{-3, -1, 1, 3};

using SymbolFrame = std::vector<int>;     // PAM4 levels, each in {-3,-1,1,3}
using SampleFrame = std::vector<double>;  // real-valued samples

inline bool is_pam4_level(int level) {
  return level == -3 || level == -1 || level == 1 || level == 3;
}

// Level -> position in kPam4Levels.
inline int pam4_index(int level) {
  switch (level) {
    case -3: return 0;
    case -1: return 1;
    case 1: return 2;
    case 3: return 3;
  }
  throw std::invalid_argument("pam4_index: level must be one of -3,-1,1,3");
}

// Nearest PAM4 level. Decision thresholds sit at -2, 0, +2; a value exactly
// on a threshold resolves to the lower level.
inline int slice_pam4(double x) {
  if (x <= -2.0) return -3;
  if (x <= 0.0) return -1;
  if (x <= 2.0) return 1;
  return 3;
}

// An ordered subset of the PAM4 levels (ascending). Detectors restricted to
// fewer than four states carry one of these per trellis epoch.
struct CandidateSet {
  std::array<std::int8_t, 4> levels{};
  int size = 0;

  bool contains(int level) const {
    for (int i = 0; i < size; ++i)
      if (levels[i] == level) return true;
    return false;
  }
  // Position of `level` inside the set, or -1 when absent.
  int index_of(int level) const {
    for (int i = 0; i < size; ++i)
      if (levels[i] == level) return i;
    return -1;
  }
};

inline CandidateSet full_pam4_set() {
  return CandidateSet{{-3, -1, 1, 3}, 4};
}

// Gray mapping per bit pair: 00 -> -3, 01 -> -1, 11 -> 1, 10 -> 3.
// Adjacent levels differ in exactly one bit.
SymbolFrame map_pam4(const std::vector<int>& bits);
std::vector<int> demap_pam4(const SymbolFrame& symbols);

}  // namespace mlse
