#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace hartogs {

// Order of a holomorphic bi-derivative (b1 in z1, b2 in z2).
struct MultiIndex2 {
  int b1 = 0;
  int b2 = 0;
  int total() const { return b1 + b2; }
  friend bool operator==(MultiIndex2 a, MultiIndex2 b) { return a.b1 == b.b1 && a.b2 == b.b2; }
};

// Full real-derivative multi-index (z1, z2, conj z1, conj z2).
struct MultiIndex4 {
  int a1 = 0, a2 = 0, a1c = 0, a2c = 0;
  int total() const { return a1 + a2 + a1c + a2c; }
  friend bool operator==(MultiIndex4 a, MultiIndex4 b) {
    return a.a1 == b.a1 && a.a2 == b.a2 && a.a1c == b.a1c && a.a2c == b.a2c;
  }
};

// All 4-slot multi-indices with |alpha| <= depth, lexicographic within each
// total order. Order is fixed so serialized bundles are stable.
inline std::vector<MultiIndex4> multi_indices_up_to(int depth) {
  std::vector<MultiIndex4> out;
  for (int t = 0; t <= depth; ++t)
    for (int a1 = t; a1 >= 0; --a1)
      for (int a2 = t - a1; a2 >= 0; --a2)
        for (int a1c = t - a1 - a2; a1c >= 0; --a1c)
          out.push_back({a1, a2, a1c, t - a1 - a2 - a1c});
  return out;
}

inline std::vector<MultiIndex2> bi_indices_up_to(int depth) {
  std::vector<MultiIndex2> out;
  for (int t = 0; t <= depth; ++t)
    for (int b1 = t; b1 >= 0; --b1) out.push_back({b1, t - b1});
  return out;
}

}  // namespace hartogs
