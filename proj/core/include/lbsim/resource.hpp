#pragma once

#include <array>
#include <cstdint>

namespace lbsim {

// Quantities of the four tracked hardware resources (CPU, RAM, HDD, BW),
// in abstract capacity units. Used for demands, capacities and occupancy.
struct ResourceVector {
  static constexpr int kDims = 4;

  std::array<int64_t, kDims> v{0, 0, 0, 0};

  constexpr ResourceVector() = default;
  constexpr ResourceVector(int64_t cpu, int64_t ram, int64_t hdd, int64_t bw)
      : v{cpu, ram, hdd, bw} {}

  constexpr int64_t cpu() const { return v[0]; }
  constexpr int64_t ram() const { return v[1]; }
  constexpr int64_t hdd() const { return v[2]; }
  constexpr int64_t bw() const { return v[3]; }

  constexpr int64_t& operator[](int i) { return v[static_cast<size_t>(i)]; }
  constexpr int64_t operator[](int i) const { return v[static_cast<size_t>(i)]; }

  // Component-wise "A fits within B": every component of *this <= other's.
  constexpr bool fits_within(const ResourceVector& other) const {
    for (int i = 0; i < kDims; ++i) {
      if (v[static_cast<size_t>(i)] > other.v[static_cast<size_t>(i)]) return false;
    }
    return true;
  }

  constexpr bool all_nonnegative() const {
    for (int i = 0; i < kDims; ++i) {
      if (v[static_cast<size_t>(i)] < 0) return false;
    }
    return true;
  }

  constexpr ResourceVector& operator+=(const ResourceVector& o) {
    for (int i = 0; i < kDims; ++i) v[static_cast<size_t>(i)] += o.v[static_cast<size_t>(i)];
    return *this;
  }
  constexpr ResourceVector& operator-=(const ResourceVector& o) {
    for (int i = 0; i < kDims; ++i) v[static_cast<size_t>(i)] -= o.v[static_cast<size_t>(i)];
    return *this;
  }
  friend constexpr ResourceVector operator+(ResourceVector a, const ResourceVector& b) {
    a += b;
    return a;
  }
  friend constexpr ResourceVector operator-(ResourceVector a, const ResourceVector& b) {
    a -= b;
    return a;
  }

  bool operator==(const ResourceVector&) const = default;
};

inline constexpr const char* kResourceNames[ResourceVector::kDims] = {"cpu", "ram", "hdd",
                                                                      "bw"};

}  // namespace lbsim
