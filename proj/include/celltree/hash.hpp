#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <string_view>

namespace celltree {

/// FNV-1a, 64-bit. Used for content fingerprints, never for security.
class Fnv1a {
 public:
  void bytes(std::span<const unsigned char> data) noexcept {
    for (unsigned char c : data) {
      state_ ^= c;
      state_ *= kPrime;
    }
  }
  void text(std::string_view s) noexcept {
    bytes({reinterpret_cast<const unsigned char*>(s.data()), s.size()});
  }
  void u64(std::uint64_t v) noexcept {
    for (int i = 0; i < 8; ++i) {
      state_ ^= static_cast<unsigned char>(v >> (8 * i));
      state_ *= kPrime;
    }
  }
  void f64(double v) noexcept { u64(std::bit_cast<std::uint64_t>(v)); }

  std::uint64_t digest() const noexcept { return state_; }

 private:
  static constexpr std::uint64_t kOffset = 0xcbf29ce484222325ULL;
  static constexpr std::uint64_t kPrime = 0x100000001b3ULL;
  std::uint64_t state_ = kOffset;
};

}  // namespace celltree
