#pragma once

// Seedless 128-bit FNV-1a, so fingerprints are identical across runs and
// platforms.

#include <cstdint>
#include <string_view>

namespace vulnaudit::detail {

class Fnv128 {
 public:
  void update(std::string_view bytes) noexcept {
    for (unsigned char c : bytes) {
      state_ ^= c;
      state_ *= kPrime;
    }
  }

  // Length prefix keeps token boundaries unambiguous.
  void update_token(std::string_view text) noexcept {
    std::uint64_t len = text.size();
    for (int i = 0; i < 8; ++i) {
      state_ ^= static_cast<unsigned char>(len & 0xff);
      state_ *= kPrime;
      len >>= 8;
    }
    update(text);
  }

  std::uint64_t high() const noexcept { return static_cast<std::uint64_t>(state_ >> 64); }
  std::uint64_t low() const noexcept { return static_cast<std::uint64_t>(state_); }

 private:
  using u128 = unsigned __int128;
  static constexpr u128 kOffset =
      (static_cast<u128>(0x6c62272e07bb0142ULL) << 64) | 0x62b821756295c58dULL;
  static constexpr u128 kPrime = (static_cast<u128>(1) << 88) | 0x13bU;

  u128 state_ = kOffset;
};

}  // namespace vulnaudit::detail
