#pragma once

// Seeded sampling with results fixed by the standard (mt19937_64 is fully
// specified; the library distributions are not, so bounded draws are done
// here).

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace vulnaudit::detail {

class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, bound), bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = engine_();
      if (r >= threshold) return r % bound;
    }
  }

  /// Uniform random permutation of the first `k` positions (partial
  /// Fisher-Yates); the remaining elements are left in arbitrary order.
  template <typename T>
  void shuffle_prefix(std::vector<T>& items, std::size_t k) {
    const std::size_t n = items.size();
    for (std::size_t i = 0; i < k && i + 1 < n; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(below(n - i));
      std::swap(items[i], items[j]);
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    shuffle_prefix(items, items.size());
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace vulnaudit::detail
