#pragma once

#include <cstdint>
#include <vector>

namespace headgate {

// SplitMix64 (Steele, Lea, Flood 2014). Chosen for subset sampling because the
// state transition and output mix are fully specified here, so selections are
// reproducible across platforms and standard-library versions. Constants:
// gamma 0x9E3779B97F4A7C15, mixers 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform draw in [0, bound) via 128-bit multiply-shift (Lemire). The tiny
    // modulo bias of the plain remainder is avoidable at no cost, and the
    // result stays platform-independent.
    std::uint64_t bounded(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

  private:
    std::uint64_t state_;
};

// Fisher-Yates with the SplitMix64 stream.
template <typename T>
void seeded_shuffle(std::vector<T>& items, SplitMix64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.bounded(i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace headgate
