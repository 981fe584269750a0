#pragma once

// Seeded random streams with cross-platform reproducible output.
//
// std::mt19937_64 produces an identical word sequence on every platform, but
// the standard distributions (uniform_int_distribution etc.) do not, so the
// bounded draws here are implemented directly on top of the raw word stream.

#include <cstdint>
#include <random>
#include <stdexcept>

namespace iqp {

// SplitMix64 finalizer; used to derive independent child streams from a
// parent seed without correlating the two mt19937_64 sequences.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), eng_(seed) {}

    // Fresh OS entropy; the chosen seed is recoverable via seed() so callers
    // can echo it into manifests for later reproduction.
    static Rng from_entropy() {
        std::random_device rd;
        std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
        return Rng(s);
    }

    std::uint64_t seed() const { return seed_; }

    // Next 64 raw bits.
    std::uint64_t word() { return eng_(); }

    bool bit() { return (word() >> 63) != 0; }

    // Uniform in [0, bound); rejection sampling for exact uniformity.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
        std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
        for (;;) {
            std::uint64_t x = word();
            if (x >= threshold) return x % bound;
        }
    }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(below(n)); }

    // Uniform in [0, 1), 53-bit resolution.
    double real() { return static_cast<double>(word() >> 11) * 0x1.0p-53; }

    // Independent child stream; distinct salts give distinct streams.
    Rng fork(std::uint64_t salt) const { return Rng(mix64(seed_ ^ mix64(salt + 0x6a09e667f3bcc909ull))); }

private:
    std::uint64_t seed_;
    std::mt19937_64 eng_;
};

}  // namespace iqp
