#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace clinsent {

/// Lowercased maximal runs of alphanumeric bytes. ASCII letters and digits count as
/// alphanumeric, as does every byte >= 0x80 so UTF-8 encoded letters stay inside a token.
std::vector<std::string> tokenize(std::string_view text);

/// Splits on ASCII and common Unicode whitespace, dropping empty pieces.
std::vector<std::string> split_whitespace(std::string_view text);

std::uint64_t fnv1a64(std::string_view bytes);

/// splitmix64 finalizer; a bijection on 64-bit values.
std::uint64_t mix64(std::uint64_t x);

/// Seeded 64-bit string hash, stable across platforms and builds.
inline std::uint64_t seeded_hash(std::string_view bytes, std::uint64_t seed) {
    return mix64(fnv1a64(bytes) ^ mix64(seed));
}

/// Seeded generator with platform-independent derived draws. The standard
/// distributions are implementation-defined, so uniform reals, bounded integers
/// and shuffles are derived here directly from the mt19937_64 stream.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t r;
        do {
            r = next();
        } while (r >= limit);
        return r % n;
    }

    template <typename T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            using std::swap;
            swap(items[i - 1], items[j]);
        }
    }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        shuffle(std::span<T>(items));
    }

  private:
    std::mt19937_64 engine_;
};

} // namespace clinsent
