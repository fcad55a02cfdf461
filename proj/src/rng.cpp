#include "volvar/rng.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace volvar::rng {

namespace {

constexpr std::uint32_t kMulA = 0xD2511F53;
constexpr std::uint32_t kMulB = 0xCD9E8D57;
constexpr std::uint32_t kWeylA = 0x9E3779B9;
constexpr std::uint32_t kWeylB = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

} // namespace

Philox4x32::Counter Philox4x32::block(Counter c, Key k) noexcept {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMulA, c[0], hi0, lo0);
        mulhilo(kMulB, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += kWeylA;
        k[1] += kWeylB;
    }
    return c;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view stage) noexcept {
    // FNV-1a over the stage label, then mixed with the master seed.
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const unsigned char ch : stage) {
        h ^= ch;
        h *= 0x100000001B3ULL;
    }
    return mix64(master ^ mix64(h));
}

double to_open_unit(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

PathNormals::PathNormals(std::uint64_t seed, std::uint64_t path) noexcept
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      path_lo_(static_cast<std::uint32_t>(path)),
      path_hi_(static_cast<std::uint32_t>(path >> 32)) {}

void PathNormals::fill(std::uint64_t first, double* out, std::size_t count) const noexcept {
    // Counter layout: (block lo, block hi, path lo, path hi). Block b holds
    // draws 2b and 2b + 1 of the path, a Box-Muller pair.
    auto pair = [&](std::uint64_t block) {
        const auto words = Philox4x32::block({static_cast<std::uint32_t>(block),
                                              static_cast<std::uint32_t>(block >> 32), path_lo_,
                                              path_hi_},
                                             key_);
        const double u1 = to_open_unit((static_cast<std::uint64_t>(words[0]) << 32) | words[1]);
        const double u2 = to_open_unit((static_cast<std::uint64_t>(words[2]) << 32) | words[3]);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        return std::pair{radius * std::cos(angle), radius * std::sin(angle)};
    };
    std::size_t produced = 0;
    std::uint64_t index = first;
    while (produced < count) {
        const auto [even, odd] = pair(index / 2);
        if (index % 2 == 0) {
            out[produced++] = even;
            ++index;
            if (produced == count) break;
        }
        out[produced++] = odd;
        ++index;
    }
}

} // namespace volvar::rng
