#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace volvar::rng {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A block is a
/// pure function of (counter, key), so any path/step can be drawn
/// independently of the order in which other draws happen.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter counter, Key key) noexcept;
};

/// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Sub-seed for a named stage, derived deterministically from the master seed.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stage) noexcept;

/// Standard-normal draws for one simulation path. Draw `index` is fixed by
/// (seed, path, index) alone.
class PathNormals {
public:
    PathNormals(std::uint64_t seed, std::uint64_t path) noexcept;

    /// Writes draws first .. first + count - 1 to `out`.
    void fill(std::uint64_t first, double* out, std::size_t count) const noexcept;

private:
    Philox4x32::Key key_;
    std::uint32_t path_lo_;
    std::uint32_t path_hi_;
};

/// Uniform double in (0, 1) from 64 random bits (52 random mantissa bits, never 0 or 1).
double to_open_unit(std::uint64_t bits) noexcept;

} // namespace volvar::rng
