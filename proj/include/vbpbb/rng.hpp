#pragma once

#include <cstdint>
#include <limits>

namespace vbpbb {

__extension__ using uint128_t = unsigned __int128;

/// SplitMix64 output mix.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Key for substream `index` of `seed`; distinct indices give unrelated keys.
constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t index) noexcept
{
    return mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// Counter-based generator: draw i of a stream is mix64(key + i * gamma).
/// Any (seed, stream) pair can be reconstructed without replaying other
/// streams, so parallel and serial ensembles agree bit for bit.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_(derive_key(seed, stream))
    {
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept
    {
        return mix64(key_ + (counter_++) * 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform integer in [0, bound), bound > 0 (Lemire's multiply-shift with rejection).
    std::uint64_t below(std::uint64_t bound) noexcept
    {
        uint128_t product = static_cast<uint128_t>((*this)()) * bound;
        auto low = static_cast<std::uint64_t>(product);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                product = static_cast<uint128_t>((*this)()) * bound;
                low = static_cast<std::uint64_t>(product);
            }
        }
        return static_cast<std::uint64_t>(product >> 64);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace vbpbb
