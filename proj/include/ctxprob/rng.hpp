#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace ctxprob {

// SplitMix64 (Steele, Lea & Flood 2014). Output i is mix(key + (i+1)*gamma),
// so a stream is fully determined by its 64-bit key.
class SplitMix64 final {
public:
    using result_type = std::uint64_t;

    static constexpr std::string_view name = "splitmix64";

    explicit constexpr SplitMix64(std::uint64_t key) noexcept : state_(key) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }

    constexpr result_type operator()() noexcept {
        state_ += kGamma;
        return mix(state_);
    }

    // Uniform double in [0,1) with 53 random bits.
    constexpr double next_unit() noexcept {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
    std::uint64_t state_;
};

// Key of the substream identified by `tag` under `seed`. Distinct tags give
// unrelated streams; adding a tag never shifts another tag's draws.
constexpr std::uint64_t substream_key(std::uint64_t seed, std::uint64_t tag) noexcept {
    return SplitMix64::mix(seed ^ SplitMix64::mix(tag + 0x632be59bd9b4e019ULL));
}

} // namespace ctxprob
