#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace ssmspectra {

/// SplitMix64 (Steele, Lea, Flood 2014). 64-bit state, output is a fixed bijective mix of a
/// Weyl sequence, so streams are identical on every platform. Uniform and Gaussian draws are
/// derived here rather than through <random> distributions, whose outputs are
/// implementation-defined.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept
    {
        state_ += kGamma;
        return mix(state_);
    }

    /// Independent generator for substream `stream` (e.g. a machine index).
    [[nodiscard]] constexpr SplitMix64 split(std::uint64_t stream) const noexcept
    {
        return SplitMix64(mix(state_ ^ mix(stream + kGamma)));
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1].
    double uniform_open_left() noexcept { return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; the second variate of each pair is cached.
    double normal() noexcept
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_open_left()));
        const double t = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept
    {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Seed for (machine, purpose) derived from a root seed; used so per-machine draws do not
/// depend on construction order.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t machine, std::uint64_t purpose) noexcept
{
    return SplitMix64::mix(SplitMix64::mix(root ^ SplitMix64::mix(machine + 1)) + purpose);
}

} // namespace ssmspectra
