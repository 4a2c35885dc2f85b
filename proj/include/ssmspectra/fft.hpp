#pragma once

#include <bit>
#include <cstddef>
#include <span>
#include <utility>

#include "core.hpp"

namespace ssmspectra::fft {

inline std::size_t next_pow2(std::size_t n) noexcept { return n <= 1 ? 1 : std::bit_ceil(n); }

/// In-place iterative radix-2 transform. Forward uses e^{-i 2 pi k n / M}; the inverse
/// includes the 1/M factor. Size must be a power of two.
inline void transform(std::span<Complex> a, bool inverse = false)
{
    const std::size_t n = a.size();
    if (n == 0 || !std::has_single_bit(n)) {
        throw Error(Errc::invalid_argument, "fft: size must be a power of two");
    }

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) {
            j ^= bit;
        }
        j ^= bit;
        if (i < j) {
            std::swap(a[i], a[j]);
        }
    }

    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        // twiddles evaluated directly per index; recurrence drifts for large n
        for (std::size_t k = 0; k < half; ++k) {
            const double angle = sign * kTwoPi * static_cast<double>(k) / static_cast<double>(len);
            const Complex w{std::cos(angle), std::sin(angle)};
            for (std::size_t i = k; i < n; i += len) {
                const Complex u = a[i];
                const Complex v = a[i + half] * w;
                a[i] = u + v;
                a[i + half] = u - v;
            }
        }
    }

    if (inverse) {
        const double scale = 1.0 / static_cast<double>(n);
        for (auto& z : a) {
            z *= scale;
        }
    }
}

} // namespace ssmspectra::fft
