#pragma once

// Convolution kernels of discrete diagonal systems: Vandermonde powers, basis and full
// kernels, causal convolution (direct and FFT), and the stateful recurrence.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "core.hpp"
#include "fft.hpp"

namespace ssmspectra {

/// Above this many powers, lambda^l is evaluated as exp(l log lambda) to stop the rounding
/// drift of repeated multiplication.
inline constexpr std::size_t kPowerCrossover = std::size_t{1} << 16;

/// Largest L*N for which a Vandermonde matrix may be materialized densely.
inline constexpr std::size_t kDenseVandermondeCap = std::size_t{1} << 24;

namespace detail {

    inline ComplexVector powers_iterative(Complex z, std::size_t length)
    {
        ComplexVector out(length);
        Complex acc{1.0, 0.0};
        for (std::size_t l = 0; l < length; ++l) {
            out[l] = acc;
            acc *= z;
        }
        return out;
    }

    inline ComplexVector powers_exp_log(Complex z, std::size_t length)
    {
        ComplexVector out(length);
        if (z == Complex{}) {
            if (length > 0) {
                out[0] = 1.0;
            }
            return out;
        }
        const Complex log_z = std::log(z);
        for (std::size_t l = 0; l < length; ++l) {
            out[l] = std::exp(static_cast<double>(l) * log_z);
        }
        return out;
    }

    inline void require_discrete(const DiagonalSSM& sys, const char* what)
    {
        if (sys.domain() != Domain::discrete) {
            throw Error(Errc::domain_mismatch, std::string(what) + ": system must be discrete");
        }
    }

    inline void require_length(std::size_t length, const char* what)
    {
        if (length == 0) {
            throw Error(Errc::invalid_argument, std::string(what) + ": length must be positive");
        }
    }

} // namespace detail

/// z^0 .. z^{L-1}
inline ComplexVector pole_powers(Complex z, std::size_t length)
{
    return length > kPowerCrossover ? detail::powers_exp_log(z, length) : detail::powers_iterative(z, length);
}

/// V(l, n) = lambda_n^l for l < rows. Entries are generated on demand; dense() is limited to
/// kDenseVandermondeCap elements.
class VandermondeMatrix {
public:
    VandermondeMatrix(PoleSet poles, std::size_t rows) : poles_(std::move(poles)), rows_(rows)
    {
        if (poles_.domain() != Domain::discrete) {
            throw Error(Errc::domain_mismatch, "VandermondeMatrix: poles must be discrete");
        }
        detail::require_length(rows, "VandermondeMatrix");
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return poles_.order(); }
    [[nodiscard]] const PoleSet& poles() const noexcept { return poles_; }

    [[nodiscard]] Complex entry(std::size_t l, std::size_t n) const
    {
        if (l >= rows_ || n >= cols()) {
            throw Error(Errc::index_out_of_range, "VandermondeMatrix: entry out of range");
        }
        return l == 0 ? Complex{1.0, 0.0} : std::pow(poles_[n], static_cast<double>(l));
    }

    [[nodiscard]] ComplexVector column(std::size_t n) const
    {
        if (n >= cols()) {
            throw Error(Errc::index_out_of_range, "VandermondeMatrix: column out of range");
        }
        return pole_powers(poles_[n], rows_);
    }

    [[nodiscard]] Eigen::MatrixXcd dense() const
    {
        if (rows_ > kDenseVandermondeCap / cols()) {
            throw Error(Errc::size_limit, "VandermondeMatrix: L*N exceeds the dense materialization cap");
        }
        Eigen::MatrixXcd v(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols()));
        for (std::size_t n = 0; n < cols(); ++n) {
            const ComplexVector c = column(n);
            for (std::size_t l = 0; l < rows_; ++l) {
                v(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(n)) = c[l];
            }
        }
        return v;
    }

private:
    PoleSet poles_;
    std::size_t rows_;
};

/// K_n[l] = lambda_n^l * B_n
inline ComplexVector basis_kernel(const DiagonalSSM& sys, std::size_t n, std::size_t length)
{
    detail::require_discrete(sys, "basis_kernel");
    detail::require_length(length, "basis_kernel");
    if (n >= sys.order()) {
        throw Error(Errc::index_out_of_range, "basis_kernel: mode index out of range");
    }
    ComplexVector k = pole_powers(sys.poles()[n], length);
    const Complex b = sys.input_proj()[n];
    for (auto& v : k) {
        v *= b;
    }
    return k;
}

enum class Reduction {
    pairwise,   // fixed binary tree over modes; bit-reproducible
    sequential, // left-to-right accumulation
};

namespace detail {

    inline ComplexVector weighted_mode(const DiagonalSSM& sys, std::size_t n, std::size_t length)
    {
        ComplexVector k = basis_kernel(sys, n, length);
        const Complex c = sys.output_proj()[n];
        for (auto& v : k) {
            v *= c;
        }
        return k;
    }

    inline ComplexVector pairwise_sum(const DiagonalSSM& sys, std::size_t lo, std::size_t hi, std::size_t length)
    {
        if (hi - lo == 1) {
            return weighted_mode(sys, lo, length);
        }
        const std::size_t mid = lo + (hi - lo) / 2;
        ComplexVector left = pairwise_sum(sys, lo, mid, length);
        const ComplexVector right = pairwise_sum(sys, mid, hi, length);
        for (std::size_t l = 0; l < length; ++l) {
            left[l] += right[l];
        }
        return left;
    }

} // namespace detail

/// K[l] = sum_n C_n B_n lambda_n^l. The returned kernel holds Re(K) and keeps the complex values.
inline Kernel full_kernel(const DiagonalSSM& sys, std::size_t length, Reduction reduction = Reduction::pairwise)
{
    detail::require_discrete(sys, "full_kernel");
    detail::require_length(length, "full_kernel");
    if (reduction == Reduction::pairwise) {
        return Kernel(detail::pairwise_sum(sys, 0, sys.order(), length));
    }
    ComplexVector acc(length);
    for (std::size_t n = 0; n < sys.order(); ++n) {
        const ComplexVector k = detail::weighted_mode(sys, n, length);
        for (std::size_t l = 0; l < length; ++l) {
            acc[l] += k[l];
        }
    }
    return Kernel(std::move(acc));
}

/// y[l] = sum_{s<=l} k[s] x[l-s], O(L^2).
inline std::vector<double> convolve_naive(std::span<const double> x, std::span<const double> k)
{
    if (x.size() != k.size()) {
        throw Error(Errc::length_mismatch, "convolve: input and kernel lengths differ");
    }
    const std::size_t n = x.size();
    std::vector<double> y(n, 0.0);
    for (std::size_t l = 0; l < n; ++l) {
        double acc = 0.0;
        for (std::size_t s = 0; s <= l; ++s) {
            acc += k[s] * x[l - s];
        }
        y[l] = acc;
    }
    return y;
}

/// Same result as convolve_naive via zero-padded FFT of size >= 2L - 1.
inline std::vector<double> convolve_fft(std::span<const double> x, std::span<const double> k)
{
    if (x.size() != k.size()) {
        throw Error(Errc::length_mismatch, "convolve: input and kernel lengths differ");
    }
    const std::size_t n = x.size();
    if (n == 0) {
        return {};
    }
    const std::size_t m = fft::next_pow2(2 * n - 1);
    ComplexVector a(m);
    ComplexVector b(m);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = x[i];
        b[i] = k[i];
    }
    fft::transform(a);
    fft::transform(b);
    for (std::size_t i = 0; i < m; ++i) {
        a[i] *= b[i];
    }
    fft::transform(a, true);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = a[i].real();
    }
    return y;
}

enum class ConvolutionMethod { automatic, naive, fft };

/// Causal linear convolution of x with a kernel of the same length.
inline std::vector<double> apply_kernel(
    std::span<const double> x, const Kernel& k, ConvolutionMethod method = ConvolutionMethod::automatic)
{
    if (x.size() != k.length()) {
        throw Error(Errc::length_mismatch, "apply_kernel: input and kernel lengths differ");
    }
    if (method == ConvolutionMethod::naive || (method == ConvolutionMethod::automatic && x.size() <= 64)) {
        return convolve_naive(x, k.values());
    }
    return convolve_fft(x, k.values());
}

/// h[l] = Lambda h[l-1] + B x[l] from h = 0, y[l] = Re(C^T h[l]).
inline std::vector<double> recurrent_scan(const DiagonalSSM& sys, std::span<const double> x)
{
    detail::require_discrete(sys, "recurrent_scan");
    const std::size_t n = sys.order();
    ComplexVector h(n);
    std::vector<double> y(x.size());
    const auto poles = sys.poles().poles();
    const auto b = sys.input_proj();
    const auto c = sys.output_proj();
    for (std::size_t l = 0; l < x.size(); ++l) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            h[k] = poles[k] * h[k] + b[k] * x[l];
            acc += (c[k] * h[k]).real();
        }
        y[l] = acc;
    }
    return y;
}

/// V^* V for V(l, n) = lambda_n^l, l < length.
inline Eigen::MatrixXcd vandermonde_gram(const PoleSet& poles, std::size_t length)
{
    const Eigen::MatrixXcd v = VandermondeMatrix(poles, length).dense();
    return v.adjoint() * v;
}

} // namespace ssmspectra
