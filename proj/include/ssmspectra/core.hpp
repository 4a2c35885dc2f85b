#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ssmspectra {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Slack on |pole| <= 1 for discrete pole sets built by stability-enforcing constructors.
inline constexpr double kUnitCircleSlack = 1e-12;

enum class Errc {
    invalid_order,
    invalid_argument,
    non_finite,
    length_mismatch,
    index_out_of_range,
    size_limit,
    instability,
    domain_mismatch,
    divergence,
    pole_evaluation,
    numerical,
};

/// Configuration-class errors (bad sizes, ranges, shapes) as opposed to numerical/domain failures.
constexpr bool is_config_error(Errc code) noexcept
{
    switch (code) {
    case Errc::invalid_order:
    case Errc::invalid_argument:
    case Errc::non_finite:
    case Errc::length_mismatch:
    case Errc::index_out_of_range:
    case Errc::size_limit:
        return true;
    default:
        return false;
    }
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

namespace detail {

    inline bool is_finite(const Complex& z) noexcept { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

    inline void require_finite(std::span<const Complex> values, const char* what)
    {
        for (const auto& z : values) {
            if (!is_finite(z)) {
                throw Error(Errc::non_finite, std::string(what) + ": non-finite value");
            }
        }
    }

    inline void require_finite(std::span<const double> values, const char* what)
    {
        for (double v : values) {
            if (!std::isfinite(v)) {
                throw Error(Errc::non_finite, std::string(what) + ": non-finite value");
            }
        }
    }

    inline void require_order(std::size_t n, const char* what)
    {
        if (n == 0) {
            throw Error(Errc::invalid_order, std::string(what) + ": order must be positive");
        }
    }

} // namespace detail

enum class Domain { continuous, discrete };

inline const char* to_string(Domain d) noexcept { return d == Domain::continuous ? "continuous" : "discrete"; }

/// Ordered eigenvalues of a diagonal state matrix, tagged with the time domain they live in.
class PoleSet {
public:
    PoleSet(ComplexVector poles, Domain domain) : poles_(std::move(poles)), domain_(domain)
    {
        detail::require_order(poles_.size(), "PoleSet");
        detail::require_finite(poles_, "PoleSet");
    }

    /// Like the plain constructor, but rejects poles outside the stable region
    /// (Re <= 0 for continuous, |z| <= 1 + slack for discrete) and records that it checked.
    static PoleSet stable(ComplexVector poles, Domain domain)
    {
        PoleSet set(std::move(poles), domain);
        for (std::size_t n = 0; n < set.poles_.size(); ++n) {
            const Complex& p = set.poles_[n];
            const bool ok = domain == Domain::continuous ? p.real() <= 0.0 : std::abs(p) <= 1.0 + kUnitCircleSlack;
            if (!ok) {
                throw Error(Errc::instability, "PoleSet: pole " + std::to_string(n) + " outside the stable region");
            }
        }
        set.stable_constructed_ = true;
        return set;
    }

    [[nodiscard]] std::span<const Complex> poles() const noexcept { return poles_; }
    [[nodiscard]] const Complex& operator[](std::size_t n) const { return poles_.at(n); }
    [[nodiscard]] std::size_t order() const noexcept { return poles_.size(); }
    [[nodiscard]] Domain domain() const noexcept { return domain_; }
    [[nodiscard]] bool stable_constructed() const noexcept { return stable_constructed_; }

    friend bool operator==(const PoleSet&, const PoleSet&) = default;

private:
    ComplexVector poles_;
    Domain domain_;
    bool stable_constructed_ = false;
};

inline ComplexVector ones(std::size_t n) { return ComplexVector(n, Complex{1.0, 0.0}); }

/// Parameters of one SISO diagonal system. Continuous systems carry the step used to
/// discretize them; discrete systems built by the DFouT family may carry their decays.
class DiagonalSSM {
public:
    static DiagonalSSM continuous(PoleSet poles, ComplexVector input_proj, ComplexVector output_proj, double step)
    {
        if (poles.domain() != Domain::continuous) {
            throw Error(Errc::domain_mismatch, "DiagonalSSM::continuous: poles are discrete");
        }
        if (!(step > 0.0) || !std::isfinite(step)) {
            throw Error(Errc::invalid_argument, "DiagonalSSM: step must be positive and finite");
        }
        return DiagonalSSM(std::move(poles), std::move(input_proj), std::move(output_proj), step, std::nullopt);
    }

    static DiagonalSSM discrete(PoleSet poles, ComplexVector input_proj, ComplexVector output_proj,
        std::optional<std::vector<double>> decay = std::nullopt)
    {
        if (poles.domain() != Domain::discrete) {
            throw Error(Errc::domain_mismatch, "DiagonalSSM::discrete: poles are continuous");
        }
        if (decay) {
            if (decay->size() != poles.order()) {
                throw Error(Errc::length_mismatch, "DiagonalSSM: decay length differs from order");
            }
            detail::require_finite(*decay, "DiagonalSSM decay");
            for (double xi : *decay) {
                if (xi < 0.0) {
                    throw Error(Errc::instability, "DiagonalSSM: negative decay");
                }
            }
        }
        return DiagonalSSM(std::move(poles), std::move(input_proj), std::move(output_proj), std::nullopt,
            std::move(decay));
    }

    [[nodiscard]] const PoleSet& poles() const noexcept { return poles_; }
    [[nodiscard]] std::span<const Complex> input_proj() const noexcept { return input_; }
    [[nodiscard]] std::span<const Complex> output_proj() const noexcept { return output_; }
    [[nodiscard]] std::optional<double> step() const noexcept { return step_; }
    [[nodiscard]] const std::optional<std::vector<double>>& decay() const noexcept { return decay_; }
    [[nodiscard]] std::size_t order() const noexcept { return poles_.order(); }
    [[nodiscard]] Domain domain() const noexcept { return poles_.domain(); }

    /// Copy with a different output projection.
    [[nodiscard]] DiagonalSSM with_output(ComplexVector output_proj) const
    {
        return DiagonalSSM(poles_, input_, std::move(output_proj), step_, decay_);
    }

    friend bool operator==(const DiagonalSSM&, const DiagonalSSM&) = default;

private:
    DiagonalSSM(PoleSet poles, ComplexVector input, ComplexVector output, std::optional<double> step,
        std::optional<std::vector<double>> decay)
        : poles_(std::move(poles)), input_(std::move(input)), output_(std::move(output)), step_(step),
          decay_(std::move(decay))
    {
        if (input_.size() != poles_.order() || output_.size() != poles_.order()) {
            throw Error(Errc::length_mismatch, "DiagonalSSM: projection lengths must equal the order");
        }
        detail::require_finite(input_, "DiagonalSSM input_proj");
        detail::require_finite(output_, "DiagonalSSM output_proj");
    }

    PoleSet poles_;
    ComplexVector input_;
    ComplexVector output_;
    std::optional<double> step_;
    std::optional<std::vector<double>> decay_;
};

/// Real convolution kernel, optionally retaining the complex sequence it was projected from.
class Kernel {
public:
    explicit Kernel(std::vector<double> values) : values_(std::move(values))
    {
        if (values_.empty()) {
            throw Error(Errc::invalid_argument, "Kernel: length must be positive");
        }
        detail::require_finite(values_, "Kernel");
    }

    explicit Kernel(ComplexVector complex_values)
    {
        if (complex_values.empty()) {
            throw Error(Errc::invalid_argument, "Kernel: length must be positive");
        }
        detail::require_finite(complex_values, "Kernel");
        values_.reserve(complex_values.size());
        for (const auto& z : complex_values) {
            values_.push_back(z.real());
        }
        complex_ = std::move(complex_values);
    }

    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::size_t length() const noexcept { return values_.size(); }
    [[nodiscard]] double operator[](std::size_t l) const { return values_.at(l); }
    [[nodiscard]] bool has_complex_values() const noexcept { return complex_.has_value(); }
    [[nodiscard]] const std::optional<ComplexVector>& complex_values() const noexcept { return complex_; }

    friend bool operator==(const Kernel&, const Kernel&) = default;

private:
    std::vector<double> values_;
    std::optional<ComplexVector> complex_;
};

/// Drops the retained complex sequence, keeping its real part.
inline Kernel real_part_kernel(const Kernel& k)
{
    if (!k.has_complex_values()) {
        throw Error(Errc::invalid_argument, "kernel already real");
    }
    std::vector<double> re;
    re.reserve(k.length());
    for (const auto& z : *k.complex_values()) {
        re.push_back(z.real());
    }
    return Kernel(std::move(re));
}

/// Shape of a layer of H parallel SSMs with N states each, plus the per-machine phase offsets
/// that interleave their pole grids.
class LayerConfig {
public:
    LayerConfig(std::size_t embed_dim, std::size_t state_dim) : embed_dim_(embed_dim), state_dim_(state_dim)
    {
        detail::require_order(embed_dim, "LayerConfig embed_dim");
        detail::require_order(state_dim, "LayerConfig state_dim");
        phase_offsets_.reserve(embed_dim);
        for (std::size_t h = 0; h < embed_dim; ++h) {
            phase_offsets_.push_back(kTwoPi * static_cast<double>(h) / static_cast<double>(state_dim * embed_dim));
        }
    }

    LayerConfig(std::size_t embed_dim, std::size_t state_dim, std::vector<double> phase_offsets)
        : embed_dim_(embed_dim), state_dim_(state_dim), phase_offsets_(std::move(phase_offsets))
    {
        detail::require_order(embed_dim, "LayerConfig embed_dim");
        detail::require_order(state_dim, "LayerConfig state_dim");
        if (phase_offsets_.size() != embed_dim) {
            throw Error(Errc::length_mismatch, "LayerConfig: need one phase offset per machine");
        }
        const double upper = kTwoPi / static_cast<double>(state_dim);
        for (double phi : phase_offsets_) {
            if (!std::isfinite(phi) || phi < 0.0 || phi >= upper) {
                throw Error(Errc::invalid_argument, "LayerConfig: phase offset outside [0, 2pi/N)");
            }
        }
    }

    [[nodiscard]] std::size_t embed_dim() const noexcept { return embed_dim_; }
    [[nodiscard]] std::size_t state_dim() const noexcept { return state_dim_; }
    [[nodiscard]] std::span<const double> phase_offsets() const noexcept { return phase_offsets_; }

private:
    std::size_t embed_dim_;
    std::size_t state_dim_;
    std::vector<double> phase_offsets_;
};

} // namespace ssmspectra
