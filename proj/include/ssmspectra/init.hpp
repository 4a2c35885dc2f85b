#pragma once

// Pole initializers: continuous-domain S4D baselines (LegS, Inv, Lin) and the discrete-domain
// family that places poles directly on a damped circle (DFouT and its variants).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "core.hpp"
#include "rng.hpp"

namespace ssmspectra {

enum class Scheme { legs, inv, lin, dfout, dfout_halfplane, dfout_layer, token, rndimag, batched_dfout };

inline constexpr std::array<std::pair<Scheme, std::string_view>, 9> kSchemeNames{{
    {Scheme::legs, "legs"},
    {Scheme::inv, "inv"},
    {Scheme::lin, "lin"},
    {Scheme::dfout, "dfout"},
    {Scheme::dfout_halfplane, "dfout-half"},
    {Scheme::dfout_layer, "dfout-layer"},
    {Scheme::token, "token"},
    {Scheme::rndimag, "rndimag"},
    {Scheme::batched_dfout, "batched-dfout"},
}};

inline std::string_view scheme_name(Scheme s)
{
    for (const auto& [scheme, name] : kSchemeNames) {
        if (scheme == s) {
            return name;
        }
    }
    return "?";
}

inline std::optional<Scheme> parse_scheme(std::string_view name)
{
    for (const auto& [scheme, n] : kSchemeNames) {
        if (n == name) {
            return scheme;
        }
    }
    return std::nullopt;
}

inline std::string scheme_list()
{
    std::string out;
    for (const auto& [scheme, name] : kSchemeNames) {
        if (!out.empty()) {
            out += ", ";
        }
        out += name;
    }
    return out;
}

constexpr bool is_continuous(Scheme s) noexcept { return s == Scheme::legs || s == Scheme::inv || s == Scheme::lin; }
constexpr bool is_layer_scheme(Scheme s) noexcept { return s == Scheme::dfout_layer || s == Scheme::batched_dfout; }

struct DecayRange {
    double min;
    double max;
};

/// Everything needed to reproduce one initialization. `decay` (or `step`) pins a single value;
/// otherwise values are drawn log-uniformly from the matching range using `seed`.
struct InitSpec {
    Scheme scheme = Scheme::dfout;
    std::size_t n = 64;
    std::size_t h = 1;
    std::optional<double> decay;
    DecayRange decay_range{1e-3, 1e-1};
    std::optional<double> step;
    DecayRange step_range{1e-3, 1e-1};
    std::optional<double> real_part; // overrides Re(lambda) of continuous schemes
    bool conjugate_pairs = false;    // append the mirrored pole for every mode
    std::uint64_t seed = 0;
};

enum class UnitCircle { reject, allow };

namespace detail {

    inline void require_range(DecayRange r, const char* what)
    {
        if (!std::isfinite(r.min) || !std::isfinite(r.max) || !(r.min > 0.0) || r.min > r.max) {
            throw Error(Errc::invalid_argument, std::string(what) + ": range must satisfy 0 < min <= max");
        }
    }

    inline void require_decay(std::span<const double> decay, std::size_t expected, UnitCircle unit, const char* what)
    {
        if (decay.size() != expected) {
            throw Error(Errc::length_mismatch, std::string(what) + ": expected " + std::to_string(expected)
                    + " decay values, got " + std::to_string(decay.size()));
        }
        for (double xi : decay) {
            if (!std::isfinite(xi)) {
                throw Error(Errc::non_finite, std::string(what) + ": non-finite decay");
            }
            if (xi < 0.0) {
                throw Error(Errc::instability, std::string(what) + ": negative decay puts poles outside the unit circle");
            }
            if (xi == 0.0 && unit == UnitCircle::reject) {
                throw Error(Errc::invalid_argument,
                    std::string(what) + ": zero decay needs UnitCircle::allow (DFT limit)");
            }
        }
    }

    inline Complex damped(double xi, double angle) { return std::polar(std::exp(-0.5 * xi), angle); }

    inline double frac_angle(std::size_t k, std::size_t m)
    {
        return kTwoPi * static_cast<double>(k) / static_cast<double>(m);
    }

} // namespace detail

inline std::vector<double> broadcast_decay(std::size_t n, double xi) { return std::vector<double>(n, xi); }

/// n values log-uniform on [min, max], deterministic in `seed`.
inline std::vector<double> sample_decay(std::size_t n, DecayRange range, std::uint64_t seed)
{
    detail::require_order(n, "sample_decay");
    detail::require_range(range, "sample_decay");
    std::vector<double> out(n);
    if (range.min == range.max) {
        std::fill(out.begin(), out.end(), range.min);
        return out;
    }
    const double lo = std::log(range.min);
    const double hi = std::log(range.max);
    SplitMix64 rng(seed);
    for (auto& v : out) {
        v = std::clamp(std::exp(lo + (hi - lo) * rng.uniform()), range.min, range.max);
    }
    return out;
}

// Continuous baselines -------------------------------------------------------------------

/// lambda_n = -1/2 + i pi n
inline PoleSet init_s4d_lin(std::size_t n)
{
    detail::require_order(n, "init_s4d_lin");
    ComplexVector poles(n);
    for (std::size_t k = 0; k < n; ++k) {
        poles[k] = {-0.5, kPi * static_cast<double>(k)};
    }
    return PoleSet::stable(std::move(poles), Domain::continuous);
}

/// lambda_n = -1/2 + i (N/pi) (N/(2n+1) - 1)
inline PoleSet init_s4d_inv(std::size_t n)
{
    detail::require_order(n, "init_s4d_inv");
    const double big_n = static_cast<double>(n);
    ComplexVector poles(n);
    for (std::size_t k = 0; k < n; ++k) {
        poles[k] = {-0.5, big_n / kPi * (big_n / (2.0 * static_cast<double>(k) + 1.0) - 1.0)};
    }
    return PoleSet::stable(std::move(poles), Domain::continuous);
}

/// Skew-symmetric part S of the HiPPO-LegS normal matrix A + P P^T = -I/2 + S, with
/// P_n = sqrt(n + 1/2): S_nk = -sqrt((2n+1)(2k+1))/2 below the diagonal, mirrored with
/// opposite sign above.
inline Eigen::MatrixXd legs_skew_part(std::size_t n)
{
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < r; ++c) {
            const double v = 0.5 * std::sqrt((2.0 * r + 1.0) * (2.0 * c + 1.0));
            s(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = -v;
            s(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) = v;
        }
    }
    return s;
}

/// Diagonal of the DPLR HiPPO-LegS normal part: real parts -1/2, imaginary parts the
/// spectrum of the skew part, ascending.
inline PoleSet init_s4d_legs(std::size_t n)
{
    detail::require_order(n, "init_s4d_legs");
    const Eigen::MatrixXd s = legs_skew_part(n);
    // i*S is Hermitian with eigenvalues -mu where S has eigenvalues i*mu
    const Eigen::MatrixXcd herm = Complex{0.0, 1.0} * s.cast<Complex>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw Error(Errc::numerical, "init_s4d_legs: eigendecomposition failed for N=" + std::to_string(n)
                + ", ||S||_F=" + std::to_string(s.norm()));
    }
    std::vector<double> imag(n);
    for (std::size_t k = 0; k < n; ++k) {
        imag[k] = -solver.eigenvalues()(static_cast<Eigen::Index>(k));
    }
    std::sort(imag.begin(), imag.end());
    ComplexVector poles(n);
    for (std::size_t k = 0; k < n; ++k) {
        poles[k] = {-0.5, imag[k]};
    }
    return PoleSet::stable(std::move(poles), Domain::continuous);
}

// Discrete-domain family -----------------------------------------------------------------

/// lambda_n = exp(-xi_n/2 + i 2 pi n / N)
inline PoleSet init_s4d_dfout(std::size_t n, std::span<const double> decay, UnitCircle unit = UnitCircle::reject)
{
    detail::require_order(n, "init_s4d_dfout");
    detail::require_decay(decay, n, unit, "init_s4d_dfout");
    ComplexVector poles(n);
    for (std::size_t k = 0; k < n; ++k) {
        poles[k] = detail::damped(decay[k], detail::frac_angle(k, n));
    }
    return PoleSet::stable(std::move(poles), Domain::discrete);
}

/// Machine h gets the DFouT grid rotated by its phase offset. `decay` is either shared across
/// machines (length N) or given per machine (length N*H, machine-major).
inline std::vector<PoleSet> init_s4d_dfout_layer(
    const LayerConfig& cfg, std::span<const double> decay, UnitCircle unit = UnitCircle::reject)
{
    const std::size_t n = cfg.state_dim();
    const std::size_t h_count = cfg.embed_dim();
    const bool per_machine = decay.size() == n * h_count && h_count > 1;
    if (!per_machine) {
        detail::require_decay(decay, n, unit, "init_s4d_dfout_layer");
    } else {
        detail::require_decay(decay, n * h_count, unit, "init_s4d_dfout_layer");
    }
    std::vector<PoleSet> out;
    out.reserve(h_count);
    for (std::size_t h = 0; h < h_count; ++h) {
        const double phi = cfg.phase_offsets()[h];
        ComplexVector poles(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double xi = per_machine ? decay[h * n + k] : decay[k];
            poles[k] = detail::damped(xi, detail::frac_angle(k, n) + phi);
        }
        out.push_back(PoleSet::stable(std::move(poles), Domain::discrete));
    }
    return out;
}

/// Number of poles kept by the half-plane variant: ceil(N/2) + 1.
constexpr std::size_t halfplane_order(std::size_t n) noexcept { return (n + 1) / 2 + 1; }

/// Angles pi n / ceil(N/2), n = 0..ceil(N/2), covering [0, pi] with both endpoints.
inline PoleSet init_s4d_dfout_halfplane(
    std::size_t n, std::span<const double> decay, UnitCircle unit = UnitCircle::reject)
{
    detail::require_order(n, "init_s4d_dfout_halfplane");
    const std::size_t half = (n + 1) / 2;
    const std::size_t n_plus = halfplane_order(n);
    detail::require_decay(decay, n_plus, unit, "init_s4d_dfout_halfplane");
    ComplexVector poles(n_plus);
    for (std::size_t k = 0; k < n_plus; ++k) {
        const double angle = k == half ? kPi : kPi * static_cast<double>(k) / static_cast<double>(half);
        poles[k] = detail::damped(decay[k], angle);
    }
    return PoleSet::stable(std::move(poles), Domain::discrete);
}

/// Omega_n = 2 pi / n for n = 1..N; the period-1 pole sits at angle 0.
inline PoleSet init_s4d_token(std::size_t n, std::span<const double> decay, UnitCircle unit = UnitCircle::reject)
{
    detail::require_order(n, "init_s4d_token");
    detail::require_decay(decay, n, unit, "init_s4d_token");
    ComplexVector poles(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t period = k + 1;
        const double angle = period == 1 ? 0.0 : kTwoPi / static_cast<double>(period);
        poles[k] = detail::damped(decay[k], angle);
    }
    return PoleSet::stable(std::move(poles), Domain::discrete);
}

/// Omega_n i.i.d. uniform on [0, 2 pi).
inline PoleSet init_s4d_rndimag(
    std::size_t n, std::span<const double> decay, std::uint64_t seed, UnitCircle unit = UnitCircle::reject)
{
    detail::require_order(n, "init_s4d_rndimag");
    detail::require_decay(decay, n, unit, "init_s4d_rndimag");
    SplitMix64 rng(seed);
    ComplexVector poles(n);
    for (std::size_t k = 0; k < n; ++k) {
        double angle = kTwoPi * rng.uniform();
        if (angle >= kTwoPi) {
            angle = 0.0;
        }
        poles[k] = detail::damped(decay[k], angle);
    }
    return PoleSet::stable(std::move(poles), Domain::discrete);
}

/// Machine h covers the contiguous block phi_h + 2 pi n / (N H), phi_h = 2 pi h / H, with one
/// decay per machine (`decay` has length H).
inline std::vector<PoleSet> init_s4d_batched_dfout(
    const LayerConfig& cfg, std::span<const double> decay, UnitCircle unit = UnitCircle::reject)
{
    const std::size_t n = cfg.state_dim();
    const std::size_t h_count = cfg.embed_dim();
    detail::require_decay(decay, h_count, unit, "init_s4d_batched_dfout");
    std::vector<PoleSet> out;
    out.reserve(h_count);
    for (std::size_t h = 0; h < h_count; ++h) {
        const double phi = detail::frac_angle(h, h_count);
        ComplexVector poles(n);
        for (std::size_t k = 0; k < n; ++k) {
            poles[k] = detail::damped(decay[h], detail::frac_angle(k, n * h_count) + phi);
        }
        out.push_back(PoleSet::stable(std::move(poles), Domain::discrete));
    }
    return out;
}

} // namespace ssmspectra
