#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "core.hpp"
#include "discretize.hpp"
#include "kernel.hpp"

namespace ssmspectra {

/// |H| is floored here before converting to decibels.
inline constexpr double kMagnitudeFloor = 1e-300;

/// Default number of coarse grid points for the H-infinity search.
inline constexpr std::size_t kDefaultHinfGrid = 4096;

/// Theta tolerance of the golden-section refinement.
inline constexpr double kHinfThetaTolerance = 1e-10;

struct FrequencyResponse {
    std::vector<double> theta_grid;
    ComplexVector values;

    [[nodiscard]] std::vector<double> magnitudes_db() const
    {
        std::vector<double> db(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            db[i] = 20.0 * std::log10(std::max(std::abs(values[i]), kMagnitudeFloor));
        }
        return db;
    }
};

/// theta_k = 2 pi k / size, k < size.
inline std::vector<double> uniform_theta_grid(std::size_t size)
{
    if (size == 0) {
        throw Error(Errc::invalid_argument, "theta grid: size must be positive");
    }
    std::vector<double> grid(size);
    for (std::size_t k = 0; k < size; ++k) {
        grid[k] = kTwoPi * static_cast<double>(k) / static_cast<double>(size);
    }
    return grid;
}

namespace detail {

    inline void require_grid(std::span<const double> grid)
    {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (!std::isfinite(grid[i]) || (i > 0 && !(grid[i] > grid[i - 1]))) {
                throw Error(Errc::invalid_argument, "theta grid must be finite and strictly increasing");
            }
        }
    }

    inline void require_convergent(const DiagonalSSM& sys, const char* what)
    {
        if (sys.domain() != Domain::discrete) {
            throw Error(Errc::domain_mismatch, std::string(what) + ": system must be discrete");
        }
        for (const auto& p : sys.poles().poles()) {
            if (!(std::abs(p) < 1.0)) {
                throw Error(Errc::divergence, std::string(what) + ": divergent response (pole on or outside the unit circle)");
            }
        }
    }

    /// sum_n C_n B_n / (1 - lambda_n e^{-i theta}); caller guarantees convergence.
    inline Complex dtft_closed(const DiagonalSSM& sys, double theta)
    {
        const Complex rot = std::polar(1.0, -theta);
        const auto poles = sys.poles().poles();
        Complex acc{};
        for (std::size_t n = 0; n < sys.order(); ++n) {
            acc += sys.output_proj()[n] * sys.input_proj()[n] / (1.0 - poles[n] * rot);
        }
        return acc;
    }

} // namespace detail

/// H(e^{i theta}) = sum_{l>=0} K[l] e^{-i theta l} summed in closed form.
inline FrequencyResponse freq_response_closed(const DiagonalSSM& sys, std::span<const double> theta_grid)
{
    detail::require_convergent(sys, "freq_response_closed");
    detail::require_grid(theta_grid);
    FrequencyResponse fr{{theta_grid.begin(), theta_grid.end()}, ComplexVector(theta_grid.size())};
    for (std::size_t i = 0; i < theta_grid.size(); ++i) {
        fr.values[i] = detail::dtft_closed(sys, theta_grid[i]);
    }
    return fr;
}

/// Partial DTFT over the first `length` complex kernel values. Works for undamped systems too.
inline FrequencyResponse freq_response_truncated(
    const DiagonalSSM& sys, std::span<const double> theta_grid, std::size_t length)
{
    detail::require_grid(theta_grid);
    const Kernel k = full_kernel(sys, length);
    const ComplexVector& kc = *k.complex_values();
    FrequencyResponse fr{{theta_grid.begin(), theta_grid.end()}, ComplexVector(theta_grid.size())};
    for (std::size_t i = 0; i < theta_grid.size(); ++i) {
        const Complex step = std::polar(1.0, -theta_grid[i]);
        Complex acc{};
        Complex w{1.0, 0.0};
        for (std::size_t l = 0; l < length; ++l) {
            acc += kc[l] * w;
            // re-anchor the rotation periodically to stop drift
            w = (l + 1) % 1024 == 0 ? std::polar(1.0, -theta_grid[i] * static_cast<double>(l + 1)) : w * step;
        }
        fr.values[i] = acc;
    }
    return fr;
}

/// sum_n |C_n B_n| |lambda_n|^L / (1 - |lambda_n|): bounds |closed - truncated| at every theta.
inline double truncation_tail_bound(const DiagonalSSM& sys, std::size_t length)
{
    detail::require_convergent(sys, "truncation_tail_bound");
    double bound = 0.0;
    for (std::size_t n = 0; n < sys.order(); ++n) {
        const double r = std::abs(sys.poles()[n]);
        bound += std::abs(sys.output_proj()[n] * sys.input_proj()[n]) * std::pow(r, static_cast<double>(length))
            / (1.0 - r);
    }
    return bound;
}

/// H(z) = C (zI - Lambda)^{-1} B = sum_n C_n B_n / (z - lambda_n). On the unit circle this is
/// e^{-i theta} times the DTFT form (one step of input delay), so magnitudes agree.
inline Complex transfer_function(const DiagonalSSM& sys, Complex z)
{
    if (sys.domain() != Domain::discrete) {
        throw Error(Errc::domain_mismatch, "transfer_function: system must be discrete");
    }
    Complex acc{};
    for (std::size_t n = 0; n < sys.order(); ++n) {
        const Complex d = z - sys.poles()[n];
        if (std::abs(d) < 1e-14) {
            throw Error(Errc::pole_evaluation, "transfer_function: evaluated at pole " + std::to_string(n));
        }
        acc += sys.output_proj()[n] * sys.input_proj()[n] / d;
    }
    return acc;
}

struct ModeScore {
    std::size_t mode;
    double score;
    double normalized; // share of the summed per-mode scores of the same system
};

struct HInfReport {
    std::vector<ModeScore> per_mode;
    double system_score = 0.0;
    double argmax_theta = 0.0;
};

/// |C_n|^2 |B_n|^2 / (1 - |lambda_n|)^2 per mode.
inline std::vector<ModeScore> hinf_per_mode(const DiagonalSSM& sys)
{
    detail::require_convergent(sys, "hinf_per_mode");
    std::vector<ModeScore> out;
    out.reserve(sys.order());
    double total = 0.0;
    for (std::size_t n = 0; n < sys.order(); ++n) {
        const double gain = std::norm(sys.output_proj()[n]) * std::norm(sys.input_proj()[n]);
        const double gap = 1.0 - std::abs(sys.poles()[n]);
        out.push_back({n, gain / (gap * gap), 0.0});
        total += out.back().score;
    }
    if (total > 0.0) {
        for (auto& m : out) {
            m.normalized = m.score / total;
        }
    }
    return out;
}

struct SystemHInf {
    double score;
    double argmax_theta;
};

/// sup_theta |H(e^{i theta})|^2 by coarse grid plus golden-section refinement. The grid is
/// widened to at least 16 / (1 - max|lambda|) points so no resonance falls between samples.
inline SystemHInf hinf_system(const DiagonalSSM& sys, std::size_t grid_size = kDefaultHinfGrid)
{
    detail::require_convergent(sys, "hinf_system");
    if (grid_size == 0) {
        throw Error(Errc::invalid_argument, "hinf_system: grid size must be positive");
    }
    double max_r = 0.0;
    for (const auto& p : sys.poles().poles()) {
        max_r = std::max(max_r, std::abs(p));
    }
    const double needed = std::ceil(16.0 / (1.0 - max_r));
    const std::size_t m = std::max(grid_size, static_cast<std::size_t>(std::min(needed, 1e8)));

    auto power = [&](double theta) { return std::norm(detail::dtft_closed(sys, theta)); };

    const double h = kTwoPi / static_cast<double>(m);
    std::size_t best = 0;
    double best_val = -1.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double v = power(h * static_cast<double>(k));
        if (v > best_val) {
            best_val = v;
            best = k;
        }
    }

    constexpr double inv_phi = 0.6180339887498949;
    double a = h * static_cast<double>(best) - h;
    double b = h * static_cast<double>(best) + h;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = power(c);
    double fd = power(d);
    while (b - a > kHinfThetaTolerance) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = power(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = power(d);
        }
    }
    const double mid = 0.5 * (a + b);
    const double refined = power(mid);
    if (refined > best_val) {
        return {refined, wrap_angle(mid)};
    }
    return {best_val, h * static_cast<double>(best)};
}

inline HInfReport hinf_report(const DiagonalSSM& sys, std::size_t grid_size = kDefaultHinfGrid)
{
    HInfReport r;
    r.per_mode = hinf_per_mode(sys);
    const SystemHInf s = hinf_system(sys, grid_size);
    r.system_score = s.score;
    r.argmax_theta = s.argmax_theta;
    return r;
}

} // namespace ssmspectra
