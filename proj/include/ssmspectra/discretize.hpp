#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "core.hpp"

namespace ssmspectra {

/// Below this |step * lambda| the exact ZOH input factor (e^x - 1)/x cancels catastrophically
/// and a three-term Taylor series is used instead.
inline constexpr double kZohSeriesThreshold = 1e-8;

/// Two digital frequencies closer than this on the circle count as the same.
inline constexpr double kAliasTolerance = 1e-12;

struct ZohMode {
    Complex pole;
    Complex input;
    bool near_singular;
};

/// lambda_bar = e^{step lambda}, B_bar = (e^{step lambda} - 1) / (step lambda) * step * B.
inline ZohMode zoh_mode(Complex lambda, Complex input, double step)
{
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw Error(Errc::invalid_argument, "zoh: step must be positive and finite");
    }
    const Complex x = step * lambda;
    const Complex pole = std::exp(x);
    if (std::abs(x) < kZohSeriesThreshold) {
        return {pole, step * input * (1.0 + x / 2.0 + x * x / 6.0), true};
    }
    return {pole, (pole - 1.0) / x * step * input, false};
}

struct ZohResult {
    DiagonalSSM system;
    std::vector<std::size_t> near_singular; // modes that took the series branch
};

inline ZohResult zoh_discretize(const DiagonalSSM& sys, double step)
{
    if (sys.domain() != Domain::continuous) {
        throw Error(Errc::domain_mismatch, "zoh_discretize: system is already discrete");
    }
    const std::size_t n = sys.order();
    ComplexVector poles(n);
    ComplexVector input(n);
    std::vector<std::size_t> flagged;
    for (std::size_t k = 0; k < n; ++k) {
        const ZohMode m = zoh_mode(sys.poles()[k], sys.input_proj()[k], step);
        poles[k] = m.pole;
        input[k] = m.input;
        if (m.near_singular) {
            flagged.push_back(k);
        }
    }
    PoleSet discrete = sys.poles().stable_constructed() ? PoleSet::stable(std::move(poles), Domain::discrete)
                                                        : PoleSet(std::move(poles), Domain::discrete);
    ComplexVector output(sys.output_proj().begin(), sys.output_proj().end());
    return {DiagonalSSM::discrete(std::move(discrete), std::move(input), std::move(output)), std::move(flagged)};
}

/// Uses the step stored on the continuous system.
inline ZohResult zoh_discretize(const DiagonalSSM& sys)
{
    if (!sys.step()) {
        throw Error(Errc::domain_mismatch, "zoh_discretize: system has no step");
    }
    return zoh_discretize(sys, *sys.step());
}

struct AliasReport {
    double step;
    bool nyquist_ok;
    std::vector<std::pair<std::size_t, std::size_t>> colliding_pairs;
    double max_abs_digital_freq;
    std::vector<double> digital_freqs; // step * Im(lambda) reduced to [0, 2 pi)
};

/// Distance between two angles measured around the circle.
inline double circular_distance(double a, double b)
{
    const double d = std::fmod(std::abs(a - b), kTwoPi);
    return std::min(d, kTwoPi - d);
}

inline double wrap_angle(double a)
{
    double w = std::fmod(a, kTwoPi);
    if (w < 0.0) {
        w += kTwoPi;
    }
    return w >= kTwoPi ? 0.0 : w;
}

/// Where each resonance lands after sampling with `step`, and which distinct analogue
/// frequencies fold onto the same digital one.
inline AliasReport alias_check(const PoleSet& poles, double step)
{
    if (poles.domain() != Domain::continuous) {
        throw Error(Errc::domain_mismatch, "alias check requires continuous poles");
    }
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw Error(Errc::invalid_argument, "alias_check: step must be positive and finite");
    }
    AliasReport report{step, true, {}, 0.0, {}};
    const std::size_t n = poles.order();
    std::vector<double> raw(n);
    for (std::size_t k = 0; k < n; ++k) {
        raw[k] = step * poles[k].imag();
        report.max_abs_digital_freq = std::max(report.max_abs_digital_freq, std::abs(raw[k]));
        report.digital_freqs.push_back(wrap_angle(raw[k]));
    }
    report.nyquist_ok = report.max_abs_digital_freq < kPi;
    for (std::size_t m = 0; m < n; ++m) {
        for (std::size_t k = m + 1; k < n; ++k) {
            if (poles[m].imag() != poles[k].imag() && circular_distance(raw[m], raw[k]) < kAliasTolerance) {
                report.colliding_pairs.emplace_back(m, k);
            }
        }
    }
    return report;
}

struct StabilityReport {
    bool stable;
    std::vector<double> moduli;
};

/// Stable iff every pole is strictly inside the unit circle.
inline StabilityReport stability_check(const PoleSet& poles)
{
    if (poles.domain() != Domain::discrete) {
        throw Error(Errc::domain_mismatch, "stability_check: poles are continuous");
    }
    StabilityReport report{true, {}};
    report.moduli.reserve(poles.order());
    for (const auto& p : poles.poles()) {
        const double r = std::abs(p);
        report.moduli.push_back(r);
        report.stable = report.stable && r < 1.0;
    }
    return report;
}

} // namespace ssmspectra
