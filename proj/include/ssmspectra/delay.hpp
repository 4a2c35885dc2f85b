#pragma once

// Continuous copying (delay) task: band-limited noise inputs, the ideal delayed target, the
// phase-aligned spike construction, readout fitting by gradient descent or least squares,
// and the end-to-end experiment.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "build.hpp"
#include "core.hpp"
#include "discretize.hpp"
#include "init.hpp"
#include "kernel.hpp"
#include "rng.hpp"

namespace ssmspectra {

struct DelayConfig {
    std::size_t tau = 64;
    std::size_t length = 256;
    std::size_t state_dim = 128;
    double bandwidth_fraction = 0.25;
    std::uint64_t seed = 0;
    std::size_t trials = 10;
    double ridge = 1e-8;
};

inline void validate(const DelayConfig& cfg)
{
    if (cfg.tau == 0 || cfg.tau >= cfg.length) {
        throw Error(Errc::invalid_argument, "DelayConfig tau: need 0 < tau < length");
    }
    detail::require_order(cfg.state_dim, "DelayConfig state_dim");
    if (!(cfg.bandwidth_fraction > 0.0) || cfg.bandwidth_fraction > 0.5) {
        throw Error(Errc::invalid_argument, "DelayConfig bandwidth_fraction: must lie in (0, 0.5]");
    }
    if (cfg.trials == 0) {
        throw Error(Errc::invalid_argument, "DelayConfig trials: must be positive");
    }
    if (!(cfg.ridge >= 0.0) || !std::isfinite(cfg.ridge)) {
        throw Error(Errc::invalid_argument, "DelayConfig ridge: must be finite and >= 0");
    }
}

/// Real Gaussian noise whose DFT is supported on bins 1..floor(fraction * L) and their mirror
/// images, scaled to zero mean and unit (population) variance. The DC bin is left empty.
inline std::vector<double> bandlimited_noise(std::size_t length, double bandwidth_fraction, std::uint64_t seed)
{
    if (length == 0) {
        throw Error(Errc::invalid_argument, "bandlimited_noise: length must be positive");
    }
    if (!(bandwidth_fraction > 0.0) || bandwidth_fraction > 0.5) {
        throw Error(Errc::invalid_argument, "bandlimited_noise: bandwidth fraction must lie in (0, 0.5]");
    }
    const auto cutoff = static_cast<std::size_t>(std::floor(bandwidth_fraction * static_cast<double>(length)));
    if (cutoff == 0) {
        throw Error(Errc::invalid_argument, "bandlimited_noise: band contains no nonzero bin");
    }

    std::vector<double> cos_table(length);
    std::vector<double> sin_table(length);
    for (std::size_t j = 0; j < length; ++j) {
        const double a = kTwoPi * static_cast<double>(j) / static_cast<double>(length);
        cos_table[j] = std::cos(a);
        sin_table[j] = std::sin(a);
    }

    SplitMix64 rng(seed);
    std::vector<double> x(length, 0.0);
    for (std::size_t k = 1; k <= cutoff; ++k) {
        const double re = rng.normal();
        double im = rng.normal();
        const bool nyquist_bin = 2 * k == length;
        if (nyquist_bin) {
            im = 0.0;
        }
        const double weight = nyquist_bin ? 1.0 : 2.0;
        for (std::size_t l = 0; l < length; ++l) {
            const std::size_t j = (k * l) % length;
            x[l] += weight * (re * cos_table[j] - im * sin_table[j]);
        }
    }

    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(length);
    double var = 0.0;
    for (auto& v : x) {
        v -= mean;
        var += v * v;
    }
    var /= static_cast<double>(length);
    const double scale = 1.0 / std::sqrt(var);
    for (auto& v : x) {
        v *= scale;
    }
    return x;
}

/// y[l] = x[l - tau], zero for l < tau.
inline std::vector<double> ideal_delay_target(std::span<const double> x, std::size_t tau)
{
    if (tau >= x.size()) {
        throw Error(Errc::invalid_argument, "ideal_delay_target: tau must be smaller than the sequence length");
    }
    std::vector<double> y(x.size(), 0.0);
    std::copy(x.begin(), x.end() - static_cast<std::ptrdiff_t>(tau), y.begin() + static_cast<std::ptrdiff_t>(tau));
    return y;
}

struct SpikeConstruction {
    DiagonalSSM system;
    Kernel kernel;
};

/// Undamped S4D-Lin poles i pi n discretized with step 2/tau, C = 1, and the factor 2 of the
/// conjugate-pair convention carried on B, so K[l] = 2 Re(sum_n d_n^l) and K[tau] = 2N.
/// The kernel is tau-periodic: K[0] = K[tau] as well.
inline SpikeConstruction spike_kernel_construction(std::size_t tau, std::size_t n, std::size_t length = 0)
{
    if (tau == 0) {
        throw Error(Errc::invalid_argument, "spike_kernel_construction: tau must be positive");
    }
    detail::require_order(n, "spike_kernel_construction");
    if (length == 0) {
        length = 2 * tau;
    }
    const double step = 2.0 / static_cast<double>(tau);
    ComplexVector poles(n);
    for (std::size_t k = 0; k < n; ++k) {
        poles[k] = std::exp(Complex{0.0, kPi * static_cast<double>(k) * step});
    }
    auto sys = DiagonalSSM::discrete(PoleSet::stable(std::move(poles), Domain::discrete), ComplexVector(n, 2.0),
        ones(n), broadcast_decay(n, 0.0));
    Kernel k = full_kernel(sys, length);
    return {std::move(sys), std::move(k)};
}

// Readout fitting over V(l, n) = lambda_n^l, l < target length --------------------------

namespace detail {

    inline Eigen::VectorXcd as_vector(std::span<const Complex> v)
    {
        Eigen::VectorXcd out(static_cast<Eigen::Index>(v.size()));
        for (std::size_t i = 0; i < v.size(); ++i) {
            out(static_cast<Eigen::Index>(i)) = v[i];
        }
        return out;
    }

    inline ComplexVector as_std(const Eigen::VectorXcd& v) { return {v.data(), v.data() + v.size()}; }

    inline Eigen::MatrixXcd design(const PoleSet& poles, std::size_t rows)
    {
        return VandermondeMatrix(poles, rows).dense();
    }

    inline void require_readout(const PoleSet& poles, std::span<const Complex> readout)
    {
        if (readout.size() != poles.order()) {
            throw Error(Errc::length_mismatch, "readout: length must equal the number of poles");
        }
    }

} // namespace detail

/// 1/2 ||V C - y||^2
inline double readout_loss(const PoleSet& poles, std::span<const Complex> readout, std::span<const Complex> target)
{
    detail::require_readout(poles, readout);
    const Eigen::MatrixXcd v = detail::design(poles, target.size());
    return 0.5 * (v * detail::as_vector(readout) - detail::as_vector(target)).squaredNorm();
}

/// V^*(V C - y). Its real and imaginary parts are the partial derivatives of the loss with
/// respect to Re C_n and Im C_n.
inline ComplexVector readout_gradient(
    const PoleSet& poles, std::span<const Complex> readout, std::span<const Complex> target)
{
    detail::require_readout(poles, readout);
    const Eigen::MatrixXcd v = detail::design(poles, target.size());
    return detail::as_std(v.adjoint() * (v * detail::as_vector(readout) - detail::as_vector(target)));
}

/// Minimum-norm least-squares readout by complete orthogonal decomposition.
inline ComplexVector least_squares_readout(const PoleSet& poles, std::span<const Complex> target)
{
    const Eigen::MatrixXcd v = detail::design(poles, target.size());
    return detail::as_std(v.completeOrthogonalDecomposition().solve(detail::as_vector(target)));
}

struct GdFit {
    ComplexVector readout;
    std::vector<double> loss;              // loss before each step and after the last one
    std::vector<ComplexVector> iterates;   // C^0 .. C^steps
};

/// C^{t+1} = C^t - eta V^*(V C^t - y) starting from `initial` (zeros when empty).
inline GdFit fit_readout_gd(const PoleSet& poles, std::span<const Complex> target, double eta, std::size_t steps,
    std::span<const Complex> initial = {})
{
    if (!(eta > 0.0) || !std::isfinite(eta)) {
        throw Error(Errc::invalid_argument, "fit_readout_gd: step size must be positive");
    }
    detail::require_length(target.size(), "fit_readout_gd");
    const Eigen::MatrixXcd v = detail::design(poles, target.size());
    const Eigen::VectorXcd y = detail::as_vector(target);
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(poles.order()));
    if (!initial.empty()) {
        detail::require_readout(poles, initial);
        c = detail::as_vector(initial);
    }

    GdFit fit;
    fit.iterates.push_back(detail::as_std(c));
    Eigen::VectorXcd residual = v * c - y;
    fit.loss.push_back(0.5 * residual.squaredNorm());
    for (std::size_t t = 0; t < steps; ++t) {
        c -= eta * (v.adjoint() * residual);
        residual = v * c - y;
        fit.loss.push_back(0.5 * residual.squaredNorm());
        fit.iterates.push_back(detail::as_std(c));
    }
    fit.readout = detail::as_std(c);
    return fit;
}

inline GdFit fit_readout_gd(const DiagonalSSM& sys, std::span<const Complex> target, double eta, std::size_t steps,
    std::span<const Complex> initial = {})
{
    return fit_readout_gd(sys.poles(), target, eta, steps, initial);
}

/// Largest deviation between the analytic gradient and central differences of the loss in
/// each real coordinate (Re C_n, Im C_n), relative to the largest analytic component.
inline double gradient_check(
    const PoleSet& poles, std::span<const Complex> readout, std::span<const Complex> target, double epsilon)
{
    if (!(epsilon >= 1e-7 && epsilon <= 1e-4)) {
        throw Error(Errc::invalid_argument, "gradient_check: epsilon must lie in [1e-7, 1e-4]");
    }
    const ComplexVector analytic = readout_gradient(poles, readout, target);
    ComplexVector probe(readout.begin(), readout.end());
    double max_err = 0.0;
    double max_ref = 0.0;
    for (std::size_t n = 0; n < probe.size(); ++n) {
        for (const Complex dir : {Complex{1.0, 0.0}, Complex{0.0, 1.0}}) {
            const Complex saved = probe[n];
            probe[n] = saved + epsilon * dir;
            const double up = readout_loss(poles, probe, target);
            probe[n] = saved - epsilon * dir;
            const double down = readout_loss(poles, probe, target);
            probe[n] = saved;
            const double fd = (up - down) / (2.0 * epsilon);
            const double an = dir.real() != 0.0 ? analytic[n].real() : analytic[n].imag();
            max_err = std::max(max_err, std::abs(fd - an));
            max_ref = std::max(max_ref, std::abs(an));
        }
    }
    return max_ref > 0.0 ? max_err / max_ref : max_err;
}

// Experiment -----------------------------------------------------------------------------

struct DelayResult {
    double mse = 0.0;
    double normalized_mse = 0.0;
    Kernel kernel_snapshot{std::vector<double>{0.0}};
    ComplexVector readout;
    std::vector<double> trial_normalized_mse;
};

namespace detail {

    /// Column 2n holds Re h_n[l], column 2n+1 holds -Im h_n[l], so that
    /// y = sum_n Re(C_n h_n) = A [Re C; Im C] interleaved.
    inline Eigen::MatrixXd delay_features(const DiagonalSSM& sys, std::span<const double> x)
    {
        const std::size_t n = sys.order();
        Eigen::MatrixXd a(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(2 * n));
        for (std::size_t k = 0; k < n; ++k) {
            const Complex pole = sys.poles()[k];
            const Complex b = sys.input_proj()[k];
            Complex h{};
            for (std::size_t l = 0; l < x.size(); ++l) {
                h = pole * h + b * x[l];
                a(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(2 * k)) = h.real();
                a(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(2 * k + 1)) = -h.imag();
            }
        }
        return a;
    }

    inline double population_variance(std::span<const double> v)
    {
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double acc = 0.0;
        for (double x : v) {
            acc += (x - mean) * (x - mean);
        }
        return acc / static_cast<double>(v.size());
    }

} // namespace detail

/// The system the experiment trains a readout on: `init` with N = cfg.state_dim and a single
/// machine. With `fixed_decay_zero`, continuous schemes get Re(lambda) = 0 and discrete ones
/// xi = 0.
inline DiagonalSSM delay_system(const DelayConfig& cfg, InitSpec init, bool fixed_decay_zero)
{
    init.n = cfg.state_dim;
    init.h = 1;
    if (fixed_decay_zero) {
        if (is_continuous(init.scheme)) {
            init.real_part = 0.0;
        } else {
            init.decay = 0.0;
        }
    }
    return build_machines(init).front().system;
}

/// Per trial: fit a real linear readout on the state trajectories of one noise draw by ridge
/// least squares, then score it on an independent draw. Metrics are averaged over trials; the
/// readout and kernel snapshot are from trial 0.
inline DelayResult run_delay_experiment(const DelayConfig& cfg, const InitSpec& init, bool fixed_decay_zero)
{
    validate(cfg);
    const DiagonalSSM sys = delay_system(cfg, init, fixed_decay_zero);
    const std::size_t n = sys.order();

    DelayResult result;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const auto x_fit = bandlimited_noise(cfg.length, cfg.bandwidth_fraction, derive_seed(cfg.seed, t, 10));
        const auto x_test = bandlimited_noise(cfg.length, cfg.bandwidth_fraction, derive_seed(cfg.seed, t, 11));
        const auto y_fit = ideal_delay_target(x_fit, cfg.tau);
        const auto y_test = ideal_delay_target(x_test, cfg.tau);

        const Eigen::MatrixXd a = detail::delay_features(sys, x_fit);
        Eigen::MatrixXd gram = a.transpose() * a;
        const double scale = std::max(gram.diagonal().mean(), 1e-300);
        gram.diagonal().array() += cfg.ridge * scale;
        const Eigen::Map<const Eigen::VectorXd> yf(y_fit.data(), static_cast<Eigen::Index>(y_fit.size()));
        const Eigen::VectorXd w = gram.ldlt().solve(a.transpose() * yf);

        const Eigen::MatrixXd a_test = detail::delay_features(sys, x_test);
        const Eigen::Map<const Eigen::VectorXd> yt(y_test.data(), static_cast<Eigen::Index>(y_test.size()));
        const double mse = (a_test * w - yt).squaredNorm() / static_cast<double>(y_test.size());
        const double nmse = mse / detail::population_variance(y_test);

        result.mse += mse;
        result.normalized_mse += nmse;
        result.trial_normalized_mse.push_back(nmse);

        if (t == 0) {
            result.readout.resize(n);
            for (std::size_t k = 0; k < n; ++k) {
                result.readout[k] = {w(static_cast<Eigen::Index>(2 * k)), w(static_cast<Eigen::Index>(2 * k + 1))};
            }
            result.kernel_snapshot = full_kernel(sys.with_output(result.readout), cfg.length);
        }
    }
    result.mse /= static_cast<double>(cfg.trials);
    result.normalized_mse /= static_cast<double>(cfg.trials);
    return result;
}

} // namespace ssmspectra
