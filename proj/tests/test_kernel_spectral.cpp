#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include <ssmspectra/discretize.hpp>
#include <ssmspectra/fft.hpp>
#include <ssmspectra/init.hpp>
#include <ssmspectra/kernel.hpp>
#include <ssmspectra/rng.hpp>
#include <ssmspectra/spectral.hpp>

using namespace ssmspectra;

namespace {

template <class F>
Errc error_code(F&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected ssmspectra::Error";
    return Errc::numerical;
}

DiagonalSSM random_system(SplitMix64& rng, std::size_t n, double max_modulus)
{
    ComplexVector p(n);
    ComplexVector b(n);
    ComplexVector c(n);
    for (std::size_t k = 0; k < n; ++k) {
        p[k] = std::polar(max_modulus * rng.uniform(), kTwoPi * rng.uniform());
        b[k] = {rng.normal(), rng.normal()};
        c[k] = {rng.normal(), rng.normal()};
    }
    return DiagonalSSM::discrete(PoleSet::stable(p, Domain::discrete), b, c);
}

// (e^x - 1)/x by its power series in long double, used as the reference for the ZOH factor
std::complex<long double> phi_series(std::complex<long double> x)
{
    std::complex<long double> term = 1.0L;
    std::complex<long double> sum = 0.0L;
    for (int k = 1; k < 60; ++k) {
        sum += term;
        term *= x / static_cast<long double>(k + 1);
    }
    return sum;
}

// direct O(M^2) DFT
ComplexVector dft(const ComplexVector& a, bool inverse)
{
    const std::size_t m = a.size();
    ComplexVector out(m);
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t j = 0; j < m; ++j) {
            const double angle = (inverse ? 1.0 : -1.0) * kTwoPi * static_cast<double>((j * k) % m) / static_cast<double>(m);
            out[k] += a[j] * std::polar(1.0, angle);
        }
        if (inverse) {
            out[k] /= static_cast<double>(m);
        }
    }
    return out;
}

} // namespace

// ---------------------------------------------------------------- discretize

TEST(Zoh, MatchesClosedForm)
{
    const Complex lambda{-0.5, 3.0};
    const ZohMode m = zoh_mode(lambda, Complex{2.0, -1.0}, 0.1);
    EXPECT_FALSE(m.near_singular);
    EXPECT_NEAR(std::abs(m.pole - std::exp(0.1 * lambda)), 0.0, 1e-15);
    const auto ref = phi_series(std::complex<long double>(0.1L * -0.5L, 0.1L * 3.0L)) * 0.1L
        * std::complex<long double>(2.0L, -1.0L);
    EXPECT_NEAR(std::abs(m.input - Complex(static_cast<double>(ref.real()), static_cast<double>(ref.imag()))), 0.0,
        1e-15);
}

TEST(Zoh, SeriesBranchNearZero)
{
    for (double x : {1e-9, 1e-12, 1e-15, 0.0}) {
        const Complex lambda{-x, x};
        const ZohMode m = zoh_mode(lambda, Complex{1.0, 0.0}, 1.0);
        EXPECT_TRUE(m.near_singular);
        const auto ref = phi_series(std::complex<long double>(-x, x));
        EXPECT_NEAR(m.input.real(), static_cast<double>(ref.real()), 1e-15);
        EXPECT_NEAR(m.input.imag(), static_cast<double>(ref.imag()), 1e-15);
    }
    // just above the threshold the exact formula is still accurate to ~1e-8 relative
    const ZohMode above = zoh_mode(Complex{-2e-8, 0.0}, Complex{1.0, 0.0}, 1.0);
    EXPECT_FALSE(above.near_singular);
    EXPECT_NEAR(above.input.real(), 1.0 - 1e-8, 1e-7);
}

TEST(Zoh, DiscretizeFlagsSingularModes)
{
    const PoleSet p = PoleSet::stable({Complex{0.0, 0.0}, Complex{-1.0, 2.0}}, Domain::continuous);
    const auto r = zoh_discretize(DiagonalSSM::continuous(p, ones(2), ones(2), 0.5));
    ASSERT_EQ(r.near_singular.size(), 1u);
    EXPECT_EQ(r.near_singular[0], 0u);
    EXPECT_EQ(r.system.domain(), Domain::discrete);
    EXPECT_EQ(r.system.input_proj()[0], Complex(0.5, 0.0));
    EXPECT_TRUE(r.system.poles().stable_constructed());
    EXPECT_EQ(error_code([&] { zoh_discretize(r.system, 0.1); }), Errc::domain_mismatch);
}

TEST(Alias, NyquistIsStrict)
{
    const PoleSet p({Complex{-0.5, kPi}}, Domain::continuous);
    EXPECT_FALSE(alias_check(p, 1.0).nyquist_ok);
    EXPECT_TRUE(alias_check(p, std::nextafter(1.0, 0.0)).nyquist_ok);
}

TEST(Alias, FoldedPairsAreReported)
{
    // 1 and 1 + 2 pi / step fold together; the duplicate imaginary part does not count
    const double step = 0.5;
    const PoleSet p({Complex{-1.0, 1.0}, Complex{-1.0, 1.0 + kTwoPi / step}, Complex{-2.0, 1.0}, Complex{-1.0, 3.0}},
        Domain::continuous);
    const auto r = alias_check(p, step);
    ASSERT_EQ(r.colliding_pairs.size(), 2u);
    EXPECT_EQ(r.colliding_pairs[0], std::make_pair(std::size_t{0}, std::size_t{1}));
    EXPECT_EQ(r.colliding_pairs[1], std::make_pair(std::size_t{1}, std::size_t{2}));
    EXPECT_FALSE(r.nyquist_ok);
    EXPECT_NEAR(r.digital_freqs[1], 0.5, 1e-12);
}

TEST(Alias, RejectsDiscretePoles)
{
    const PoleSet p({Complex{0.5, 0.0}}, Domain::discrete);
    EXPECT_EQ(error_code([&] { alias_check(p, 1.0); }), Errc::domain_mismatch);
}

TEST(Stability, StrictInequality)
{
    const auto r = stability_check(PoleSet({std::polar(1.0, 0.7), Complex{0.3, 0.0}}, Domain::discrete));
    EXPECT_FALSE(r.stable);
    EXPECT_NEAR(r.moduli[0], 1.0, 1e-15);
    EXPECT_TRUE(stability_check(PoleSet({Complex{0.999, 0.0}}, Domain::discrete)).stable);
}

TEST(Angles, WrapAndCircularDistance)
{
    EXPECT_NEAR(wrap_angle(-0.5), kTwoPi - 0.5, 1e-15);
    EXPECT_NEAR(wrap_angle(7.0), 7.0 - kTwoPi, 1e-15);
    EXPECT_NEAR(circular_distance(0.1, kTwoPi - 0.1), 0.2, 1e-15);
}

// ---------------------------------------------------------------- fft

TEST(Fft, MatchesDirectDft)
{
    SplitMix64 rng(1);
    for (std::size_t m : {1, 2, 8, 64}) {
        ComplexVector a(m);
        for (auto& v : a) {
            v = {rng.normal(), rng.normal()};
        }
        ComplexVector fwd = a;
        fft::transform(fwd);
        const ComplexVector ref = dft(a, false);
        for (std::size_t k = 0; k < m; ++k) {
            EXPECT_NEAR(std::abs(fwd[k] - ref[k]), 0.0, 1e-12);
        }
        fft::transform(fwd, true);
        for (std::size_t k = 0; k < m; ++k) {
            EXPECT_NEAR(std::abs(fwd[k] - a[k]), 0.0, 1e-13);
        }
    }
    ComplexVector bad(6);
    EXPECT_THROW(fft::transform(bad), Error);
}

// ---------------------------------------------------------------- kernel

TEST(Kernel, PowerBranchesAgree)
{
    const Complex z = std::polar(0.9999, 0.37);
    const auto it = detail::powers_iterative(z, 5000);
    const auto el = detail::powers_exp_log(z, 5000);
    for (std::size_t l = 0; l < 5000; l += 97) {
        EXPECT_NEAR(std::abs(it[l] - el[l]), 0.0, 1e-11);
    }
    EXPECT_EQ(detail::powers_exp_log(Complex{}, 3)[0], Complex(1.0, 0.0));
    EXPECT_EQ(detail::powers_exp_log(Complex{}, 3)[2], Complex(0.0, 0.0));
}

TEST(Kernel, VandermondeEntriesAndCap)
{
    const PoleSet p({Complex{0.5, 0.5}, Complex{-0.3, 0.0}}, Domain::discrete);
    const VandermondeMatrix v(p, 6);
    const Eigen::MatrixXcd d = v.dense();
    for (std::size_t l = 0; l < 6; ++l) {
        for (std::size_t n = 0; n < 2; ++n) {
            Complex ref{1.0, 0.0};
            for (std::size_t j = 0; j < l; ++j) {
                ref *= p[n];
            }
            EXPECT_NEAR(std::abs(d(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(n)) - ref), 0.0, 1e-15);
            EXPECT_NEAR(std::abs(v.entry(l, n) - ref), 0.0, 1e-15);
        }
    }
    EXPECT_EQ(error_code([&] { (void)v.entry(6, 0); }), Errc::index_out_of_range);
    const VandermondeMatrix huge(p, (kDenseVandermondeCap / 2) + 1);
    EXPECT_EQ(error_code([&] { (void)huge.dense(); }), Errc::size_limit);
}

TEST(Kernel, FullKernelIsSumOfModes)
{
    SplitMix64 rng(2);
    const auto sys = random_system(rng, 7, 0.95);
    const Kernel k = full_kernel(sys, 40);
    const Kernel seq = full_kernel(sys, 40, Reduction::sequential);
    for (std::size_t l = 0; l < 40; ++l) {
        Complex ref{};
        for (std::size_t n = 0; n < 7; ++n) {
            ref += sys.output_proj()[n] * sys.input_proj()[n] * std::pow(sys.poles()[n], static_cast<double>(l));
        }
        EXPECT_NEAR(std::abs((*k.complex_values())[l] - ref), 0.0, 1e-12);
        EXPECT_NEAR(k[l], seq[l], 1e-12);
    }
}

TEST(Kernel, PairwiseReductionIsReproducible)
{
    SplitMix64 rng(3);
    const auto sys = random_system(rng, 33, 0.99);
    EXPECT_EQ(full_kernel(sys, 100), full_kernel(sys, 100));
}

TEST(Kernel, ConvolutionAgainstHandExample)
{
    const std::vector<double> x{1.0, 2.0, 3.0};
    const std::vector<double> k{1.0, -1.0, 0.5};
    const std::vector<double> expected{1.0, 1.0, 1.5};
    EXPECT_EQ(convolve_naive(x, k), expected);
    const auto f = convolve_fft(x, k);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NEAR(f[i], expected[i], 1e-14);
    }
    EXPECT_EQ(error_code([] { convolve_naive(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}); }),
        Errc::length_mismatch);
}

TEST(Kernel, ScanMatchesConvolutionOnUnitCircle)
{
    const PoleSet p = init_s4d_dfout(8, broadcast_decay(8, 0.0), UnitCircle::allow);
    const auto sys = DiagonalSSM::discrete(p, ones(8), ones(8));
    SplitMix64 rng(4);
    std::vector<double> x(300);
    for (auto& v : x) {
        v = rng.normal();
    }
    const auto a = recurrent_scan(sys, x);
    const auto b = apply_kernel(x, full_kernel(sys, 300), ConvolutionMethod::fft);
    for (std::size_t i = 0; i < x.size(); ++i) {
        EXPECT_NEAR(a[i], b[i], 1e-10);
    }
}

TEST(Kernel, ImpulseResponseIsKernel)
{
    SplitMix64 rng(5);
    const auto sys = random_system(rng, 5, 0.9);
    std::vector<double> impulse(20, 0.0);
    impulse[0] = 1.0;
    const auto y = recurrent_scan(sys, impulse);
    const Kernel k = full_kernel(sys, 20);
    for (std::size_t l = 0; l < 20; ++l) {
        EXPECT_NEAR(y[l], k[l], 1e-13);
    }
}

TEST(Kernel, GramMatchesBruteForce)
{
    const PoleSet p({std::polar(0.9, 0.3), std::polar(0.7, -1.2), Complex{0.5, 0.0}}, Domain::discrete);
    const auto g = vandermonde_gram(p, 25);
    for (std::size_t m = 0; m < 3; ++m) {
        for (std::size_t n = 0; n < 3; ++n) {
            // geometric series sum_l (conj(a) b)^l
            const Complex r = std::conj(p[m]) * p[n];
            const Complex ref = (1.0 - std::pow(r, 25.0)) / (1.0 - r);
            EXPECT_NEAR(std::abs(g(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) - ref), 0.0, 1e-12);
        }
    }
}

TEST(Kernel, RejectsContinuousSystems)
{
    const auto sys = DiagonalSSM::continuous(init_s4d_lin(2), ones(2), ones(2), 0.1);
    EXPECT_EQ(error_code([&] { full_kernel(sys, 4); }), Errc::domain_mismatch);
    EXPECT_EQ(error_code([&] { recurrent_scan(sys, std::vector<double>{1.0}); }), Errc::domain_mismatch);
}

// ---------------------------------------------------------------- spectral

TEST(Spectral, ClosedFormMatchesLongSum)
{
    SplitMix64 rng(6);
    const auto sys = random_system(rng, 4, 0.8);
    const auto grid = uniform_theta_grid(16);
    const auto fr = freq_response_closed(sys, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        Complex ref{};
        for (std::size_t n = 0; n < 4; ++n) {
            Complex z{1.0, 0.0};
            for (int l = 0; l < 400; ++l) {
                ref += sys.output_proj()[n] * sys.input_proj()[n] * z * std::polar(1.0, -grid[i] * l);
                z *= sys.poles()[n];
            }
        }
        EXPECT_NEAR(std::abs(fr.values[i] - ref), 0.0, 1e-11);
    }
}

TEST(Spectral, TransferFunctionOnCircle)
{
    SplitMix64 rng(7);
    const auto sys = random_system(rng, 6, 0.9);
    const auto grid = uniform_theta_grid(32);
    const auto fr = freq_response_closed(sys, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Complex z = std::polar(1.0, grid[i]);
        const Complex tf = transfer_function(sys, z);
        EXPECT_NEAR(std::abs(tf - std::polar(1.0, -grid[i]) * fr.values[i]), 0.0, 1e-12);
    }
    EXPECT_EQ(error_code([&] { (void)transfer_function(sys, sys.poles()[0]); }), Errc::pole_evaluation);
}

TEST(Spectral, DivergesOnUnitCircle)
{
    const PoleSet p = init_s4d_dfout(4, broadcast_decay(4, 0.0), UnitCircle::allow);
    const auto sys = DiagonalSSM::discrete(p, ones(4), ones(4));
    EXPECT_EQ(error_code([&] { freq_response_closed(sys, uniform_theta_grid(8)); }), Errc::divergence);
    EXPECT_NO_THROW(freq_response_truncated(sys, uniform_theta_grid(8), 16));
}

TEST(Spectral, UndampedTruncatedResponseIsDirichletKernel)
{
    // one pole at angle w, L taps: |sum_l e^{i(w - theta) l}| = |sin(L d / 2) / sin(d / 2)|
    const double w = 0.7;
    const auto sys = DiagonalSSM::discrete(PoleSet({std::polar(1.0, w)}, Domain::discrete), ones(1), ones(1));
    const auto grid = uniform_theta_grid(64);
    const auto fr = freq_response_truncated(sys, grid, 50);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double d = w - grid[i];
        const double ref = std::abs(std::sin(25.0 * d) / std::sin(0.5 * d));
        EXPECT_NEAR(std::abs(fr.values[i]), ref, 1e-10);
    }
}

TEST(Spectral, MagnitudeDbFloor)
{
    FrequencyResponse fr{{0.0, 1.0}, {Complex{10.0, 0.0}, Complex{0.0, 0.0}}};
    const auto db = fr.magnitudes_db();
    EXPECT_NEAR(db[0], 20.0, 1e-12);
    EXPECT_NEAR(db[1], -6000.0, 1e-9);
}

TEST(Spectral, TailBoundFormula)
{
    const auto sys = DiagonalSSM::discrete(
        PoleSet({Complex{0.5, 0.0}}, Domain::discrete), ComplexVector{Complex{2.0, 0.0}}, ComplexVector{Complex{0.0, 3.0}});
    EXPECT_NEAR(truncation_tail_bound(sys, 3), 6.0 * 0.125 / 0.5, 1e-15);
}

TEST(Spectral, PerModeScoresNormalize)
{
    const auto sys = DiagonalSSM::discrete(PoleSet({Complex{0.5, 0.0}, Complex{0.0, 0.9}}, Domain::discrete),
        ComplexVector{1.0, 2.0}, ComplexVector{1.0, 1.0});
    const auto modes = hinf_per_mode(sys);
    EXPECT_NEAR(modes[0].score, 4.0, 1e-12);
    EXPECT_NEAR(modes[1].score, 4.0 / 0.01, 1e-9);
    EXPECT_NEAR(modes[0].normalized + modes[1].normalized, 1.0, 1e-15);
    EXPECT_NEAR(modes[1].normalized, 400.0 / 404.0, 1e-12);
}

TEST(Spectral, SystemScoreMatchesDenseGrid)
{
    SplitMix64 rng(8);
    for (int trial = 0; trial < 5; ++trial) {
        const auto sys = random_system(rng, 6, 0.97);
        const auto result = hinf_system(sys);
        double sup = 0.0;
        for (std::size_t k = 0; k < 200'000; ++k) {
            const double theta = kTwoPi * static_cast<double>(k) / 200'000.0;
            Complex h{};
            for (std::size_t n = 0; n < 6; ++n) {
                h += sys.output_proj()[n] * sys.input_proj()[n] / (1.0 - sys.poles()[n] * std::polar(1.0, -theta));
            }
            sup = std::max(sup, std::norm(h));
        }
        EXPECT_GE(result.score, sup * (1.0 - 1e-12));
        EXPECT_NEAR(result.score, sup, 1e-5 * sup);
    }
}

TEST(Spectral, SystemScoreOfSingleModeEqualsClosedForm)
{
    const auto sys = DiagonalSSM::discrete(PoleSet({std::polar(0.999, 1.234)}, Domain::discrete), ones(1), ones(1));
    const auto r = hinf_system(sys, 64); // grid widened automatically for the sharp peak
    EXPECT_NEAR(r.score, 1.0 / (0.001 * 0.001), 1e-6 / (0.001 * 0.001));
    EXPECT_NEAR(r.argmax_theta, 1.234, 1e-6);
}
