#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <ssmspectra/build.hpp>
#include <ssmspectra/core.hpp>
#include <ssmspectra/init.hpp>
#include <ssmspectra/rng.hpp>

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

// angle of exp(i 2 pi k / m) through cos/sin of the reduced fraction
Complex unit_root(double k, double m) { return {std::cos(kTwoPi * k / m), std::sin(kTwoPi * k / m)}; }

} // namespace

// ---------------------------------------------------------------- core

TEST(Core, ConfigErrorClassification)
{
    EXPECT_TRUE(is_config_error(Errc::invalid_order));
    EXPECT_TRUE(is_config_error(Errc::length_mismatch));
    EXPECT_TRUE(is_config_error(Errc::size_limit));
    EXPECT_FALSE(is_config_error(Errc::instability));
    EXPECT_FALSE(is_config_error(Errc::divergence));
    EXPECT_FALSE(is_config_error(Errc::domain_mismatch));
}

TEST(Core, PoleSetRejectsEmptyAndNonFinite)
{
    EXPECT_EQ(error_code([] { PoleSet({}, Domain::discrete); }), Errc::invalid_order);
    EXPECT_EQ(error_code([] { PoleSet({Complex{NAN, 0.0}}, Domain::discrete); }), Errc::non_finite);
}

TEST(Core, StablePoleSetChecksRegion)
{
    EXPECT_TRUE(PoleSet::stable({Complex{0.0, 3.0}}, Domain::continuous).stable_constructed());
    EXPECT_EQ(error_code([] { PoleSet::stable({Complex{1e-3, 0.0}}, Domain::continuous); }), Errc::instability);
    EXPECT_NO_THROW(PoleSet::stable({std::polar(1.0, 0.3)}, Domain::discrete));
    EXPECT_EQ(error_code([] { PoleSet::stable({Complex{1.01, 0.0}}, Domain::discrete); }), Errc::instability);
    EXPECT_FALSE(PoleSet({Complex{2.0, 0.0}}, Domain::discrete).stable_constructed());
}

TEST(Core, DiagonalSsmValidation)
{
    const PoleSet cont({Complex{-1.0, 0.0}}, Domain::continuous);
    const PoleSet disc({Complex{0.5, 0.0}}, Domain::discrete);
    EXPECT_EQ(error_code([&] { DiagonalSSM::continuous(disc, ones(1), ones(1), 0.1); }), Errc::domain_mismatch);
    EXPECT_EQ(error_code([&] { DiagonalSSM::discrete(cont, ones(1), ones(1)); }), Errc::domain_mismatch);
    EXPECT_EQ(error_code([&] { DiagonalSSM::continuous(cont, ones(1), ones(1), 0.0); }), Errc::invalid_argument);
    EXPECT_EQ(error_code([&] { DiagonalSSM::discrete(disc, ones(2), ones(1)); }), Errc::length_mismatch);
    EXPECT_EQ(error_code([&] { DiagonalSSM::discrete(disc, ones(1), ones(1), std::vector<double>{-0.1}); }),
        Errc::instability);
    EXPECT_EQ(error_code([&] { DiagonalSSM::discrete(disc, ones(1), ones(1), std::vector<double>{0.1, 0.2}); }),
        Errc::length_mismatch);

    const auto sys = DiagonalSSM::discrete(disc, ones(1), ones(1));
    const auto swapped = sys.with_output({Complex{2.0, -1.0}});
    EXPECT_EQ(swapped.output_proj()[0], Complex(2.0, -1.0));
    EXPECT_EQ(swapped.poles(), sys.poles());
}

TEST(Core, KernelKeepsComplexValues)
{
    const Kernel k(ComplexVector{{1.0, 2.0}, {-3.0, 0.5}});
    ASSERT_TRUE(k.has_complex_values());
    EXPECT_EQ(k.length(), 2u);
    EXPECT_EQ(k[1], -3.0);
    const Kernel re = real_part_kernel(k);
    EXPECT_FALSE(re.has_complex_values());
    EXPECT_EQ(re[0], 1.0);
    EXPECT_EQ(error_code([&] { real_part_kernel(re); }), Errc::invalid_argument);
    EXPECT_EQ(error_code([] { Kernel(std::vector<double>{}); }), Errc::invalid_argument);
}

TEST(Core, LayerConfigOffsets)
{
    const LayerConfig cfg(4, 8);
    ASSERT_EQ(cfg.phase_offsets().size(), 4u);
    for (std::size_t h = 0; h < 4; ++h) {
        EXPECT_NEAR(cfg.phase_offsets()[h], kTwoPi * static_cast<double>(h) / 32.0, 1e-15);
    }
    EXPECT_EQ(error_code([] { LayerConfig(2, 8, {0.0, kTwoPi / 8.0}); }), Errc::invalid_argument);
    EXPECT_EQ(error_code([] { LayerConfig(2, 8, {0.0}); }), Errc::length_mismatch);
    EXPECT_EQ(error_code([] { LayerConfig(0, 8); }), Errc::invalid_order);
}

// ---------------------------------------------------------------- rng

TEST(Rng, SplitMixReferenceStream)
{
    // published reference outputs for seed 0
    SplitMix64 rng(0);
    EXPECT_EQ(rng(), 0xe220a8397b1dcdafULL);
    EXPECT_EQ(rng(), 0x6e789e6aa1b965f4ULL);
    EXPECT_EQ(rng(), 0x06c45d188009454fULL);
}

TEST(Rng, UniformAndNormalMoments)
{
    SplitMix64 rng(42);
    constexpr int count = 200'000;
    double su = 0.0;
    double sn = 0.0;
    double sn2 = 0.0;
    for (int i = 0; i < count; ++i) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        su += u;
        const double z = rng.normal();
        sn += z;
        sn2 += z * z;
    }
    EXPECT_NEAR(su / count, 0.5, 5e-3);
    EXPECT_NEAR(sn / count, 0.0, 1e-2);
    EXPECT_NEAR(sn2 / count, 1.0, 2e-2);
}

TEST(Rng, DerivedSeedsDiffer)
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t m = 0; m < 16; ++m) {
        for (std::uint64_t p = 0; p < 4; ++p) {
            seen.insert(derive_seed(7, m, p));
        }
    }
    EXPECT_EQ(seen.size(), 64u);
    EXPECT_EQ(derive_seed(7, 3, 1), derive_seed(7, 3, 1));
    EXPECT_NE(derive_seed(7, 3, 1), derive_seed(8, 3, 1));
}

// ---------------------------------------------------------------- init

TEST(Init, SchemeNamesRoundTrip)
{
    for (const auto& [scheme, name] : kSchemeNames) {
        EXPECT_EQ(parse_scheme(name), scheme);
        EXPECT_EQ(scheme_name(scheme), name);
    }
    EXPECT_FALSE(parse_scheme("s4d"));
}

TEST(Init, LinAndInvFormulas)
{
    const PoleSet lin = init_s4d_lin(5);
    const PoleSet inv = init_s4d_inv(5);
    for (std::size_t n = 0; n < 5; ++n) {
        EXPECT_EQ(lin[n].real(), -0.5);
        EXPECT_NEAR(lin[n].imag(), 3.141592653589793 * static_cast<double>(n), 1e-14);
        EXPECT_EQ(inv[n].real(), -0.5);
        const double expected = 5.0 / 3.141592653589793 * (5.0 / (2.0 * static_cast<double>(n) + 1.0) - 1.0);
        EXPECT_NEAR(inv[n].imag(), expected, 1e-13);
    }
    EXPECT_NEAR(inv[2].imag(), 0.0, 1e-15); // N/(2n+1) = 1 at n = 2
}

TEST(Init, LegsSmallCaseByHand)
{
    // N = 2: S = [[0, sqrt3/2], [-sqrt3/2, 0]] has eigenvalues +-i sqrt3/2
    const PoleSet p = init_s4d_legs(2);
    EXPECT_NEAR(p[0].imag(), -std::sqrt(3.0) / 2.0, 1e-14);
    EXPECT_NEAR(p[1].imag(), std::sqrt(3.0) / 2.0, 1e-14);
    EXPECT_EQ(p[0].real(), -0.5);
    EXPECT_EQ(init_s4d_legs(1)[0], Complex(-0.5, 0.0));
}

TEST(Init, LegsMatchesGeneralEigensolver)
{
    for (std::size_t n : {3, 8, 17}) {
        const Eigen::MatrixXd s = legs_skew_part(n);
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> general(s.cast<Complex>());
        std::vector<double> oracle;
        for (const auto& e : general.eigenvalues()) {
            EXPECT_NEAR(e.real(), 0.0, 1e-10);
            oracle.push_back(e.imag());
        }
        std::sort(oracle.begin(), oracle.end());
        const PoleSet p = init_s4d_legs(n);
        for (std::size_t k = 0; k < n; ++k) {
            EXPECT_NEAR(p[k].imag(), oracle[k], 1e-9 * (1.0 + std::abs(oracle[k])));
        }
    }
}

TEST(Init, LegsSpectrumIsSymmetric)
{
    const PoleSet p = init_s4d_legs(12);
    for (std::size_t k = 0; k < 12; ++k) {
        EXPECT_NEAR(p[k].imag(), -p[11 - k].imag(), 1e-10);
    }
}

TEST(Init, DfoutFormula)
{
    std::vector<double> xi{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
    const PoleSet p = init_s4d_dfout(6, xi);
    for (std::size_t n = 0; n < 6; ++n) {
        const Complex expected = std::exp(-xi[n] / 2.0) * unit_root(static_cast<double>(n), 6.0);
        EXPECT_NEAR(std::abs(p[n] - expected), 0.0, 1e-15);
    }
}

TEST(Init, DecayValidation)
{
    EXPECT_EQ(error_code([] { init_s4d_dfout(4, broadcast_decay(4, 0.0)); }), Errc::invalid_argument);
    EXPECT_NO_THROW(init_s4d_dfout(4, broadcast_decay(4, 0.0), UnitCircle::allow));
    EXPECT_EQ(error_code([] { init_s4d_dfout(4, broadcast_decay(4, -0.1)); }), Errc::instability);
    EXPECT_EQ(error_code([] { init_s4d_dfout(4, broadcast_decay(3, 0.1)); }), Errc::length_mismatch);
    EXPECT_EQ(error_code([] { init_s4d_dfout(0, {}); }), Errc::invalid_order);
}

TEST(Init, UndampedPolesAreOnTheCircle)
{
    const PoleSet p = init_s4d_dfout(16, broadcast_decay(16, 0.0), UnitCircle::allow);
    for (const auto& z : p.poles()) {
        EXPECT_NEAR(std::abs(z), 1.0, 1e-15);
    }
}

TEST(Init, HalfPlaneAngles)
{
    EXPECT_EQ(halfplane_order(8), 5u);
    EXPECT_EQ(halfplane_order(7), 5u);
    const PoleSet p = init_s4d_dfout_halfplane(8, broadcast_decay(5, 0.2));
    ASSERT_EQ(p.order(), 5u);
    for (std::size_t k = 0; k < 5; ++k) {
        EXPECT_NEAR(std::abs(p[k]), std::exp(-0.1), 1e-15);
        EXPECT_NEAR(std::abs(std::arg(p[k])), 3.141592653589793 * static_cast<double>(k) / 4.0, 1e-14);
    }
    EXPECT_EQ(error_code([] { init_s4d_dfout_halfplane(8, broadcast_decay(8, 0.2)); }), Errc::length_mismatch);
}

TEST(Init, TokenPeriods)
{
    const PoleSet p = init_s4d_token(6, broadcast_decay(6, 0.0), UnitCircle::allow);
    EXPECT_NEAR(std::abs(p[0] - Complex(1.0, 0.0)), 0.0, 1e-15);
    for (std::size_t n = 1; n < 6; ++n) {
        // pole n has period n + 1: its (n+1)-th power returns to 1
        Complex z{1.0, 0.0};
        for (std::size_t j = 0; j <= n; ++j) {
            z *= p[n];
        }
        EXPECT_NEAR(std::abs(z - Complex(1.0, 0.0)), 0.0, 1e-13);
    }
}

TEST(Init, RndImagDeterministicAndInRange)
{
    const auto xi = broadcast_decay(32, 0.05);
    const PoleSet a = init_s4d_rndimag(32, xi, 9);
    const PoleSet b = init_s4d_rndimag(32, xi, 9);
    const PoleSet c = init_s4d_rndimag(32, xi, 10);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
    for (const auto& z : a.poles()) {
        EXPECT_NEAR(std::abs(z), std::exp(-0.025), 1e-15);
    }
}

TEST(Init, LayerRotatesByPhase)
{
    const LayerConfig cfg(3, 4);
    const auto sets = init_s4d_dfout_layer(cfg, broadcast_decay(4, 0.0), UnitCircle::allow);
    ASSERT_EQ(sets.size(), 3u);
    for (std::size_t h = 0; h < 3; ++h) {
        for (std::size_t n = 0; n < 4; ++n) {
            const Complex expected = unit_root(static_cast<double>(3 * n + h), 12.0);
            EXPECT_NEAR(std::abs(sets[h][n] - expected), 0.0, 1e-14);
        }
    }
}

TEST(Init, LayerAcceptsPerMachineDecay)
{
    const LayerConfig cfg(2, 3);
    const std::vector<double> xi{0.1, 0.1, 0.1, 0.4, 0.4, 0.4};
    const auto sets = init_s4d_dfout_layer(cfg, xi);
    EXPECT_NEAR(std::abs(sets[0][0]), std::exp(-0.05), 1e-15);
    EXPECT_NEAR(std::abs(sets[1][2]), std::exp(-0.2), 1e-15);
    EXPECT_EQ(error_code([&] { init_s4d_dfout_layer(cfg, broadcast_decay(5, 0.1)); }), Errc::length_mismatch);
}

TEST(Init, BatchedCoversFullGrid)
{
    const LayerConfig cfg(4, 8);
    const auto sets = init_s4d_batched_dfout(cfg, broadcast_decay(4, 0.0), UnitCircle::allow);
    std::vector<double> angles;
    for (const auto& s : sets) {
        for (const auto& z : s.poles()) {
            double a = std::arg(z);
            angles.push_back(a < 0.0 ? a + kTwoPi : a);
        }
    }
    std::sort(angles.begin(), angles.end());
    for (std::size_t k = 0; k < 32; ++k) {
        EXPECT_NEAR(angles[k], kTwoPi * static_cast<double>(k) / 32.0, 1e-12);
    }
    // machine h owns a contiguous arc starting at 2 pi h / H
    EXPECT_NEAR(std::arg(sets[1][0]), kTwoPi / 4.0, 1e-14);
}

TEST(Init, SampledDecayIsLogUniformInRange)
{
    const auto d = sample_decay(4000, {1e-3, 1e-1}, 5);
    double mean_log = 0.0;
    for (double v : d) {
        ASSERT_GE(v, 1e-3);
        ASSERT_LE(v, 1e-1);
        mean_log += std::log10(v);
    }
    EXPECT_NEAR(mean_log / 4000.0, -2.0, 0.05);
    EXPECT_EQ(sample_decay(3, {0.5, 0.5}, 1), broadcast_decay(3, 0.5));
    EXPECT_EQ(error_code([] { sample_decay(3, {0.2, 0.1}, 1); }), Errc::invalid_argument);
}

// ---------------------------------------------------------------- machine builder

TEST(Build, ContinuousSchemeDiscretizesPerMachine)
{
    InitSpec spec;
    spec.scheme = Scheme::lin;
    spec.n = 4;
    spec.h = 3;
    spec.seed = 11;
    const auto machines = build_machines(spec);
    ASSERT_EQ(machines.size(), 3u);
    for (const auto& m : machines) {
        ASSERT_TRUE(m.step);
        EXPECT_GE(*m.step, 1e-3);
        EXPECT_LE(*m.step, 1e-1);
        for (std::size_t n = 0; n < 4; ++n) {
            const Complex expected = std::exp(*m.step * m.native[n]);
            EXPECT_NEAR(std::abs(m.system.poles()[n] - expected), 0.0, 1e-15);
        }
    }
    EXPECT_NE(*machines[0].step, *machines[1].step);
}

TEST(Build, RealPartOverrideAndConjugates)
{
    InitSpec spec;
    spec.scheme = Scheme::inv;
    spec.n = 3;
    spec.step = 0.01;
    spec.real_part = 0.0;
    spec.conjugate_pairs = true;
    const auto m = build_machines(spec).front();
    ASSERT_EQ(m.native.order(), 6u);
    for (std::size_t n = 0; n < 3; ++n) {
        EXPECT_EQ(m.native[n].real(), 0.0);
        EXPECT_EQ(m.native[n + 3], std::conj(m.native[n]));
        EXPECT_NEAR(std::abs(m.system.poles()[n]), 1.0, 1e-15);
    }
}

TEST(Build, MachinesAreIndependentOfLayerSize)
{
    InitSpec spec;
    spec.scheme = Scheme::rndimag;
    spec.n = 8;
    spec.h = 2;
    spec.seed = 3;
    const auto two = build_machines(spec);
    spec.h = 5;
    const auto five = build_machines(spec);
    EXPECT_EQ(two[0].system, five[0].system);
    EXPECT_EQ(two[1].system, five[1].system);
}

TEST(Build, ZeroDecayTurnsOnUnitCircle)
{
    InitSpec spec;
    spec.scheme = Scheme::dfout;
    spec.n = 4;
    spec.decay = 0.0;
    const auto m = build_machines(spec).front();
    EXPECT_EQ(m.decay, broadcast_decay(4, 0.0));
    EXPECT_NEAR(std::abs(m.system.poles()[1]), 1.0, 1e-15);
}

TEST(Build, RejectsBadSpecs)
{
    InitSpec spec;
    spec.n = 0;
    EXPECT_EQ(error_code([&] { build_machines(spec); }), Errc::invalid_order);
    spec.n = 4;
    spec.decay = -1.0;
    EXPECT_EQ(error_code([&] { build_machines(spec); }), Errc::invalid_argument);
    spec.decay.reset();
    spec.decay_range = {0.0, 1.0};
    EXPECT_EQ(error_code([&] { build_machines(spec); }), Errc::invalid_argument);
}
