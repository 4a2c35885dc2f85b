#pragma once

// Turns an InitSpec into ready-to-use discrete systems, one per machine of the layer.

#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "discretize.hpp"
#include "init.hpp"
#include "rng.hpp"

namespace ssmspectra {

/// Seed purposes used with derive_seed().
enum class SeedPurpose : std::uint64_t { decay = 0, angles = 1, step = 2 };

struct Machine {
    PoleSet native;              // poles in the scheme's own domain
    std::optional<double> step;  // continuous schemes only
    std::vector<double> decay;   // discrete schemes only, one value per native pole
    DiagonalSSM system;          // discrete, C = 1, B = 1 (through ZOH for continuous schemes)
};

inline void validate(const InitSpec& spec)
{
    detail::require_order(spec.n, "InitSpec n");
    detail::require_order(spec.h, "InitSpec h");
    if (spec.decay && (!std::isfinite(*spec.decay) || *spec.decay < 0.0)) {
        throw Error(Errc::invalid_argument, "InitSpec xi: must be finite and >= 0");
    }
    if (spec.step && (!std::isfinite(*spec.step) || !(*spec.step > 0.0))) {
        throw Error(Errc::invalid_argument, "InitSpec delta: must be finite and > 0");
    }
    if (is_continuous(spec.scheme)) {
        if (!spec.step) {
            detail::require_range(spec.step_range, "InitSpec delta range");
        }
    } else if (!spec.decay) {
        detail::require_range(spec.decay_range, "InitSpec xi range");
    }
    if (spec.real_part && !std::isfinite(*spec.real_part)) {
        throw Error(Errc::invalid_argument, "InitSpec real part: must be finite");
    }
}

namespace detail {

    inline std::vector<double> resolve_decay(const InitSpec& spec, std::size_t count, std::size_t machine)
    {
        if (spec.decay) {
            return broadcast_decay(count, *spec.decay);
        }
        return sample_decay(count, spec.decay_range,
            derive_seed(spec.seed, machine, static_cast<std::uint64_t>(SeedPurpose::decay)));
    }

    inline double resolve_step(const InitSpec& spec, std::size_t machine)
    {
        if (spec.step) {
            return *spec.step;
        }
        return sample_decay(1, spec.step_range,
            derive_seed(spec.seed, machine, static_cast<std::uint64_t>(SeedPurpose::step)))[0];
    }

    inline PoleSet continuous_base(const InitSpec& spec)
    {
        PoleSet base = [&] {
            switch (spec.scheme) {
            case Scheme::legs:
                return init_s4d_legs(spec.n);
            case Scheme::inv:
                return init_s4d_inv(spec.n);
            default:
                return init_s4d_lin(spec.n);
            }
        }();
        if (!spec.real_part && !spec.conjugate_pairs) {
            return base;
        }
        ComplexVector poles(base.poles().begin(), base.poles().end());
        if (spec.real_part) {
            for (auto& p : poles) {
                p = {*spec.real_part, p.imag()};
            }
        }
        if (spec.conjugate_pairs) {
            const std::size_t n = poles.size();
            for (std::size_t k = 0; k < n; ++k) {
                poles.push_back(std::conj(poles[k]));
            }
        }
        return PoleSet::stable(std::move(poles), Domain::continuous);
    }

    inline std::pair<PoleSet, std::vector<double>> mirror(PoleSet poles, std::vector<double> decay)
    {
        ComplexVector p(poles.poles().begin(), poles.poles().end());
        const std::size_t n = p.size();
        for (std::size_t k = 0; k < n; ++k) {
            p.push_back(std::conj(p[k]));
            decay.push_back(decay[k]);
        }
        return {PoleSet::stable(std::move(p), Domain::discrete), std::move(decay)};
    }

    inline UnitCircle unit_policy(std::span<const double> decay)
    {
        for (double xi : decay) {
            if (xi == 0.0) {
                return UnitCircle::allow;
            }
        }
        return UnitCircle::reject;
    }

} // namespace detail

/// One machine per layer slot. Stochastic pieces (sampled decays, sampled steps, random
/// angles) draw from derive_seed(seed, machine, purpose), so machine h does not depend on the
/// others.
inline std::vector<Machine> build_machines(const InitSpec& spec)
{
    validate(spec);
    std::vector<Machine> out;
    out.reserve(spec.h);

    if (is_continuous(spec.scheme)) {
        const PoleSet base = detail::continuous_base(spec);
        for (std::size_t h = 0; h < spec.h; ++h) {
            const double step = detail::resolve_step(spec, h);
            const auto cont = DiagonalSSM::continuous(base, ones(base.order()), ones(base.order()), step);
            out.push_back({base, step, {}, zoh_discretize(cont).system});
        }
        return out;
    }

    std::vector<PoleSet> sets;
    std::vector<std::vector<double>> decays;
    if (is_layer_scheme(spec.scheme)) {
        const LayerConfig cfg(spec.h, spec.n);
        if (spec.scheme == Scheme::dfout_layer) {
            std::vector<double> all;
            for (std::size_t h = 0; h < spec.h; ++h) {
                const auto d = detail::resolve_decay(spec, spec.n, h);
                all.insert(all.end(), d.begin(), d.end());
                decays.push_back(d);
            }
            sets = init_s4d_dfout_layer(cfg, all, detail::unit_policy(all));
        } else {
            std::vector<double> per_machine;
            for (std::size_t h = 0; h < spec.h; ++h) {
                per_machine.push_back(detail::resolve_decay(spec, 1, h)[0]);
                decays.push_back(broadcast_decay(spec.n, per_machine.back()));
            }
            sets = init_s4d_batched_dfout(cfg, per_machine, detail::unit_policy(per_machine));
        }
    } else {
        for (std::size_t h = 0; h < spec.h; ++h) {
            const std::size_t count = spec.scheme == Scheme::dfout_halfplane ? halfplane_order(spec.n) : spec.n;
            auto d = detail::resolve_decay(spec, count, h);
            const UnitCircle unit = detail::unit_policy(d);
            switch (spec.scheme) {
            case Scheme::dfout:
                sets.push_back(init_s4d_dfout(spec.n, d, unit));
                break;
            case Scheme::dfout_halfplane:
                sets.push_back(init_s4d_dfout_halfplane(spec.n, d, unit));
                break;
            case Scheme::token:
                sets.push_back(init_s4d_token(spec.n, d, unit));
                break;
            default:
                sets.push_back(init_s4d_rndimag(spec.n, d,
                    derive_seed(spec.seed, h, static_cast<std::uint64_t>(SeedPurpose::angles)), unit));
                break;
            }
            decays.push_back(std::move(d));
        }
    }

    for (std::size_t h = 0; h < sets.size(); ++h) {
        PoleSet poles = sets[h];
        std::vector<double> decay = decays[h];
        if (spec.conjugate_pairs) {
            std::tie(poles, decay) = detail::mirror(std::move(poles), std::move(decay));
        }
        const std::size_t n = poles.order();
        auto sys = DiagonalSSM::discrete(poles, ones(n), ones(n), decay);
        out.push_back({std::move(poles), std::nullopt, std::move(decay), std::move(sys)});
    }
    return out;
}

} // namespace ssmspectra
