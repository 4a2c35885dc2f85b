#pragma once

// JSON and CSV forms of the library's value types. JSON doubles use nlohmann's shortest
// round-trip formatting; CSV cells use 17 significant digits. Both parse back bit-exactly.

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "core.hpp"
#include "delay.hpp"
#include "discretize.hpp"
#include "init.hpp"
#include "spectral.hpp"

namespace ssmspectra {

using Json = nlohmann::ordered_json;

inline std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

    inline Json complex_to_json(const Complex& z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

    inline Complex complex_from_json(const Json& j) { return {j.at("re").get<double>(), j.at("im").get<double>()}; }

    inline Json complex_list(std::span<const Complex> v)
    {
        Json arr = Json::array();
        for (const auto& z : v) {
            arr.push_back(complex_to_json(z));
        }
        return arr;
    }

    inline ComplexVector complex_list_from(const Json& j)
    {
        ComplexVector out;
        out.reserve(j.size());
        for (const auto& e : j) {
            out.push_back(complex_from_json(e));
        }
        return out;
    }

    inline Domain domain_from(const std::string& s)
    {
        if (s == "continuous") {
            return Domain::continuous;
        }
        if (s == "discrete") {
            return Domain::discrete;
        }
        throw Error(Errc::invalid_argument, "unknown domain '" + s + "'");
    }

} // namespace detail

inline Json to_json(const PoleSet& p)
{
    return Json{{"domain", to_string(p.domain())}, {"order", p.order()},
        {"stable_constructed", p.stable_constructed()}, {"poles", detail::complex_list(p.poles())}};
}

inline PoleSet pole_set_from_json(const Json& j)
{
    ComplexVector poles = detail::complex_list_from(j.at("poles"));
    if (j.contains("order") && j.at("order").get<std::size_t>() != poles.size()) {
        throw Error(Errc::length_mismatch, "PoleSet json: order does not match pole count");
    }
    const Domain d = detail::domain_from(j.at("domain").get<std::string>());
    if (j.value("stable_constructed", false)) {
        return PoleSet::stable(std::move(poles), d);
    }
    return PoleSet(std::move(poles), d);
}

inline Json to_json(const DiagonalSSM& s)
{
    Json j{{"poles", to_json(s.poles())}, {"input_proj", detail::complex_list(s.input_proj())},
        {"output_proj", detail::complex_list(s.output_proj())}};
    if (s.step()) {
        j["step"] = *s.step();
    }
    if (s.decay()) {
        j["decay"] = *s.decay();
    }
    return j;
}

inline DiagonalSSM diagonal_ssm_from_json(const Json& j)
{
    PoleSet poles = pole_set_from_json(j.at("poles"));
    ComplexVector b = detail::complex_list_from(j.at("input_proj"));
    ComplexVector c = detail::complex_list_from(j.at("output_proj"));
    if (poles.domain() == Domain::continuous) {
        return DiagonalSSM::continuous(std::move(poles), std::move(b), std::move(c), j.at("step").get<double>());
    }
    std::optional<std::vector<double>> decay;
    if (j.contains("decay")) {
        decay = j.at("decay").get<std::vector<double>>();
    }
    return DiagonalSSM::discrete(std::move(poles), std::move(b), std::move(c), std::move(decay));
}

inline Json to_json(const Kernel& k)
{
    Json j{{"length", k.length()}, {"values", std::vector<double>(k.values().begin(), k.values().end())}};
    if (k.has_complex_values()) {
        j["complex_values"] = detail::complex_list(*k.complex_values());
    }
    return j;
}

inline Kernel kernel_from_json(const Json& j)
{
    if (j.contains("complex_values")) {
        Kernel k(detail::complex_list_from(j.at("complex_values")));
        if (j.contains("values") && j.at("values").get<std::vector<double>>() != std::vector<double>(k.values().begin(), k.values().end())) {
            throw Error(Errc::invalid_argument, "Kernel json: values are not the real part of complex_values");
        }
        return k;
    }
    return Kernel(j.at("values").get<std::vector<double>>());
}

inline Json to_json(const LayerConfig& cfg)
{
    return Json{{"embed_dim", cfg.embed_dim()}, {"state_dim", cfg.state_dim()},
        {"phase_offsets", std::vector<double>(cfg.phase_offsets().begin(), cfg.phase_offsets().end())}};
}

inline LayerConfig layer_config_from_json(const Json& j)
{
    return LayerConfig(j.at("embed_dim").get<std::size_t>(), j.at("state_dim").get<std::size_t>(),
        j.at("phase_offsets").get<std::vector<double>>());
}

inline Json to_json(const InitSpec& s)
{
    Json j{{"scheme", scheme_name(s.scheme)}, {"n", s.n}, {"h", s.h}};
    if (s.decay) {
        j["xi"] = *s.decay;
    } else if (!is_continuous(s.scheme)) {
        j["xi_min"] = s.decay_range.min;
        j["xi_max"] = s.decay_range.max;
    }
    if (s.step) {
        j["delta"] = *s.step;
    } else if (is_continuous(s.scheme)) {
        j["delta_min"] = s.step_range.min;
        j["delta_max"] = s.step_range.max;
    }
    if (s.real_part) {
        j["re"] = *s.real_part;
    }
    j["conjugate"] = s.conjugate_pairs;
    j["seed"] = s.seed;
    return j;
}

inline Json to_json(const DelayConfig& c)
{
    return Json{{"tau", c.tau}, {"length", c.length}, {"n", c.state_dim}, {"bandwidth", c.bandwidth_fraction},
        {"seed", c.seed}, {"trials", c.trials}, {"ridge", c.ridge}};
}

inline Json to_json(const AliasReport& r)
{
    Json pairs = Json::array();
    for (const auto& [m, n] : r.colliding_pairs) {
        pairs.push_back(Json::array({m, n}));
    }
    return Json{{"step", r.step}, {"nyquist_ok", r.nyquist_ok}, {"max_abs_digital_freq", r.max_abs_digital_freq},
        {"digital_freqs", r.digital_freqs}, {"colliding_pairs", pairs}};
}

inline Json to_json(const StabilityReport& r) { return Json{{"stable", r.stable}, {"moduli", r.moduli}}; }

inline Json to_json(const HInfReport& r)
{
    Json modes = Json::array();
    for (const auto& m : r.per_mode) {
        modes.push_back(Json{{"mode", m.mode}, {"score", m.score}, {"normalized", m.normalized}});
    }
    return Json{{"per_mode", modes}, {"system_score", r.system_score}, {"argmax_theta", r.argmax_theta}};
}

inline Json to_json(const FrequencyResponse& fr)
{
    return Json{{"theta", fr.theta_grid}, {"values", detail::complex_list(fr.values)}, {"mag_db", fr.magnitudes_db()}};
}

inline Json to_json(const DelayResult& r)
{
    return Json{{"mse", r.mse}, {"normalized_mse", r.normalized_mse}, {"trial_normalized_mse", r.trial_normalized_mse},
        {"readout", detail::complex_list(r.readout)}, {"kernel_snapshot", to_json(r.kernel_snapshot)}};
}

/// CSV with a leading block of `# key=value` lines echoing the configuration.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, const Json& metadata) : out_(out)
    {
        for (const auto& [key, value] : metadata.items()) {
            out_ << "# " << key << '=' << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
        }
    }

    void header(std::initializer_list<std::string_view> columns)
    {
        bool first = true;
        for (auto c : columns) {
            out_ << (first ? "" : ",") << c;
            first = false;
        }
        out_ << '\n';
    }

    template <class... Cells>
    void row(const Cells&... cells)
    {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
        out_ << '\n';
    }

private:
    static std::string cell(double v) { return format_double(v); }
    static std::string cell(std::size_t v) { return std::to_string(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(bool v) { return v ? "true" : "false"; }
    static std::string cell(const std::string& v) { return v; }
    static std::string cell(const char* v) { return v; }

    std::ostream& out_;
};

} // namespace ssmspectra
