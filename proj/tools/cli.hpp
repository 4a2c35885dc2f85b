#pragma once

// Command-line front end. `run` takes the argument list without the program name, writes
// artifacts to `out` (or --out) and diagnostics to `err`, and returns the process exit code:
// 0 success, 2 configuration error, 3 numerical or domain error.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Dense>

#include <ssmspectra/acceptance.hpp>
#include <ssmspectra/build.hpp>
#include <ssmspectra/delay.hpp>
#include <ssmspectra/discretize.hpp>
#include <ssmspectra/io.hpp>
#include <ssmspectra/kernel.hpp>
#include <ssmspectra/spectral.hpp>

namespace ssmspectra::cli {

inline constexpr const char* kSeedEnv = "SSMSPECTRA_SEED";

struct Options {
    std::string scheme = "dfout";
    std::size_t n = 64;
    std::size_t h = 1;
    std::optional<double> xi;
    double xi_min = 1e-3;
    double xi_max = 1e-1;
    std::optional<double> delta;
    double delta_min = 1e-3;
    double delta_max = 1e-1;
    std::optional<double> re;
    bool conjugate = false;
    std::optional<std::size_t> length;
    std::size_t tau = 64;
    std::optional<std::uint64_t> seed;
    std::size_t trials = 10;
    std::optional<std::size_t> grid;
    std::optional<std::size_t> truncate;
    std::vector<double> values;
    double bandwidth = 0.25;
    bool fix_decay_zero = true;
    bool kernels = false;
    std::string out;
    std::string format;
    std::string config;
};

/// Keys accepted in a --config file (the long flag names without dashes).
inline const std::set<std::string>& config_keys()
{
    static const std::set<std::string> keys{"scheme", "n", "h", "xi", "xi-min", "xi-max", "delta", "delta-min",
        "delta-max", "re", "conjugate", "length", "tau", "seed", "trials", "grid", "truncate", "values", "bandwidth",
        "fix-decay-zero", "kernels", "out", "format"};
    return keys;
}

namespace detail {

    struct ConfigError : std::runtime_error {
        using std::runtime_error::runtime_error;
    };

    inline std::string trim(const std::string& s)
    {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) {
            return {};
        }
        return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
    }

    /// Flat `key = value` lines; '#' and ';' start comments. Returns `--key=value` tokens for the
    /// keys `applies` accepts; known keys that the subcommand does not take are skipped.
    inline std::vector<std::string> read_config(
        const std::string& path, const std::function<bool(const std::string&)>& applies)
    {
        std::ifstream in(path);
        if (!in) {
            throw ConfigError("cannot read config file '" + path + "'");
        }
        std::vector<std::string> args;
        std::string line;
        for (int lineno = 1; std::getline(in, line); ++lineno) {
            line = trim(line);
            if (line.empty() || line[0] == '#' || line[0] == ';') {
                continue;
            }
            const auto where = path + ":" + std::to_string(lineno);
            if (line[0] == '[') {
                throw ConfigError(where + ": sections are not supported");
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw ConfigError(where + ": expected key = value");
            }
            std::string key = trim(line.substr(0, eq));
            std::replace(key.begin(), key.end(), '_', '-');
            if (!config_keys().contains(key)) {
                throw ConfigError(where + ": unknown key '" + key + "'");
            }
            const std::string value = trim(line.substr(eq + 1));
            if (!applies(key)) {
                continue;
            }
            if (key == "values") {
                std::string spaced = value;
                std::replace(spaced.begin(), spaced.end(), ',', ' ');
                std::istringstream items(spaced);
                for (std::string item; items >> item;) {
                    args.push_back("--values=" + item);
                }
            } else {
                args.push_back("--" + key + "=" + value);
            }
        }
        return args;
    }

    /// Pulls `--config PATH` / `--config=PATH` out of the user arguments and splices the file's
    /// settings in right after the subcommand, so that later (user) flags win.
    inline std::vector<std::string> expand_config(
        std::vector<std::string> args, const std::function<bool(const std::string&, const std::string&)>& applies)
    {
        std::optional<std::string> path;
        std::vector<std::string> rest;
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--config") {
                if (i + 1 >= args.size()) {
                    throw ConfigError("--config needs a path");
                }
                path = args[++i];
            } else if (args[i].rfind("--config=", 0) == 0) {
                path = args[i].substr(9);
            } else {
                rest.push_back(args[i]);
            }
        }
        if (!path) {
            return rest;
        }
        const auto command = std::find_if(rest.begin(), rest.end(), [](const std::string& a) {
            return !a.empty() && a[0] != '-';
        });
        const std::string name = command == rest.end() ? std::string{} : *command;
        const auto from_file = read_config(*path, [&](const std::string& key) { return applies(name, key); });
        const auto first_flag = std::find_if(rest.begin(), rest.end(), [](const std::string& a) {
            return !a.empty() && a[0] == '-';
        });
        rest.insert(first_flag, from_file.begin(), from_file.end());
        return rest;
    }

    inline std::uint64_t parse_seed(const std::string& text)
    {
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(text, &used, 10);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != text.size() || text[0] == '-') {
            throw ConfigError(std::string(kSeedEnv) + ": not an unsigned integer: '" + text + "'");
        }
        return v;
    }

    /// --seed, then the environment variable, then 0.
    inline std::uint64_t resolve_seed(const Options& o, const std::optional<std::string>& env)
    {
        if (o.seed) {
            return *o.seed;
        }
        if (env && !env->empty()) {
            return parse_seed(*env);
        }
        return 0;
    }

    inline InitSpec init_spec(const Options& o, std::uint64_t seed)
    {
        const auto scheme = parse_scheme(o.scheme);
        if (!scheme) {
            throw ConfigError("unknown scheme '" + o.scheme + "' (expected one of " + scheme_list() + ")");
        }
        InitSpec s;
        s.scheme = *scheme;
        s.n = o.n;
        s.h = o.h;
        s.decay = o.xi;
        s.decay_range = {o.xi_min, o.xi_max};
        s.step = o.delta;
        s.step_range = {o.delta_min, o.delta_max};
        s.real_part = o.re;
        s.conjugate_pairs = o.conjugate;
        s.seed = seed;
        validate(s);
        return s;
    }

    inline std::size_t require_length(const Options& o)
    {
        if (!o.length || *o.length == 0) {
            throw ConfigError("--length must be given and >= 1");
        }
        return *o.length;
    }

    inline Json metadata(const std::string& command, const InitSpec& spec)
    {
        Json m{{"tool", "ssmspectra"}, {"command", command}};
        m.update(to_json(spec));
        return m;
    }

    /// Mean of -2 log|lambda| over modes: xi for DFouT-type poles, -2 Re(lambda) delta after ZOH.
    inline double decay_parameter(const DiagonalSSM& sys)
    {
        double acc = 0.0;
        for (const auto& p : sys.poles().poles()) {
            acc += -2.0 * std::log(std::abs(p));
        }
        return acc / static_cast<double>(sys.order());
    }

    class Sink {
    public:
        Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback)
        {
            if (!path.empty()) {
                file_.open(path);
                if (!file_) {
                    throw ConfigError("cannot open --out file '" + path + "'");
                }
                stream_ = &file_;
            }
        }
        std::ostream& get() { return *stream_; }

    private:
        std::ofstream file_;
        std::ostream* stream_;
    };

    inline void emit_json(std::ostream& out, Json metadata, Json data)
    {
        Json doc{{"metadata", std::move(metadata)}, {"data", std::move(data)}};
        out << doc.dump(2) << '\n';
    }

} // namespace detail

// Subcommands ------------------------------------------------------------------------------

namespace commands {

    using detail::ConfigError;

    inline void poles(const Options& o, const InitSpec& spec, bool json, std::ostream& out)
    {
        const auto machines = build_machines(spec);
        const bool native = is_continuous(spec.scheme) && !spec.step;
        Json meta = detail::metadata("poles", spec);
        meta["domain"] = native ? "continuous" : "discrete";
        std::vector<PoleSet> sets;
        for (const auto& m : machines) {
            sets.push_back(native ? m.native : m.system.poles());
        }
        if (json) {
            Json data = Json::array();
            for (std::size_t h = 0; h < sets.size(); ++h) {
                data.push_back(Json{{"machine", h}, {"poles", to_json(sets[h])}});
            }
            detail::emit_json(out, meta, data);
            return;
        }
        CsvWriter csv(out, meta);
        csv.header({"machine", "index", "re", "im", "modulus", "angle"});
        for (std::size_t h = 0; h < sets.size(); ++h) {
            for (std::size_t k = 0; k < sets[h].order(); ++k) {
                const Complex p = sets[h][k];
                csv.row(h, k, p.real(), p.imag(), std::abs(p), std::arg(p));
            }
        }
        (void)o;
    }

    inline void kernel(const Options& o, const InitSpec& spec, bool json, std::ostream& out)
    {
        const std::size_t length = detail::require_length(o);
        const auto machines = build_machines(spec);
        Json meta = detail::metadata("kernel", spec);
        meta["length"] = length;
        std::vector<Kernel> kernels;
        for (const auto& m : machines) {
            kernels.push_back(full_kernel(m.system, length));
        }
        if (json) {
            Json data = Json::array();
            for (std::size_t h = 0; h < kernels.size(); ++h) {
                data.push_back(Json{{"machine", h}, {"kernel", to_json(kernels[h])}});
            }
            detail::emit_json(out, meta, data);
            return;
        }
        CsvWriter csv(out, meta);
        csv.header({"machine", "l", "value"});
        for (std::size_t h = 0; h < kernels.size(); ++h) {
            for (std::size_t l = 0; l < length; ++l) {
                csv.row(h, l, kernels[h][l]);
            }
        }
    }

    inline void freqresp(const Options& o, const InitSpec& spec, bool json, std::ostream& out)
    {
        const std::size_t grid_size = o.grid.value_or(1024);
        if (grid_size == 0) {
            throw ConfigError("--grid must be >= 1");
        }
        if (o.truncate && *o.truncate == 0) {
            throw ConfigError("--truncate must be >= 1");
        }
        const auto machines = build_machines(spec);
        const auto grid = uniform_theta_grid(grid_size);
        Json meta = detail::metadata("freqresp", spec);
        meta["grid"] = grid_size;
        meta["response"] = o.truncate ? "truncated" : "closed";
        if (o.truncate) {
            meta["truncate"] = *o.truncate;
        }
        std::vector<FrequencyResponse> responses;
        for (const auto& m : machines) {
            responses.push_back(o.truncate ? freq_response_truncated(m.system, grid, *o.truncate)
                                           : freq_response_closed(m.system, grid));
        }
        if (json) {
            Json data = Json::array();
            for (std::size_t h = 0; h < responses.size(); ++h) {
                data.push_back(Json{{"machine", h}, {"response", to_json(responses[h])}});
            }
            detail::emit_json(out, meta, data);
            return;
        }
        CsvWriter csv(out, meta);
        csv.header({"machine", "theta", "re", "im", "mag_db"});
        for (std::size_t h = 0; h < responses.size(); ++h) {
            const auto db = responses[h].magnitudes_db();
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const Complex v = responses[h].values[i];
                csv.row(h, grid[i], v.real(), v.imag(), db[i]);
            }
        }
    }

    inline void delay(const Options& o, const InitSpec& spec, bool json, std::ostream& out)
    {
        DelayConfig cfg;
        cfg.tau = o.tau;
        cfg.length = o.length.value_or(cfg.length);
        cfg.state_dim = spec.n;
        cfg.bandwidth_fraction = o.bandwidth;
        cfg.seed = spec.seed;
        cfg.trials = o.trials;
        validate(cfg);

        const bool continuous = is_continuous(spec.scheme);
        const bool fix_zero = o.fix_decay_zero && continuous;
        struct Point {
            double value;
            DelayResult result;
        };
        std::vector<Point> points;
        std::vector<double> values = o.values;
        if (values.empty()) {
            values.push_back(continuous ? spec.step.value_or(2.0 / static_cast<double>(cfg.tau))
                                        : spec.decay.value_or(0.0));
        }
        for (double v : values) {
            InitSpec s = spec;
            if (continuous) {
                s.step = v;
            } else {
                s.decay = v;
            }
            validate(s);
            points.push_back({v, run_delay_experiment(cfg, s, fix_zero)});
        }

        Json meta = detail::metadata("delay", spec);
        meta.erase("h");
        meta["tau"] = cfg.tau;
        meta["length"] = cfg.length;
        meta["bandwidth"] = cfg.bandwidth_fraction;
        meta["trials"] = cfg.trials;
        meta["ridge"] = cfg.ridge;
        meta["fix_decay_zero"] = fix_zero;
        meta["sweep"] = continuous ? "delta" : "xi";
        if (json) {
            Json data = Json::array();
            for (const auto& p : points) {
                Json entry{{"value", p.value}, {"normalized_mse", p.result.normalized_mse}, {"mse", p.result.mse},
                    {"trial_normalized_mse", p.result.trial_normalized_mse}};
                if (o.kernels) {
                    entry["readout"] = ssmspectra::detail::complex_list(p.result.readout);
                    entry["kernel_snapshot"] = to_json(p.result.kernel_snapshot);
                }
                data.push_back(std::move(entry));
            }
            detail::emit_json(out, meta, data);
            return;
        }
        CsvWriter csv(out, meta);
        csv.header({"value", "normalized_mse", "mse"});
        for (const auto& p : points) {
            csv.row(p.value, p.result.normalized_mse, p.result.mse);
        }
    }

    inline void hinf(const Options& o, const InitSpec& spec, bool json, std::ostream& out)
    {
        const std::size_t grid_size = o.grid.value_or(kDefaultHinfGrid);
        if (grid_size == 0) {
            throw ConfigError("--grid must be >= 1");
        }
        const auto machines = build_machines(spec);
        struct Entry {
            std::size_t machine;
            double decay;
            HInfReport report;
        };
        std::vector<Entry> entries;
        for (std::size_t h = 0; h < machines.size(); ++h) {
            const auto& sys = machines[h].system;
            entries.push_back({h, detail::decay_parameter(sys), hinf_report(sys, grid_size)});
        }
        std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
            return a.decay < b.decay;
        });

        Json meta = detail::metadata("hinf", spec);
        meta["grid"] = grid_size;
        if (json) {
            Json data = Json::array();
            for (const auto& e : entries) {
                Json entry{{"machine", e.machine}, {"decay", e.decay}};
                entry.update(to_json(e.report));
                data.push_back(std::move(entry));
            }
            detail::emit_json(out, meta, data);
            return;
        }
        CsvWriter csv(out, meta);
        csv.header({"machine", "decay", "system_score", "argmax_theta"});
        for (const auto& e : entries) {
            csv.row(e.machine, e.decay, e.report.system_score, e.report.argmax_theta);
        }
    }

    inline void alias(const Options& o, const InitSpec& spec, bool json, std::ostream& out)
    {
        if (!is_continuous(spec.scheme)) {
            throw ConfigError("alias needs a continuous scheme (legs, inv, lin)");
        }
        std::vector<double> steps = o.values;
        if (steps.empty() && spec.step) {
            steps.push_back(*spec.step);
        }
        if (steps.empty()) {
            throw ConfigError("alias needs --delta or a non-empty --values list of steps");
        }
        for (double s : steps) {
            if (!(s > 0.0) || !std::isfinite(s)) {
                throw ConfigError("alias: steps must be finite and > 0");
            }
        }
        const PoleSet poles = ssmspectra::detail::continuous_base(spec);
        std::vector<AliasReport> reports;
        for (double s : steps) {
            reports.push_back(alias_check(poles, s));
        }
        Json meta = detail::metadata("alias", spec);
        meta.erase("h");
        if (json) {
            Json data = Json::array();
            for (const auto& r : reports) {
                data.push_back(to_json(r));
            }
            detail::emit_json(out, meta, data);
            return;
        }
        CsvWriter csv(out, meta);
        csv.header({"delta", "nyquist_ok", "max_abs_digital_freq", "colliding_pairs"});
        for (const auto& r : reports) {
            csv.row(r.step, r.nyquist_ok, r.max_abs_digital_freq, r.colliding_pairs.size());
        }
    }

    inline void gram(const Options& o, const InitSpec& spec, bool json, std::ostream& out)
    {
        const std::size_t length = detail::require_length(o);
        const auto machines = build_machines(spec);
        const PoleSet& poles = machines.front().system.poles();
        const Eigen::MatrixXcd g = vandermonde_gram(poles, length);
        const Eigen::VectorXd s = g.selfadjointView<Eigen::Lower>().eigenvalues().cwiseAbs();
        const double cond = s.minCoeff() > 0.0 ? s.maxCoeff() / s.minCoeff() : std::numeric_limits<double>::infinity();

        Json meta = detail::metadata("gram", spec);
        meta["length"] = length;
        meta["machine"] = 0;
        if (json) {
            Json rows = Json::array();
            for (Eigen::Index i = 0; i < g.rows(); ++i) {
                rows.push_back(ssmspectra::detail::complex_list(std::span<const Complex>(
                    ComplexVector(g.row(i).begin(), g.row(i).end()))));
            }
            Json data{{"condition_number", std::isfinite(cond) ? Json(cond) : Json("inf")}, {"gram", rows}};
            detail::emit_json(out, meta, data);
            return;
        }
        meta["condition_number"] = std::isfinite(cond) ? format_double(cond) : std::string("inf");
        CsvWriter csv(out, meta);
        csv.header({"row", "col", "re", "im"});
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            for (Eigen::Index j = 0; j < g.cols(); ++j) {
                csv.row(static_cast<std::size_t>(i), static_cast<std::size_t>(j), g(i, j).real(), g(i, j).imag());
            }
        }
    }

} // namespace commands

inline int run(const std::vector<std::string>& user_args, std::ostream& out, std::ostream& err,
    std::optional<std::string> env_seed = std::nullopt, bool read_env = true)
{
    if (read_env && !env_seed) {
        if (const char* v = std::getenv(kSeedEnv)) {
            env_seed = v;
        }
    }

    CLI::App app{"Spectral analysis of diagonal state-space models", "ssmspectra"};
    app.set_help_flag("--help", "print this help and exit"); // -h would clash with --h
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--scheme", o.scheme, "initializer: " + scheme_list())->capture_default_str();
        sub->add_option("--n", o.n, "state size N per machine")->capture_default_str();
        sub->add_option("--h", o.h, "number of machines H")->capture_default_str();
        sub->add_option("--xi", o.xi, "fixed decay xi (discrete schemes)");
        sub->add_option("--xi-min", o.xi_min, "lower end of the sampled decay range")->capture_default_str();
        sub->add_option("--xi-max", o.xi_max, "upper end of the sampled decay range")->capture_default_str();
        sub->add_option("--delta", o.delta, "fixed step (continuous schemes)");
        sub->add_option("--delta-min", o.delta_min, "lower end of the sampled step range")->capture_default_str();
        sub->add_option("--delta-max", o.delta_max, "upper end of the sampled step range")->capture_default_str();
        sub->add_option("--re", o.re, "override Re(lambda) of continuous poles");
        sub->add_option("--conjugate", o.conjugate, "append the conjugate of every pole")->capture_default_str();
        sub->add_option("--seed", o.seed, std::string("root seed (falls back to ") + kSeedEnv + ", then 0)");
        sub->add_option("--out", o.out, "write the artifact to this file instead of stdout");
        sub->add_option("--format", o.format, "csv or json");
    };

    auto* poles_cmd = app.add_subcommand("poles", "print initializer poles");
    auto* kernel_cmd = app.add_subcommand("kernel", "print convolution kernels");
    auto* freq_cmd = app.add_subcommand("freqresp", "frequency response on a uniform grid");
    auto* delay_cmd = app.add_subcommand("delay", "delay-task sweep over steps or decays");
    auto* hinf_cmd = app.add_subcommand("hinf", "H-infinity scores per machine");
    auto* alias_cmd = app.add_subcommand("alias", "aliasing report over a list of steps");
    auto* gram_cmd = app.add_subcommand("gram", "Vandermonde Gram matrix and its condition number");
    auto* self_cmd = app.add_subcommand("selftest", "run the acceptance checks");

    for (auto* sub : {poles_cmd, kernel_cmd, freq_cmd, delay_cmd, hinf_cmd, alias_cmd, gram_cmd}) {
        add_common(sub);
    }
    for (auto* sub : {kernel_cmd, delay_cmd, gram_cmd}) {
        sub->add_option("--length", o.length, "sequence length L");
    }
    freq_cmd->add_option("--grid", o.grid, "number of theta points (default 1024)");
    freq_cmd->add_option("--truncate", o.truncate, "use the DTFT truncated to this many taps");
    hinf_cmd->add_option("--grid", o.grid, "search grid size (default 4096)");
    delay_cmd->add_option("--tau", o.tau, "delay in samples")->capture_default_str();
    delay_cmd->add_option("--trials", o.trials, "number of noise draws")->capture_default_str();
    delay_cmd->add_option("--bandwidth", o.bandwidth, "noise bandwidth as a fraction of the sample rate")
        ->capture_default_str();
    delay_cmd->add_option("--fix-decay-zero", o.fix_decay_zero, "continuous schemes: force Re(lambda) = 0")
        ->capture_default_str();
    delay_cmd->add_option("--kernels", o.kernels, "json only: include readouts and kernel snapshots")
        ->capture_default_str();
    for (auto* sub : {delay_cmd, alias_cmd}) {
        sub->add_option("--values", o.values, "sweep values (delta for continuous schemes, xi otherwise)")
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
            ->delimiter(',');
    }

    try {
        const auto args = detail::expand_config(user_args, [&](const std::string& command, const std::string& key) {
            CLI::App* sub = nullptr;
            try {
                sub = app.get_subcommand(command);
            } catch (const CLI::OptionNotFound&) {
                return true; // let the parser report the bad subcommand
            }
            return sub->get_option_no_throw("--" + key) != nullptr;
        });
        std::vector<const char*> argv{"ssmspectra"};
        for (const auto& a : args) {
            argv.push_back(a.c_str());
        }
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const detail::ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (self_cmd->parsed()) {
            const auto results = acceptance::run_all();
            bool all = true;
            for (const auto& r : results) {
                const char* tag = r.informational ? "INFO" : (r.passed ? "PASS" : "FAIL");
                out << '[' << tag << "] " << r.id << ' ' << r.name << ": " << r.detail << '\n';
                all = all && (r.informational || r.passed);
            }
            return all ? 0 : 3;
        }

        const InitSpec spec = detail::init_spec(o, detail::resolve_seed(o, env_seed));
        const bool is_hinf = hinf_cmd->parsed();
        const std::string format = o.format.empty() ? (is_hinf ? "json" : "csv") : o.format;
        if (format != "csv" && format != "json") {
            throw detail::ConfigError("--format must be csv or json");
        }
        const bool json = format == "json";

        // render into a buffer first so that a failing command leaves no partial artifact
        std::ostringstream buffer;
        if (poles_cmd->parsed()) {
            commands::poles(o, spec, json, buffer);
        } else if (kernel_cmd->parsed()) {
            commands::kernel(o, spec, json, buffer);
        } else if (freq_cmd->parsed()) {
            commands::freqresp(o, spec, json, buffer);
        } else if (delay_cmd->parsed()) {
            commands::delay(o, spec, json, buffer);
        } else if (is_hinf) {
            commands::hinf(o, spec, json, buffer);
        } else if (alias_cmd->parsed()) {
            commands::alias(o, spec, json, buffer);
        } else {
            commands::gram(o, spec, json, buffer);
        }
        detail::Sink sink(o.out, out);
        sink.get() << buffer.str();
        return 0;
    } catch (const detail::ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return is_config_error(e.code()) ? 2 : 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
}

} // namespace ssmspectra::cli
