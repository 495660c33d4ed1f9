#include "commands.hpp"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "format.hpp"
#include "runner.hpp"
#include "qda/errors.hpp"
#include "qda/verify.hpp"

namespace qda::cli {

namespace {

using nlohmann::ordered_json;

// ---------------------------------------------------------------- options

// Raw option values as parsed; merging with presets and the config file
// happens afterwards so that explicit flags always win.
struct CommonOpts {
    std::string engine = "analytic";
    double gamma_b = 1.0;
    double j = 0.5;
    double delta_ab = 0.0;
    double linewidth = 1e-3;
    double from = -2.0;
    double to = 3.0;
    int points = 1001;
    std::string quantities = "p_total,w_abs";
    std::string photons = "1,10,100";
    double rel_tol = 1e-10;
    bool include_cross = false;
    std::string out;
    std::string svg;
    std::string preset;
    std::string config;
    bool strict = false;
    double residual_tol = 1e-8;
    double delta_l = 0.0;
    int threads = 1;
};

struct VerifyOpts {
    std::string suite = "all";
    std::uint64_t seed = 12345;
    int samples = 1000;
    double rel_tol = 1e-10;
    std::string out;
};

// Parameter sets reproducing the published sweep figures (all with
// gamma_b = gamma_a and degenerate sites).
struct Preset {
    const char* name;
    double j;
    double linewidth;
    double from;
    double to;
    int points;
    const char* quantities;
};

constexpr Preset presets[] = {
    {"fig2", 5.0, 1e-3, -2.0, 12.0, 1401, "p_total,w_abs"},
    {"fig3", 0.5, 1e-3, -2.0, 3.0, 1001, "p_total,w_abs"},
    {"fig4", 0.5, 1.0, -2.0, 3.0, 1001, "p_total,w_abs"},
    {"fig5", 5.0, 1.0, -2.0, 12.0, 1401, "p_total,w_abs"},
    {"fig6", 0.2, 1e-3, -2.0, 2.4, 1001, "w_abs,p_total,rho_pm"},
    {"fig7", 0.5, 1e-3, -2.0, 3.0, 1001, "w_abs,p_total,rho_pm"},
    {"fig8", 1.0, 1e-3, -2.0, 4.0, 1001, "w_abs,p_total,rho_pm"},
    {"fig9", 3.0, 1e-3, -2.0, 8.0, 1001, "w_abs,p_total,rho_pm"},
    {"fig10", 0.5, 1e-3, -2.0, 3.0, 1001, "p_cascade"},
    {"fig11", 1.0, 1e-3, -2.0, 4.0, 1001, "p_cascade"},
    {"fig12", 3.0, 1e-3, -2.0, 8.0, 1001, "p_cascade"},
};

const Preset& find_preset(const std::string& name) {
    for (const auto& p : presets)
        if (name == p.name) return p;
    throw std::invalid_argument("unknown preset: " + name +
                                " (expected fig2..fig12)");
}

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> items;
    std::string item;
    std::istringstream in(csv);
    while (std::getline(in, item, ','))
        if (!item.empty()) items.push_back(item);
    return items;
}

std::vector<std::int64_t> parse_photons(const std::string& csv) {
    std::vector<std::int64_t> counts;
    for (const auto& item : split_list(csv)) {
        try {
            std::size_t used = 0;
            counts.push_back(std::stoll(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad photon count: " + item);
        }
    }
    if (counts.empty()) throw std::invalid_argument("empty photon list");
    return counts;
}

void add_common_flags(CLI::App* cmd, CommonOpts& o, bool has_axis) {
    cmd->add_option("--engine", o.engine,
                    "evaluation engine: analytic, oracle, or both")
        ->check(CLI::IsMember({"analytic", "oracle", "both"}));
    cmd->add_option("--gamma-b", o.gamma_b, "decay rate ratio gamma_b/gamma_a");
    cmd->add_option("--j", o.j, "intersite coupling J/gamma_a");
    cmd->add_option("--delta-ab", o.delta_ab,
                    "site-site detuning (omega_a - omega_b)/gamma_a");
    cmd->add_option("--linewidth", o.linewidth, "pulse linewidth /gamma_a");
    if (has_axis) {
        cmd->add_option("--from", o.from, "lowest laser detuning /gamma_a");
        cmd->add_option("--to", o.to, "highest laser detuning /gamma_a");
        cmd->add_option("--points", o.points, "number of grid points (>= 2)");
        cmd->add_option("--threads", o.threads,
                        "worker threads (0 = hardware); output order is "
                        "independent of this");
        cmd->add_option("--svg", o.svg, "also write a line chart to this path");
        cmd->add_flag("--strict", o.strict,
                      "exit nonzero when any grid point fails numerically");
    } else {
        cmd->add_option("--delta-l", o.delta_l,
                        "laser detuning from the lower dressed state /gamma_a");
        cmd->add_option("--residual-tol", o.residual_tol,
                        "largest acceptable identity/cross residual");
    }
    cmd->add_option("--rel-tol", o.rel_tol, "oracle integration tolerance");
    cmd->add_flag("--include-cross", o.include_cross,
                  "keep the dissipative cross coupling in the oracle (only "
                  "meaningful when gamma_a != gamma_b)");
    cmd->add_option("--out", o.out, "output file (default: stdout)");
    cmd->add_option("--preset", o.preset,
                    "named parameter set fig2..fig12 (overridable by flags)");
    cmd->add_option("--config", o.config,
                    "JSON file with any of the long option names as keys "
                    "(flags override file values)");
}

// Config keys accepted in a JSON config document; aligned with the long
// flag names, underscores for dashes.
bool scalar_key(const std::string& k) {
    static const char* keys[] = {
        "engine",     "gamma_b",       "j",          "delta_ab", "linewidth",
        "from",       "to",            "points",     "quantities", "photons",
        "rel_tol",    "include_cross", "out",        "svg",      "preset",
        "strict",     "residual_tol",  "delta_l",    "threads"};
    for (const char* key : keys)
        if (k == key) return true;
    return false;
}

std::string joined_list(const ordered_json& v, const char* key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
        std::string out;
        for (const auto& item : v) {
            if (!out.empty()) out += ',';
            if (item.is_string())
                out += item.get<std::string>();
            else if (item.is_number_integer())
                out += std::to_string(item.get<std::int64_t>());
            else
                throw std::invalid_argument(std::string("config key '") + key +
                                            "' has a non-string, non-integer "
                                            "element");
        }
        return out;
    }
    throw std::invalid_argument(std::string("config key '") + key +
                                "' must be a string or an array");
}

ordered_json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot read config file: " + path);
    ordered_json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config parse error: ") +
                                    e.what());
    }
    if (!doc.is_object())
        throw std::invalid_argument("config root must be a JSON object");
    return doc;
}

// Merge order: built-in defaults, then preset, then config file, then
// explicit flags. `given` tells whether a flag was typed on the command
// line; CLI11 leaves non-given options at their defaults.
void merge_options(const CLI::App* cmd, CommonOpts& o) {
    // Not every flag exists on every subcommand (point has no --from);
    // treat an unregistered flag as not given.
    auto given = [cmd](const std::string& flag) {
        const CLI::Option* opt = cmd->get_option_no_throw(flag);
        return opt != nullptr && opt->count() > 0;
    };

    ordered_json config;
    if (!o.config.empty()) config = load_config(o.config);
    for (const auto& [key, value] : config.items()) {
        if (!scalar_key(key))
            throw std::invalid_argument("unknown config key: " + key);
        (void)value;
    }

    std::string preset_name = o.preset;
    if (preset_name.empty() && config.contains("preset"))
        preset_name = config["preset"].get<std::string>();

    if (!preset_name.empty()) {
        const Preset& p = find_preset(preset_name);
        auto from_preset = [&](const std::string& flag, const char* key,
                               auto& slot, auto value) {
            if (!given(flag) && !config.contains(key)) slot = value;
        };
        from_preset("--j", "j", o.j, p.j);
        from_preset("--linewidth", "linewidth", o.linewidth, p.linewidth);
        from_preset("--from", "from", o.from, p.from);
        from_preset("--to", "to", o.to, p.to);
        from_preset("--points", "points", o.points, p.points);
        from_preset("--quantities", "quantities", o.quantities,
                    std::string(p.quantities));
    }

    auto from_config = [&](const std::string& flag, const char* key,
                           auto& slot) {
        if (!given(flag) && config.contains(key))
            slot = config[key].get<std::decay_t<decltype(slot)>>();
    };
    from_config("--engine", "engine", o.engine);
    from_config("--gamma-b", "gamma_b", o.gamma_b);
    from_config("--j", "j", o.j);
    from_config("--delta-ab", "delta_ab", o.delta_ab);
    from_config("--linewidth", "linewidth", o.linewidth);
    from_config("--from", "from", o.from);
    from_config("--to", "to", o.to);
    from_config("--points", "points", o.points);
    from_config("--rel-tol", "rel_tol", o.rel_tol);
    from_config("--include-cross", "include_cross", o.include_cross);
    from_config("--out", "out", o.out);
    from_config("--svg", "svg", o.svg);
    from_config("--strict", "strict", o.strict);
    from_config("--residual-tol", "residual_tol", o.residual_tol);
    from_config("--delta-l", "delta_l", o.delta_l);
    from_config("--threads", "threads", o.threads);
    if (!given("--quantities") && config.contains("quantities"))
        o.quantities = joined_list(config["quantities"], "quantities");
    if (!given("--photons") && config.contains("photons"))
        o.photons = joined_list(config["photons"], "photons");

    if (o.engine != "analytic" && o.engine != "oracle" && o.engine != "both")
        throw std::invalid_argument("engine must be analytic, oracle, or both");
}

RunSpec to_spec(const CommonOpts& o) {
    RunSpec spec;
    spec.engine = o.engine == "analytic"  ? Engine::analytic
                  : o.engine == "oracle" ? Engine::oracle
                                         : Engine::both;
    spec.gamma_b = o.gamma_b;
    spec.j = o.j;
    spec.delta_ab = o.delta_ab;
    spec.linewidth = o.linewidth;
    spec.from = o.from;
    spec.to = o.to;
    spec.points = o.points;
    spec.quantities = split_list(o.quantities);
    spec.photons = parse_photons(o.photons);
    spec.rel_tol = o.rel_tol;
    spec.include_cross = o.include_cross;
    spec.threads = o.threads;
    return spec;
}

void emit(const std::string& payload, const std::string& out_path) {
    if (out_path.empty())
        std::cout << payload;
    else
        write_file(out_path, payload);
}

// ------------------------------------------------------------- commands

int cmd_point(const CLI::App* cmd, CommonOpts& o) {
    merge_options(cmd, o);
    const RunSpec spec = to_spec(o);
    const PointOutcome outcome = run_point(spec, o.delta_l);
    std::cout << outcome.doc.dump(2) << '\n';
    if (!o.out.empty()) write_file(o.out, outcome.doc.dump(2) + "\n");
    if (outcome.numerical_failure) return exit_numerical_failure;
    return outcome.max_residual <= o.residual_tol ? exit_ok
                                                  : exit_verification_failure;
}

int cmd_sweep(const CLI::App* cmd, CommonOpts& o, bool cascade) {
    merge_options(cmd, o);
    RunSpec spec = to_spec(o);
    if (cascade) {
        spec.quantities = {"p_cascade"};
        spec.cascade_work = true;
    }
    const SweepOutcome outcome = run_sweep(spec);
    emit(to_csv(outcome.table), o.out);
    if (!o.svg.empty()) write_file(o.svg, to_svg(outcome.table));
    if (outcome.failures > 0) {
        std::cerr << outcome.failures << " of " << spec.points
                  << " grid points failed numerically (cells left blank)\n";
        if (o.strict) return exit_numerical_failure;
    }
    return exit_ok;
}

ordered_json suite_json(const verify::SuiteReport& suite) {
    ordered_json j;
    j["suite"] = suite.suite;
    j["elapsed_seconds"] = suite.elapsed_seconds;
    j["all_passed"] = suite.all_passed();
    j["properties"] = ordered_json::array();
    for (const auto& p : suite.properties)
        j["properties"].push_back({{"name", p.name},
                                   {"samples", p.samples},
                                   {"max_residual", p.max_residual},
                                   {"tolerance", p.tolerance},
                                   {"passed", p.passed}});
    return j;
}

int cmd_verify(const VerifyOpts& o) {
    std::vector<verify::SuiteReport> reports;
    const bool all = o.suite == "all";
    if (all || o.suite == "identities")
        reports.push_back(verify::run_identity_suite(o.seed, o.samples));
    if (all || o.suite == "oracle-equivalence")
        reports.push_back(verify::run_equivalence_suite(o.rel_tol));
    if (all || o.suite == "limits")
        reports.push_back(verify::run_limits_suite(o.seed));

    ordered_json doc;
    doc["suites"] = ordered_json::array();
    bool all_passed = true;
    for (const auto& r : reports) {
        doc["suites"].push_back(suite_json(r));
        all_passed = all_passed && r.all_passed();
    }
    doc["all_passed"] = all_passed;
    std::cout << doc.dump(2) << '\n';
    if (!o.out.empty()) write_file(o.out, doc.dump(2) + "\n");
    return all_passed ? exit_ok : exit_verification_failure;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{
        "Energetics of pulse-driven population transfer in a dissipative "
        "two-site system: closed forms, a numerical oracle, and "
        "self-organization (QDA) diagnostics"};
    app.require_subcommand(1);

    CommonOpts point_opts, sweep_opts, cascade_opts;
    VerifyOpts verify_opts;

    CLI::App* point = app.add_subcommand(
        "point", "evaluate one detuning, print a JSON report");
    add_common_flags(point, point_opts, false);

    CLI::App* sweep = app.add_subcommand(
        "sweep", "sweep the laser detuning, write CSV (and optional SVG)");
    add_common_flags(sweep, sweep_opts, true);
    sweep->add_option("--quantities", sweep_opts.quantities,
                      "comma list from: p_total, p_lambda_plus, "
                      "p_lambda_minus, rho_pm, w_abs, w_reac, w_so, w_coh, "
                      "deviation, p_cascade");
    sweep->add_option("--photons", sweep_opts.photons,
                      "photon counts for p_cascade columns, e.g. 1,10,100");

    CLI::App* cascade = app.add_subcommand(
        "cascade", "sweep repeated-pulse transfer probability and work");
    add_common_flags(cascade, cascade_opts, true);
    cascade->add_option("--photons", cascade_opts.photons,
                        "photon counts, one p/w column pair each");

    CLI::App* verify = app.add_subcommand(
        "verify", "run a property suite, print a JSON pass/fail report");
    verify
        ->add_option("--suite", verify_opts.suite,
                     "identities, oracle-equivalence, limits, or all")
        ->check(CLI::IsMember({"identities", "oracle-equivalence", "limits",
                               "all"}));
    verify->add_option("--seed", verify_opts.seed, "random draw seed");
    verify->add_option("--samples", verify_opts.samples,
                       "sample count for the identity suite");
    verify->add_option("--rel-tol", verify_opts.rel_tol,
                       "oracle tolerance for the equivalence suite");
    verify->add_option("--out", verify_opts.out,
                       "also write the JSON report to this path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_config_error;
    }

    try {
        if (point->parsed()) return cmd_point(point, point_opts);
        if (sweep->parsed()) return cmd_sweep(sweep, sweep_opts, false);
        if (cascade->parsed()) return cmd_sweep(cascade, cascade_opts, true);
        if (verify->parsed()) return cmd_verify(verify_opts);
        return exit_config_error;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return exit_numerical_failure;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return exit_io_error;
    }
}

} // namespace qda::cli
