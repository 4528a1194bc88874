#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qkdstar/config.hpp"
#include "qkdstar/errors.hpp"
#include "qkdstar/mac_rates.hpp"
#include "qkdstar/mc_oracle.hpp"
#include "qkdstar/ooc_codes.hpp"
#include "qkdstar/sweeps.hpp"

namespace qkdstar::cli {

// ============================================================================
// Command-line front end. Exit codes: 0 success, 2 configuration/usage error,
// 3 model-domain error, 4 internal error.
// ============================================================================

namespace detail {

inline void with_output(const std::string& path, std::ostream& fallback,
                        const std::function<void(std::ostream&)>& fn) {
    if (path.empty()) {
        fn(fallback);
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw config_error("cannot open output file '" + path + "'");
    fn(file);
}

[[nodiscard]] inline SystemParams params_from(const std::string& config_path) {
    if (config_path.empty()) return nominal_params();
    return load_config(config_path).params;
}

} // namespace detail

/// Parses and executes one command line; argv[0] is the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
    CLI::App app{"Secret-key rate calculator and Monte Carlo oracle for "
                 "multi-user QKD star networks (TDMA / code spreading / "
                 "listen-before-send / WDM overlays)."};
    app.require_subcommand(1);

    std::string output;
    std::string format;
    std::uint64_t seed = 1;
    std::uint64_t trials = 100000;
    int parallel = 1;
    bool per_frame = false;
    app.add_option("--output", output, "write results to this file instead of stdout");
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "keyvalue"}));
    app.add_option("--seed", seed, "simulation seed");
    app.add_option("--trials", trials, "simulation trial count");
    app.add_option("--parallel", parallel, "worker thread count")
        ->check(CLI::PositiveNumber);
    app.add_flag("--per-frame", per_frame,
                 "report rates in bits per frame instead of bits/s");

    auto* scenario_cmd =
        app.add_subcommand("scenario", "run a named preset parameter sweep");
    scenario_cmd->fallthrough();
    std::string scenario_name;
    scenario_cmd->add_option("name", scenario_name, "preset name (fig5a ... fig10)")
        ->required();

    auto* sweep_cmd =
        app.add_subcommand("sweep", "run the sweep described by a config file");
    sweep_cmd->fallthrough();
    std::string sweep_path;
    sweep_cmd->add_option("config", sweep_path, "config file path")->required();

    auto* mc_cmd = app.add_subcommand(
        "mc", "Monte Carlo interference oracle vs the analytical model");
    mc_cmd->fallthrough();
    std::string mc_scheme = "cdma";
    std::string mc_mode;
    std::string mc_config;
    int mc_w = -1;
    long mc_k = -1;
    int mc_n_active = 0;
    mc_cmd->add_option("--scheme", mc_scheme,
                       "scheme token (tdma, cdma, lbs, cdma:w=2, ...)");
    mc_cmd->add_option("--w", mc_w, "CDMA code weight");
    mc_cmd->add_option("--k", mc_k, "LBS listening periods");
    mc_cmd->add_option("--mode", mc_mode,
                       "bernoulli (default), code, or sensing (LBS only)")
        ->check(CLI::IsMember({"bernoulli", "code", "sensing"}));
    mc_cmd->add_option("--n-active", mc_n_active,
                       "active pair count (default: full capacity)");
    mc_cmd->add_option("--config", mc_config,
                       "parameter config file (default: nominal parameters)");

    auto* codes_cmd = app.add_subcommand(
        "codes", "generate an optical orthogonal code family");
    codes_cmd->fallthrough();
    int codes_n = 0, codes_w = 0, codes_count = 0;
    codes_cmd->add_option("n_chips", codes_n, "code length")->required();
    codes_cmd->add_option("w", codes_w, "code weight")->required();
    codes_cmd->add_option("count", codes_count, "family size")->required();

    auto* maxw_cmd = app.add_subcommand(
        "maxw", "largest WDM channel count with positive rate");
    maxw_cmd->fallthrough();
    double maxw_db = 0.0;
    std::string maxw_inner = "tdma";
    std::string maxw_config;
    int maxw_bound = 256;
    maxw_cmd->add_option("alpha_xt_db", maxw_db, "inter-channel isolation in dB")
        ->required();
    maxw_cmd->add_option("--inner", maxw_inner, "inner scheme token");
    maxw_cmd->add_option("--wmax", maxw_bound, "scan bound")
        ->check(CLI::PositiveNumber);
    maxw_cmd->add_option("--config", maxw_config,
                         "parameter config file (default: nominal parameters)");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);
        app.exit(e, out, err);
        return 2;
    }

    try {
        if (app.got_subcommand(scenario_cmd)) {
            detail::with_output(output, out, [&](std::ostream& os) {
                run_scenario(scenario_name, os,
                             format.empty() ? "csv" : format, per_frame);
            });
        } else if (app.got_subcommand(sweep_cmd)) {
            const LoadedConfig cfg = load_config(sweep_path);
            if (cfg.sweeps.empty())
                throw config_error(sweep_path +
                                   ": config defines no sweep ('variable' key)");
            for (const auto& sweep : cfg.sweeps) {
                SweepSpec resolved = sweep;
                if (!format.empty()) resolved.format = format;
                const std::string path =
                    !output.empty() ? output : resolved.output;
                detail::with_output(path, out, [&](std::ostream& os) {
                    run_sweep(cfg, resolved, os, per_frame);
                });
            }
        } else if (app.got_subcommand(mc_cmd)) {
            McConfig cfg;
            cfg.params = detail::params_from(mc_config);
            cfg.scheme = parse_scheme(mc_scheme);
            if (mc_w >= 1) cfg.scheme.weight = mc_w;
            if (mc_k >= 0) cfg.scheme.listen_periods = mc_k;
            cfg.trials = trials;
            cfg.seed = seed;
            cfg.threads = parallel;
            cfg.n_active = mc_n_active > 0 ? mc_n_active : cfg.params.n_star;
            McRunKind kind = McRunKind::placement;
            if (mc_mode.empty()) {
                kind = cfg.scheme.kind == SchemeKind::lbs ? McRunKind::sensing
                                                          : McRunKind::placement;
                cfg.mode = McMode::bernoulli_model;
            } else if (mc_mode == "bernoulli") {
                cfg.mode = McMode::bernoulli_model;
            } else if (mc_mode == "code") {
                cfg.mode = McMode::code_level;
            } else {  // sensing
                if (cfg.scheme.kind != SchemeKind::lbs)
                    throw config_error("--mode sensing requires an lbs scheme");
                kind = McRunKind::sensing;
            }
            detail::with_output(output, out, [&](std::ostream& os) {
                run_mc(cfg, kind, os, format.empty() ? "keyvalue" : format);
            });
        } else if (app.got_subcommand(codes_cmd)) {
            const OocFamily fam = generate_family(codes_n, codes_w, codes_count);
            detail::with_output(output, out, [&](std::ostream& os) {
                for (const auto& code : fam.codes) {
                    for (size_t i = 0; i < code.positions.size(); ++i)
                        os << (i ? "," : "") << code.positions[i];
                    os << '\n';
                }
            });
        } else if (app.got_subcommand(maxw_cmd)) {
            if (maxw_db < 0.0)
                throw config_error("alpha_xt_db must be >= 0 (an isolation level)");
            const SystemParams params = detail::params_from(maxw_config);
            const double alpha = std::pow(10.0, -maxw_db / 10.0);
            const SchemeSpec inner = parse_scheme(maxw_inner);
            const int best = max_wdm_channels(params, alpha, inner, maxw_bound);
            detail::with_output(output, out, [&](std::ostream& os) {
                os << "alpha_xt_db: " << qkdstar::detail::format_number(maxw_db)
                   << "\n"
                   << "alpha_xt: " << qkdstar::detail::format_number(alpha) << "\n"
                   << "inner: " << scheme_label(inner) << "\n"
                   << "w_max_scanned: " << maxw_bound << "\n"
                   << "max_channels: " << best << "\n"
                   << "users_per_channel: " << params.n_star << "\n"
                   << "total_users: " << static_cast<long>(best) * params.n_star
                   << "\n";
            });
        }
    } catch (const config_error& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const model_error& e) {
        err << "model error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}

} // namespace qkdstar::cli
