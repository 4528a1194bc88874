#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "qkdstar/config.hpp"
#include "qkdstar/errors.hpp"
#include "qkdstar/mac_rates.hpp"
#include "qkdstar/mc_oracle.hpp"
#include "qkdstar/network_model.hpp"

namespace qkdstar {

// ============================================================================
// Sweep drivers: named scenario presets reproducing the headline curves,
// generic config-driven sweeps, and the Monte-Carlo-vs-analytical report.
// Output is deterministic CSV (LF endings, 6 significant digits) or key-value
// text.
// ============================================================================

/// One output row of a sweep.
struct SweepRow {
    std::string scheme;   ///< stable scheme label
    double x = 0.0;       ///< sweep variable value
    RateReport report;
    double frame_t = 0.0; ///< frame period backing this row, ns
    double total_override = -1.0;  ///< network-wide total when >= 0
};

namespace detail {

/// Fixed-width-free formatting at 6 significant digits; byte-stable.
[[nodiscard]] inline std::string format_number(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                   std::chars_format::general, 6);
    return std::string(buf.data(), res.ptr);
}

struct RateColumns {
    double per_user;
    double total;
};

[[nodiscard]] inline RateColumns row_rates(const SweepRow& row, bool per_frame) {
    RateColumns c{row.report.per_user_rate,
                  row.total_override >= 0.0 ? row.total_override
                                            : row.report.total_rate};
    if (per_frame) {
        const double to_frame = row.frame_t * 1e-9;
        c.per_user *= to_frame;
        c.total *= to_frame;
    }
    return c;
}

inline void emit_rows(std::ostream& out, const std::string& variable,
                      std::vector<SweepRow> rows, const std::string& format,
                      bool per_frame) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const SweepRow& a, const SweepRow& b) {
                         if (a.x != b.x) return a.x < b.x;
                         return a.scheme < b.scheme;
                     });
    const std::string rate_suffix = per_frame ? "_bpframe" : "_bps";
    if (format == "keyvalue") {
        for (const auto& row : rows) {
            const auto rates = row_rates(row, per_frame);
            out << "scheme: " << row.scheme << "\n"
                << variable << ": " << format_number(row.x) << "\n"
                << "per_user_rate" << rate_suffix << ": "
                << format_number(rates.per_user) << "\n"
                << "total_rate" << rate_suffix << ": " << format_number(rates.total)
                << "\n"
                << "y0: " << format_number(row.report.y0_used) << "\n"
                << "q_mu: " << format_number(row.report.breakdown.q_mu) << "\n"
                << "e_mu: " << format_number(row.report.breakdown.e_mu) << "\n\n";
        }
        return;
    }
    out << "scheme," << variable << ",per_user_rate" << rate_suffix << ",total_rate"
        << rate_suffix << ",y0,q_mu,e_mu\n";
    for (const auto& row : rows) {
        const auto rates = row_rates(row, per_frame);
        out << row.scheme << ',' << format_number(row.x) << ','
            << format_number(rates.per_user) << ',' << format_number(rates.total)
            << ',' << format_number(row.report.y0_used) << ','
            << format_number(row.report.breakdown.q_mu) << ','
            << format_number(row.report.breakdown.e_mu) << '\n';
    }
}

} // namespace detail

[[nodiscard]] inline std::vector<std::string> scenario_names() {
    return {"fig5a", "fig5b", "fig6a", "fig6b", "fig7", "fig8", "fig10"};
}

/// Runs one named preset and emits its table.
///
/// fig5a: rate vs n_active, TDMA and CDMA w in {1,2,3} (capacity ignored).
/// fig5b: rate vs n_active, TDMA and LBS k in {0,100,500,1000}.
/// fig6a: rate vs code length at fixed 1 ns chips (frame grows with N_c).
/// fig6b: rate vs code length at fixed 16 ns frame (chips shrink with N_c).
/// fig7:  rate vs star size at full pairing, 128-chip frames.
/// fig8:  rate vs path loss at crosstalk multipliers 1 and 1000.
/// fig10: WDM-TDMA rate vs total users M = 16 W at 30 dB / 20 dB isolation.
inline void run_scenario(const std::string& name, std::ostream& out,
                         const std::string& format = "csv",
                         bool per_frame = false) {
    const SystemParams nominal = nominal_params();
    std::vector<SweepRow> rows;
    std::string variable;

    auto add = [&rows](const std::string& label, double x, RateReport rep,
                       double frame_t, double total_override = -1.0) {
        rows.push_back(SweepRow{label, x, std::move(rep), frame_t, total_override});
    };

    if (name == "fig5a") {
        variable = "n_active";
        for (int n = 1; n <= nominal.n_star; ++n) {
            add("tdma", n, rate_tdma(nominal, n), nominal.frame_t);
            for (int w : {1, 2, 3})
                add("cdma_w" + std::to_string(w), n,
                    rate_cdma(nominal, n, w, true, true), nominal.frame_t);
        }
    } else if (name == "fig5b") {
        variable = "n_active";
        for (int n = 1; n <= nominal.n_star; ++n) {
            add("tdma", n, rate_tdma(nominal, n), nominal.frame_t);
            for (long k : {0L, 100L, 500L, 1000L})
                add("lbs_k" + std::to_string(k), n, rate_lbs(nominal, n, k),
                    nominal.frame_t);
        }
    } else if (name == "fig6a" || name == "fig6b") {
        variable = "n_chips";
        for (int n_chips = 16; n_chips <= 1024; n_chips *= 2) {
            SystemParams p = nominal;
            p.n_chips = n_chips;
            if (name == "fig6a") {
                // chips stay 1 ns long; the frame stretches with the code
                p.frame_t = n_chips * p.tau_c;
            } else {
                // frame stays 16 ns; chips shrink and the filter widens
                p.tau_c = p.frame_t / n_chips;
                p.tau_p = p.tau_d = p.tau_c;
                p.b_opt = 1.0 / p.tau_c;
            }
            add("tdma", n_chips, rate_tdma(p, 16), p.frame_t);
            add("cdma_w1", n_chips, rate_cdma(p, 16, 1), p.frame_t);
            add("lbs_k500", n_chips, rate_lbs(p, 16, 500), p.frame_t);
        }
    } else if (name == "fig7") {
        variable = "n_star";
        for (int n : {4, 8, 16, 32, 64}) {
            SystemParams p = nominal;
            p.n_star = n;
            p.n_chips = 128;
            p.frame_t = 128.0;
            add("tdma", n, rate_tdma(p, n), p.frame_t);
            add("cdma_w1", n, rate_cdma(p, n, 1), p.frame_t);
            add("lbs_k500", n, rate_lbs(p, n, 500), p.frame_t);
        }
    } else if (name == "fig8") {
        variable = "path_loss_db";
        for (int loss = 0; loss <= 40; loss += 2) {
            for (double mult : {1.0, 1000.0}) {
                SystemParams p = nominal;
                p.path_loss_db = loss;
                p.gamma_xtalk = nominal.gamma_xtalk * mult;
                const std::string tag = "_xt" + std::to_string(static_cast<int>(mult));
                add("tdma" + tag, loss, rate_tdma(p, 16), p.frame_t);
                add("cdma_w1" + tag, loss, rate_cdma(p, 16, 1), p.frame_t);
                add("lbs_k500" + tag, loss, rate_lbs(p, 16, 500), p.frame_t);
            }
        }
    } else if (name == "fig10") {
        variable = "total_users";
        const SchemeSpec inner{SchemeKind::tdma, 1, 0, std::nullopt};
        for (int w = 1; w <= 40; ++w) {
            for (double iso_db : {30.0, 20.0}) {
                const double alpha = std::pow(10.0, -iso_db / 10.0);
                double per_user = 0.0;
                RateReport rep;
                try {
                    rep = rate_wdm(nominal, WdmParams{w, alpha}, inner, 16);
                    per_user = rep.per_user_rate;
                } catch (const model_error&) {
                    rep = RateReport{};  // yield beyond 1: no key at all
                    per_user = 0.0;
                }
                const double total_users = 16.0 * w;
                add("wdm_tdma_" + std::to_string(static_cast<int>(iso_db)) + "db",
                    total_users, rep, nominal.frame_t, per_user * total_users);
            }
        }
    } else {
        throw config_error("unknown scenario '" + name + "' (available: fig5a, "
                           "fig5b, fig6a, fig6b, fig7, fig8, fig10)");
    }
    detail::emit_rows(out, variable, std::move(rows), format, per_frame);
}

/// Runs the sweeps of a loaded config file against its parameter set.
inline void run_sweep(const LoadedConfig& cfg, const SweepSpec& sweep,
                      std::ostream& out, bool per_frame = false) {
    std::vector<SweepRow> rows;
    for (double value : sweep.values) {
        SystemParams p = cfg.params;
        int n_active = sweep.n_active > 0 ? sweep.n_active : p.n_star;
        if (sweep.variable == "n_active") {
            const double r = std::round(value);
            if (std::abs(value - r) > 1e-9)
                throw config_error("swept n_active values must be integers");
            n_active = static_cast<int>(r);
        } else {
            apply_variable(p, sweep.variable, value);
            if (sweep.n_active == 0) n_active = p.n_star;
        }
        for (const auto& scheme : sweep.schemes) {
            RateReport rep = rate_for_scheme(p, scheme, n_active, true,
                                             sweep.ignore_capacity);
            rows.push_back(SweepRow{scheme_label(scheme), value, std::move(rep),
                                    p.frame_t, -1.0});
        }
    }
    detail::emit_rows(out, sweep.variable, std::move(rows), sweep.format, per_frame);
}

/// Kind of simulation run by the `mc` front end.
enum class McRunKind { placement, sensing };

/// Runs the Monte Carlo oracle and prints the empirical-vs-analytical report.
/// format "keyvalue" (default) prints the full comparison; "csv" prints the
/// histogram table.
inline void run_mc(const McConfig& cfg, McRunKind kind, std::ostream& out,
                   const std::string& format = "keyvalue") {
    const McResult res = kind == McRunKind::sensing
                             ? simulate_lbs_sensing(cfg, cfg.scheme.listen_periods)
                             : simulate_interferers(cfg);

    // analytical references
    double analytic_p = 0.0;
    const double eta = link_transmissivity(cfg.params);
    const double base = detail::mc_base_yield(cfg, eta);
    RateReport analytic;
    switch (cfg.scheme.kind) {
        case SchemeKind::tdma:
            analytic = rate_for_scheme(cfg.params, cfg.scheme, cfg.n_active);
            analytic_p = 0.0;
            break;
        case SchemeKind::cdma:
            analytic = rate_for_scheme(cfg.params, cfg.scheme, cfg.n_active, true,
                                       /*ignore_capacity=*/true);
            analytic_p = collision_probability(cfg.params.n_chips, cfg.scheme.weight);
            break;
        case SchemeKind::lbs:
            analytic = rate_for_scheme(cfg.params, cfg.scheme, cfg.n_active);
            analytic_p = lbs_collision_probability(
                cfg.params, cfg.scheme.listen_periods,
                checked_yield(base + eta * cfg.params.mu, "y_cdma"));
            break;
    }

    const long n_int = cfg.n_active - 1;
    const double n = static_cast<double>(res.trials);

    // binomial reference pmf and total-variation distance
    double tvd = 0.0;
    std::vector<double> model_pmf(res.interferer_histogram.size(), 0.0);
    for (size_t m = 0; m < model_pmf.size(); ++m) {
        model_pmf[m] = binomial_weight(static_cast<long>(m), n_int, analytic_p);
        const double freq = static_cast<double>(res.interferer_histogram[m]) / n;
        tvd += std::abs(freq - model_pmf[m]);
    }
    tvd /= 2.0;
    const double tvd_gate = 5.0 * std::sqrt(static_cast<double>(cfg.params.n_chips) / n);

    const double rate_gap = res.empirical_rate - analytic.per_user_rate;
    const double rate_z =
        res.empirical_rate_stderr > 0.0 ? rate_gap / res.empirical_rate_stderr : 0.0;
    const double rate_bias =
        analytic.per_user_rate > 0.0 ? rate_gap / analytic.per_user_rate : 0.0;
    const double coll_gap = res.collision_freq - analytic_p;
    const double coll_z = res.collision_freq_stderr > 0.0
                              ? coll_gap / res.collision_freq_stderr
                              : 0.0;

    if (format == "csv") {
        out << "m,count,frequency,model_weight\n";
        for (size_t m = 0; m < res.interferer_histogram.size(); ++m)
            out << m << ',' << res.interferer_histogram[m] << ','
                << detail::format_number(static_cast<double>(
                                             res.interferer_histogram[m]) / n)
                << ',' << detail::format_number(model_pmf[m]) << '\n';
        return;
    }

    const char* mode_name = kind == McRunKind::sensing
                                ? "sequential-sensing"
                                : (cfg.mode == McMode::bernoulli_model
                                       ? "bernoulli-model"
                                       : "code-level");
    out << "mode: " << mode_name << "\n"
        << "scheme: " << scheme_label(cfg.scheme) << "\n"
        << "n_active: " << cfg.n_active << "\n"
        << "trials: " << res.trials << "\n"
        << "seed: " << cfg.seed << "\n"
        << "analytical_rate_bps: " << detail::format_number(analytic.per_user_rate)
        << "\n"
        << "empirical_rate_bps: " << detail::format_number(res.empirical_rate) << "\n"
        << "empirical_rate_stderr: "
        << detail::format_number(res.empirical_rate_stderr) << "\n"
        << "rate_z_score: " << detail::format_number(rate_z) << "\n"
        << "analytical_collision_p: " << detail::format_number(analytic_p) << "\n"
        << "collision_freq: " << detail::format_number(res.collision_freq) << "\n"
        << "collision_freq_stderr: "
        << detail::format_number(res.collision_freq_stderr) << "\n"
        << "collision_z_score: " << detail::format_number(coll_z) << "\n"
        << "tvd: " << detail::format_number(tvd) << "\n"
        << "tvd_gate: " << detail::format_number(tvd_gate) << "\n";
    if (std::abs(rate_z) > 3.0 && std::abs(rate_bias) > 0.05)
        out << "model_gap_finding: empirical rate deviates "
            << detail::format_number(rate_bias * 100.0)
            << "% from the binomial-model prediction ("
            << detail::format_number(rate_z)
            << " sigma); the analytical interference model misses "
               "sequential-occupancy correlations\n";
    for (size_t m = 0; m < res.interferer_histogram.size(); ++m)
        out << "hist_" << m << ": " << res.interferer_histogram[m] << "\n";
}

} // namespace qkdstar
