#pragma once

#include <cmath>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

#include "qkdstar/errors.hpp"
#include "qkdstar/mac_rates.hpp"
#include "qkdstar/network_model.hpp"
#include "qkdstar/ooc_codes.hpp"
#include "qkdstar/rng.hpp"

namespace qkdstar {

// ============================================================================
// Monte Carlo cross-check of the analytical interference models. Simulates
// chip-synchronous frames, counts interferers landing on a tagged pair, and
// turns the empirical interferer distribution into an empirical key rate for
// comparison against the binomial-averaged formulas.
// ============================================================================

enum class McMode { bernoulli_model, code_level };

struct McConfig {
    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;
    McMode mode = McMode::bernoulli_model;
    SchemeSpec scheme;
    SystemParams params;
    int n_active = 16;
    int threads = 1;
};

struct McResult {
    std::vector<std::uint64_t> interferer_histogram;  ///< index m, sums to trials
    std::uint64_t trials = 0;
    double empirical_rate = 0.0;         ///< bits/s
    double empirical_rate_stderr = 0.0;
    double collision_freq = 0.0;         ///< per-interferer collision frequency
    double collision_freq_stderr = 0.0;
};

namespace detail {

inline void validate_mc(const McConfig& cfg) {
    if (cfg.trials < 1) throw model_error("mc: trials must be >= 1");
    if (cfg.threads < 1) throw model_error("mc: threads must be >= 1");
    ensure_valid_params(cfg.params);
    check_n_active(cfg.params, cfg.n_active);
}

/// Base background yield honoring an optional WDM overlay.
[[nodiscard]] inline double mc_base_yield(const McConfig& cfg, double eta) {
    if (cfg.scheme.wdm.has_value()) return y_wdm(cfg.params, eta, *cfg.scheme.wdm);
    return y_tdma(cfg.params);
}

/// Conditional per-user rates r[m] for m = 0 .. n_active-1 at the scheme's
/// base yield and code weight.
[[nodiscard]] inline std::vector<double> conditional_rates(const McConfig& cfg,
                                                           double eta, double base,
                                                           int w) {
    std::vector<double> r(static_cast<size_t>(cfg.n_active));
    for (int m = 0; m < cfg.n_active; ++m) {
        const double yield = checked_yield(base + static_cast<double>(m) * eta *
                                                      cfg.params.mu / w,
                                           "interference yield");
        r[static_cast<size_t>(m)] = rate_bps_from_yield(cfg.params, eta, yield);
    }
    return r;
}

/// Histogram -> McResult statistics. Trials are iid, so the rate stderr comes
/// from the per-trial variance of the conditional rate.
[[nodiscard]] inline McResult finalize(const McConfig& cfg,
                                       std::vector<std::uint64_t> hist,
                                       const std::vector<double>& rates) {
    McResult res;
    res.trials = cfg.trials;
    const double n = static_cast<double>(cfg.trials);
    double mean = 0.0, mean_sq = 0.0, collisions = 0.0;
    for (size_t m = 0; m < hist.size(); ++m) {
        const double f = static_cast<double>(hist[m]) / n;
        mean += f * rates[m];
        mean_sq += f * rates[m] * rates[m];
        collisions += static_cast<double>(m) * static_cast<double>(hist[m]);
    }
    res.empirical_rate = mean;
    const double var = std::max(mean_sq - mean * mean, 0.0);
    res.empirical_rate_stderr = std::sqrt(var / n);
    if (cfg.n_active > 1) {
        const double n_obs = n * (cfg.n_active - 1);
        res.collision_freq = collisions / n_obs;
        res.collision_freq_stderr =
            std::sqrt(std::max(res.collision_freq * (1.0 - res.collision_freq), 0.0) /
                      n_obs);
    }
    res.interferer_histogram = std::move(hist);
    return res;
}

/// Runs `simulate(rng, trial) -> m` over all trials with per-trial substreams,
/// partitioned across cfg.threads; the histogram is identical for any
/// partitioning.
template <typename TrialFn>
[[nodiscard]] inline std::vector<std::uint64_t> run_trials(const McConfig& cfg,
                                                           TrialFn&& trial_m) {
    const size_t bins = static_cast<size_t>(cfg.n_active);
    const int threads = cfg.threads;
    std::vector<std::vector<std::uint64_t>> partial(
        static_cast<size_t>(threads), std::vector<std::uint64_t>(bins, 0));
    std::vector<std::exception_ptr> failures(static_cast<size_t>(threads));
    auto worker = [&](int t) {
        try {
            auto& hist = partial[static_cast<size_t>(t)];
            for (std::uint64_t i = static_cast<std::uint64_t>(t); i < cfg.trials;
                 i += static_cast<std::uint64_t>(threads)) {
                SplitRng rng(substream_seed(cfg.seed, i));
                const int m = trial_m(rng);
                if (m < 0 || static_cast<size_t>(m) >= bins)
                    throw internal_error("mc: interferer count out of range");
                ++hist[static_cast<size_t>(m)];
            }
        } catch (...) {
            failures[static_cast<size_t>(t)] = std::current_exception();
        }
    };
    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }
    for (const auto& failure : failures)
        if (failure) std::rethrow_exception(failure);
    std::vector<std::uint64_t> hist(bins, 0);
    for (const auto& part : partial)
        for (size_t m = 0; m < bins; ++m) hist[m] += part[m];
    return hist;
}

} // namespace detail

/// Interferer-count simulation per frame.
///
/// bernoulli_model: each of the n_active-1 interferers collides independently
/// with the scheme's analytical collision probability (w^2/N_c for CDMA, the
/// sensing-thinned p' for LBS).
///
/// code_level: interferers hold distinct codes from a generated family at
/// uniform random cyclic shifts; a collision is any pulse overlap with the
/// tagged pair's code. CDMA only.
[[nodiscard]] inline McResult simulate_interferers(const McConfig& cfg) {
    detail::validate_mc(cfg);
    const double eta = link_transmissivity(cfg.params);
    const double base = detail::mc_base_yield(cfg, eta);
    const int w = cfg.scheme.kind == SchemeKind::cdma ? cfg.scheme.weight : 1;
    const auto rates = detail::conditional_rates(cfg, eta, base, w);
    const int n_int = cfg.n_active - 1;

    if (cfg.mode == McMode::bernoulli_model) {
        double p = 0.0;
        switch (cfg.scheme.kind) {
            case SchemeKind::tdma:
                p = 0.0;
                break;
            case SchemeKind::cdma:
                p = collision_probability(cfg.params.n_chips, w);
                break;
            case SchemeKind::lbs: {
                const double w1_yield =
                    checked_yield(base + eta * cfg.params.mu, "y_cdma");
                p = lbs_collision_probability(cfg.params, cfg.scheme.listen_periods,
                                              w1_yield);
                break;
            }
        }
        auto hist = detail::run_trials(cfg, [&](SplitRng& rng) {
            int m = 0;
            for (int j = 0; j < n_int; ++j) m += rng.bernoulli(p) ? 1 : 0;
            return m;
        });
        return detail::finalize(cfg, std::move(hist), rates);
    }

    // code level
    if (cfg.scheme.kind != SchemeKind::cdma)
        throw model_error("mc: code-level mode is defined for CDMA schemes only");
    const OocFamily fam = generate_family(cfg.params.n_chips, w, cfg.n_active);
    const int n_chips = cfg.params.n_chips;
    // hit_shift[j][s]: does interferer j's code at cyclic shift s overlap the
    // tagged code (family code 0 at shift 0)?
    std::vector<char> tagged(static_cast<size_t>(n_chips), 0);
    for (int pos : fam.codes[0].positions) tagged[static_cast<size_t>(pos)] = 1;
    std::vector<std::vector<char>> hit_shift(static_cast<size_t>(n_int));
    for (int j = 0; j < n_int; ++j) {
        auto& hits = hit_shift[static_cast<size_t>(j)];
        hits.assign(static_cast<size_t>(n_chips), 0);
        for (int s = 0; s < n_chips; ++s)
            for (int pos : fam.codes[static_cast<size_t>(j + 1)].positions)
                if (tagged[static_cast<size_t>((pos + s) % n_chips)]) {
                    hits[static_cast<size_t>(s)] = 1;
                    break;
                }
    }
    auto hist = detail::run_trials(cfg, [&](SplitRng& rng) {
        int m = 0;
        for (int j = 0; j < n_int; ++j) {
            const std::uint32_t s = rng.uniform_int(static_cast<std::uint32_t>(n_chips));
            m += hit_shift[static_cast<size_t>(j)][s];
        }
        return m;
    });
    return detail::finalize(cfg, std::move(hist), rates);
}

/// Sequential listen-before-send simulation. Pairs activate one at a time in
/// index order; each draws a uniform chip, listens for k frames, and redraws
/// whenever it detects an occupant. Accepted choices are frozen. The reported
/// interferer count is that of one uniformly chosen pair per trial (the
/// analytical model describes the average pair).
///
/// A pair's k-period sensing of a chip with a static occupant count succeeds
/// (stays silent) with probability (1-d)^k, d = 1 - (1-y1)^occupants; that
/// aggregate is drawn as a single Bernoulli, which is distributionally exact
/// because occupancy cannot change while one pair listens.
[[nodiscard]] inline McResult simulate_lbs_sensing(const McConfig& cfg, long k) {
    detail::validate_mc(cfg);
    if (cfg.scheme.kind != SchemeKind::lbs)
        throw model_error("simulate_lbs_sensing: scheme must be LBS");
    if (k < 0) throw model_error("simulate_lbs_sensing: k must be >= 0");
    const double eta = link_transmissivity(cfg.params);
    const double base = detail::mc_base_yield(cfg, eta);
    const auto rates = detail::conditional_rates(cfg, eta, base, 1);
    const double y1 = checked_yield(base + eta * cfg.params.mu, "y_cdma");
    const int n_chips = cfg.params.n_chips;
    const int n_active = cfg.n_active;

    // survive[occ]: probability that k periods of listening to a chip with
    // occ occupants trigger no detection
    std::vector<double> survive(static_cast<size_t>(n_active), 1.0);
    for (int occ = 1; occ < n_active; ++occ) {
        const double detect = 1.0 - std::pow(1.0 - y1, static_cast<double>(occ));
        survive[static_cast<size_t>(occ)] =
            std::pow(1.0 - detect, static_cast<double>(k));
    }

    auto hist = detail::run_trials(cfg, [&](SplitRng& rng) {
        std::vector<int> occupancy(static_cast<size_t>(n_chips), 0);
        std::vector<int> chip_of(static_cast<size_t>(n_active), -1);
        for (int pair = 0; pair < n_active; ++pair) {
            for (long attempt = 0;; ++attempt) {
                if (attempt >= 1000000)
                    throw internal_error("lbs sensing: no admissible chip found "
                                         "after 1e6 redraws");
                const std::uint32_t c =
                    rng.uniform_int(static_cast<std::uint32_t>(n_chips));
                if (rng.bernoulli(survive[static_cast<size_t>(occupancy[c])])) {
                    chip_of[static_cast<size_t>(pair)] = static_cast<int>(c);
                    ++occupancy[c];
                    break;
                }
            }
        }
        const std::uint32_t tagged =
            rng.uniform_int(static_cast<std::uint32_t>(n_active));
        return occupancy[static_cast<size_t>(chip_of[tagged])] - 1;
    });
    return detail::finalize(cfg, std::move(hist), rates);
}

} // namespace qkdstar
