#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "qkdstar/decoy_rate.hpp"
#include "qkdstar/errors.hpp"
#include "qkdstar/network_model.hpp"
#include "qkdstar/ooc_codes.hpp"

namespace qkdstar {

// ============================================================================
// Effective secret-key rates per user pair under the multiple-access schemes:
// TDMA (dedicated chip), CDMA (code spreading, interference averaged over the
// binomial interferer count), LBS (listen-before-send chip selection), and
// WDM overlays of any of the three.
// ============================================================================

enum class SchemeKind { tdma, cdma, lbs };

/// One multiple-access configuration; wdm optionally wraps the scheme into a
/// multi-wavelength overlay.
struct SchemeSpec {
    SchemeKind kind = SchemeKind::tdma;
    int weight = 1;            ///< CDMA code weight w
    long listen_periods = 0;   ///< LBS listening frame count k
    std::optional<WdmParams> wdm;
};

/// One summand of an interference-averaged rate.
struct RateTerm {
    long m;           ///< interferer count
    double weight;    ///< binomial probability of m
    double rate_bps;  ///< conditional rate given m, bits/s
};

/// Rate summary for one scheme at one operating point.
struct RateReport {
    double per_user_rate = 0.0;    ///< bits/s, clamped at 0
    double total_rate = 0.0;       ///< n_active * per_user_rate, bits/s
    double y0_used = 0.0;          ///< background yield entering the m=0 term
    double bits_per_frame = 0.0;   ///< per_user_rate expressed per frame
    double closed_form_rate = 0.0; ///< (1-p)^(n_active-1) approximation, bits/s
    DecoyBreakdown breakdown{};    ///< decoy quantities of the m=0 term
    std::vector<RateTerm> terms;   ///< all averaged summands (single entry for TDMA)
};

/// Binomial pmf C(n,m) p^m (1-p)^(n-m), evaluated in log space.
[[nodiscard]] inline double binomial_weight(long m, long n, double p) {
    if (m < 0 || n < 0 || m > n)
        throw model_error("binomial_weight: need 0 <= m <= n (got m = " +
                          std::to_string(m) + ", n = " + std::to_string(n) + ")");
    if (!(p >= 0.0 && p <= 1.0))
        throw model_error("binomial_weight: p outside [0,1]");
    if (p == 0.0) return m == 0 ? 1.0 : 0.0;
    if (p == 1.0) return m == n ? 1.0 : 0.0;
    const double md = static_cast<double>(m), nd = static_cast<double>(n);
    const double log_pmf = std::lgamma(nd + 1.0) - std::lgamma(md + 1.0) -
                           std::lgamma(nd - md + 1.0) + md * std::log(p) +
                           (nd - md) * std::log1p(-p);
    return std::exp(log_pmf);
}

namespace detail {

[[nodiscard]] inline DecoyInputs decoy_inputs_at(const SystemParams& p, double eta,
                                                 double yield) {
    return DecoyInputs{p.mu, eta, yield, p.e_d, p.e0, p.f_ec};
}

/// max(P/T, 0) in bits/s (frame_t is in ns).
[[nodiscard]] inline double rate_bps_from_yield(const SystemParams& p, double eta,
                                                double yield) {
    const double per_frame = key_bits_per_pulse(decoy_inputs_at(p, eta, yield));
    return std::max(per_frame / p.frame_t, 0.0) * 1e9;
}

inline void check_n_active(const SystemParams& p, int n_active) {
    if (n_active < 1 || n_active > p.n_star)
        throw model_error("n_active = " + std::to_string(n_active) +
                          " outside [1, n_star = " + std::to_string(p.n_star) + "]");
}

/// Interference-free scheme: a single m = 0 term.
[[nodiscard]] inline RateReport single_report(const SystemParams& p, int n_active,
                                              double base_yield) {
    const double eta = link_transmissivity(p);
    RateReport r;
    r.y0_used = base_yield;
    r.breakdown = decoy_breakdown(decoy_inputs_at(p, eta, base_yield));
    r.per_user_rate = std::max(r.breakdown.p_y0 / p.frame_t, 0.0) * 1e9;
    r.closed_form_rate = r.per_user_rate;
    r.total_rate = n_active * r.per_user_rate;
    r.bits_per_frame = r.per_user_rate * p.frame_t * 1e-9;
    r.terms.push_back(RateTerm{0, 1.0, r.per_user_rate});
    return r;
}

/// Interference-averaged scheme: binomial mixture over the interferer count
/// m in [0, n_active-1] with per-collision probability collision_p, on top of
/// base_yield; w spreads each interferer's photons over its code pulses.
[[nodiscard]] inline RateReport averaged_report(const SystemParams& p, int n_active,
                                                double base_yield, int w,
                                                double collision_p, bool exact) {
    const double eta = link_transmissivity(p);
    RateReport r;
    r.y0_used = base_yield;
    r.breakdown = decoy_breakdown(decoy_inputs_at(p, eta, base_yield));
    const long n_int = n_active - 1;
    double sum = 0.0;
    for (long m = 0; m <= n_int; ++m) {
        const double yield =
            checked_yield(base_yield + static_cast<double>(m) * eta * p.mu / w,
                          "interference yield");
        const RateTerm term{m, binomial_weight(m, n_int, collision_p),
                            rate_bps_from_yield(p, eta, yield)};
        sum += term.weight * term.rate_bps;
        r.terms.push_back(term);
    }
    r.closed_form_rate =
        std::pow(1.0 - collision_p, static_cast<double>(n_int)) * r.terms[0].rate_bps;
    r.per_user_rate = exact ? sum : r.closed_form_rate;
    r.total_rate = n_active * r.per_user_rate;
    r.bits_per_frame = r.per_user_rate * p.frame_t * 1e-9;
    return r;
}

inline void check_code_capacity(const SystemParams& p, int n_active, int w,
                                bool ignore_capacity) {
    if (ignore_capacity) return;
    const long long cap = family_capacity(p.n_chips, w);
    if (n_active > cap)
        throw capacity_error("CDMA with weight " + std::to_string(w) + " over " +
                             std::to_string(p.n_chips) + " chips supports at most " +
                             std::to_string(cap) + " code users; requested " +
                             std::to_string(n_active) +
                             " (pass ignore-capacity to model it anyway)");
}

} // namespace detail

/// Dedicated-chip (TDMA) rate: every pair keys at the interference-free
/// background yield.
[[nodiscard]] inline RateReport rate_tdma(const SystemParams& p, int n_active) {
    ensure_valid_params(p);
    detail::check_n_active(p, n_active);
    return detail::single_report(p, n_active, y_tdma(p));
}

/// CDMA rate conditioned on exactly m interfering pairs.
[[nodiscard]] inline double rate_cdma_conditional(const SystemParams& p, long m, int w) {
    ensure_valid_params(p);
    const double eta = link_transmissivity(p);
    return detail::rate_bps_from_yield(p, eta, y_cdma(p, eta, m, w));
}

/// Code-spreading (CDMA) rate averaged over the binomial interferer count.
/// exact=false selects the (1-p)^(n_active-1) closed form instead of the sum;
/// both are stored in the report either way.
[[nodiscard]] inline RateReport rate_cdma(const SystemParams& p, int n_active, int w,
                                          bool exact = true,
                                          bool ignore_capacity = false) {
    ensure_valid_params(p);
    detail::check_n_active(p, n_active);
    detail::check_code_capacity(p, n_active, w, ignore_capacity);
    const double pc = collision_probability(p.n_chips, w);
    return detail::averaged_report(p, n_active, y_tdma(p), w, pc, exact);
}

/// Residual collision probability after k listening periods: the interferer
/// must share the chip (1/N_c) and stay undetected through every period.
[[nodiscard]] inline double lbs_collision_probability(const SystemParams& p, long k,
                                                      double w1_yield) {
    if (k < 0) throw model_error("lbs_collision_probability: k must be >= 0");
    if (!(w1_yield >= 0.0 && w1_yield <= 1.0))
        throw model_error("lbs_collision_probability: yield outside [0,1]");
    return std::pow(1.0 - w1_yield, static_cast<double>(k)) / p.n_chips;
}

/// Listen-before-send rate: CDMA w = 1 with the sensing-thinned collision
/// probability.
[[nodiscard]] inline RateReport rate_lbs(const SystemParams& p, int n_active, long k) {
    ensure_valid_params(p);
    detail::check_n_active(p, n_active);
    const double eta = link_transmissivity(p);
    const double pp = lbs_collision_probability(p, k, y_cdma(p, eta, 1, 1));
    return detail::averaged_report(p, n_active, y_tdma(p), 1, pp, true);
}

/// Any of the three schemes inside a W-channel WDM overlay: identical
/// computation with the background yield replaced by the crosstalk-loaded
/// one, everywhere (conditional yields and the LBS sensing probability too).
[[nodiscard]] inline RateReport rate_wdm(const SystemParams& p, const WdmParams& wdm,
                                         const SchemeSpec& inner, int n_active,
                                         bool exact = true,
                                         bool ignore_capacity = false) {
    ensure_valid_params(p);
    detail::check_n_active(p, n_active);
    if (inner.wdm.has_value())
        throw model_error("rate_wdm: inner scheme cannot carry its own wdm overlay");
    const double eta = link_transmissivity(p);
    const double base = y_wdm(p, eta, wdm);
    switch (inner.kind) {
        case SchemeKind::tdma:
            return detail::single_report(p, n_active, base);
        case SchemeKind::cdma: {
            detail::check_code_capacity(p, n_active, inner.weight, ignore_capacity);
            const double pc = collision_probability(p.n_chips, inner.weight);
            return detail::averaged_report(p, n_active, base, inner.weight, pc, exact);
        }
        case SchemeKind::lbs: {
            const double w1_yield =
                checked_yield(base + eta * p.mu, "y_cdma (wdm base)");
            const double pp =
                lbs_collision_probability(p, inner.listen_periods, w1_yield);
            return detail::averaged_report(p, n_active, base, 1, pp, true);
        }
    }
    throw internal_error("rate_wdm: unhandled scheme kind");
}

/// Largest channel count in [1, w_max] whose per-user rate at full capacity
/// (n_active = n_star) stays positive; 0 if none.
[[nodiscard]] inline int max_wdm_channels(const SystemParams& p, double alpha_xt,
                                          const SchemeSpec& inner, int w_max) {
    if (w_max < 1) throw model_error("max_wdm_channels: w_max must be >= 1");
    int best = 0;
    for (int w = 1; w <= w_max; ++w) {
        double rate = 0.0;
        try {
            rate = rate_wdm(p, WdmParams{w, alpha_xt}, inner, p.n_star).per_user_rate;
        } catch (const model_error&) {
            rate = 0.0;  // crosstalk pushed the yield past 1: certainly no key
        }
        if (rate > 0.0) best = w;
    }
    return best;
}

/// Dispatch on a SchemeSpec, honoring an optional wdm wrapper.
[[nodiscard]] inline RateReport rate_for_scheme(const SystemParams& p,
                                                const SchemeSpec& spec, int n_active,
                                                bool exact = true,
                                                bool ignore_capacity = false) {
    if (spec.wdm.has_value()) {
        SchemeSpec inner = spec;
        inner.wdm.reset();
        return rate_wdm(p, *spec.wdm, inner, n_active, exact, ignore_capacity);
    }
    switch (spec.kind) {
        case SchemeKind::tdma:
            return rate_tdma(p, n_active);
        case SchemeKind::cdma:
            return rate_cdma(p, n_active, spec.weight, exact, ignore_capacity);
        case SchemeKind::lbs:
            return rate_lbs(p, n_active, spec.listen_periods);
    }
    throw internal_error("rate_for_scheme: unhandled scheme kind");
}

/// Stable text label for CSV rows ("tdma", "cdma_w2", "lbs_k500",
/// "wdm8_tdma", ...).
[[nodiscard]] inline std::string scheme_label(const SchemeSpec& spec) {
    std::string inner;
    switch (spec.kind) {
        case SchemeKind::tdma: inner = "tdma"; break;
        case SchemeKind::cdma: inner = "cdma_w" + std::to_string(spec.weight); break;
        case SchemeKind::lbs: inner = "lbs_k" + std::to_string(spec.listen_periods); break;
    }
    if (spec.wdm.has_value())
        return "wdm" + std::to_string(spec.wdm->n_channels) + "_" + inner;
    return inner;
}

} // namespace qkdstar
