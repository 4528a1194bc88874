#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "qkdstar/errors.hpp"

namespace qkdstar {

// ============================================================================
// Physical network parameters and background-yield models for a star-coupler
// QKD network. Units are fixed network-wide: time in ns, count rates in
// counts/ns, bandwidth in GHz, key rates in bits/s (factor 1e9 from bits/ns).
// ============================================================================

/// Full physical description of one star network.
struct SystemParams {
    double mu = 0.48;            ///< mean signal photon number
    double gamma_dc = 1e-7;      ///< dark count rate, counts/ns
    double gamma_xtalk = 8e-8;   ///< classical crosstalk rate, counts/ns/GHz
    double b_opt = 1.0;          ///< receiver optical bandwidth, GHz
    double eta_d = 0.3;          ///< detector quantum efficiency in [0,1]
    double path_loss_db = 6.0;   ///< coupling + path loss, dB (splitting excluded)
    int n_star = 16;             ///< star coupler size N (max users)
    int n_chips = 16;            ///< chips per frame N_c (code length)
    double tau_p = 1.0;          ///< pulse width, ns
    double tau_d = 1.0;          ///< detector gate width, ns
    double tau_c = 1.0;          ///< chip period, ns
    double frame_t = 16.0;       ///< frame period T, ns
    double dead_time = 0.0;      ///< detector dead time, ns
    double f_ec = 1.22;          ///< error-correction inefficiency
    double e_d = 0.033;          ///< misalignment error probability
    double e0 = 0.5;             ///< background error probability
};

/// WDM overlay: W wavelength channels with inter-channel crosstalk alpha_xt.
struct WdmParams {
    int n_channels = 1;     ///< wavelength count W, >= 1
    double alpha_xt = 0.0;  ///< inter-channel crosstalk power ratio in [0,1]
};

/// The nominal desk-scale parameter set used throughout the numerical
/// studies (16-user star, 1 ns chips, 16-chip frames).
[[nodiscard]] inline SystemParams nominal_params() { return SystemParams{}; }

/// All invariant violations of p, as human-readable messages naming the
/// offending fields; empty means valid.
[[nodiscard]] inline std::vector<std::string> params_violations(const SystemParams& p) {
    std::vector<std::string> v;
    auto num = [](double x) {
        std::string s = std::to_string(x);
        return s;
    };
    if (!(p.mu > 0.0)) v.push_back("mu must be > 0");
    if (p.gamma_dc < 0.0) v.push_back("gamma_dc must be >= 0");
    if (p.gamma_xtalk < 0.0) v.push_back("gamma_xtalk must be >= 0");
    if (!(p.b_opt > 0.0)) v.push_back("b_opt must be > 0");
    if (!(p.eta_d >= 0.0 && p.eta_d <= 1.0)) v.push_back("eta_d must lie in [0,1]");
    if (p.path_loss_db < 0.0) v.push_back("path_loss_db must be >= 0");
    if (p.n_star < 2) v.push_back("n_star must be >= 2");
    if (p.n_chips < 1) v.push_back("n_chips must be >= 1");
    if (!(p.tau_p > 0.0)) v.push_back("tau_p must be > 0");
    if (!(p.tau_d > 0.0)) v.push_back("tau_d must be > 0");
    if (!(p.tau_c > 0.0)) v.push_back("tau_c must be > 0");
    if (p.tau_p > p.tau_c)
        v.push_back("tau_p (" + num(p.tau_p) + ") must be <= tau_c (" + num(p.tau_c) + ")");
    if (p.tau_d > p.tau_c)
        v.push_back("tau_d (" + num(p.tau_d) + ") must be <= tau_c (" + num(p.tau_c) + ")");
    if (p.frame_t + 1e-9 < p.n_chips * p.tau_c)
        v.push_back("frame_t (" + num(p.frame_t) + ") must be >= n_chips*tau_c (" +
                    num(p.n_chips * p.tau_c) + ")");
    if (p.frame_t < p.dead_time)
        v.push_back("frame_t (" + num(p.frame_t) + ") must be >= dead_time (" +
                    num(p.dead_time) + ")");
    if (p.dead_time < 0.0) v.push_back("dead_time must be >= 0");
    if (!(p.f_ec >= 1.0)) v.push_back("f_ec must be >= 1");
    if (!(p.e_d >= 0.0 && p.e_d <= 0.5)) v.push_back("e_d must lie in [0,0.5]");
    if (!(p.e0 >= 0.0 && p.e0 <= 1.0)) v.push_back("e0 must lie in [0,1]");
    return v;
}

inline std::string join_violations(const std::vector<std::string>& v) {
    std::string all;
    for (const auto& s : v) {
        if (!all.empty()) all += "; ";
        all += s;
    }
    return all;
}

/// Throws model_error naming every violated field constraint.
inline void ensure_valid_params(const SystemParams& p) {
    const auto v = params_violations(p);
    if (!v.empty()) throw model_error("invalid system parameters: " + join_violations(v));
}

/// Per-link transmissivity: detector efficiency, dB path loss, and the 1/N
/// star-coupler splitting loss.
[[nodiscard]] inline double link_transmissivity(const SystemParams& p) {
    return p.eta_d * std::pow(10.0, -p.path_loss_db / 10.0) / p.n_star;
}

inline double checked_yield(double y, const char* what) {
    if (y > 1.0)
        throw model_error(std::string(what) + " = " + std::to_string(y) +
                          " exceeds 1; yields are probabilities");
    return y;
}

/// Interference-free background yield per gated pulse: dark counts plus
/// filtered classical-channel crosstalk over one detector gate.
[[nodiscard]] inline double y_tdma(const SystemParams& p) {
    return checked_yield((p.gamma_dc + p.eta_d * p.gamma_xtalk * p.b_opt) * p.tau_d,
                         "y_tdma");
}

/// Background yield seen through m chip-synchronous interferers whose w-chip
/// codes spread mu photons over w pulses.
[[nodiscard]] inline double y_cdma(const SystemParams& p, double eta, long m, int w) {
    if (m < 0) throw model_error("y_cdma: interferer count m must be >= 0");
    if (w < 1) throw model_error("y_cdma: code weight w must be >= 1");
    return checked_yield(y_tdma(p) + static_cast<double>(m) * eta * p.mu / w, "y_cdma");
}

/// Background yield with W-1 co-propagating wavelength channels leaking a
/// fraction alpha_xt of their signal power each.
[[nodiscard]] inline double y_wdm(const SystemParams& p, double eta, const WdmParams& wdm) {
    if (wdm.n_channels < 1) throw model_error("y_wdm: n_channels must be >= 1");
    if (!(wdm.alpha_xt >= 0.0 && wdm.alpha_xt <= 1.0))
        throw model_error("y_wdm: alpha_xt must lie in [0,1]");
    return checked_yield(
        y_tdma(p) + (wdm.n_channels - 1) * eta * p.mu * wdm.alpha_xt, "y_wdm");
}

/// Timing derived from the detector-limited prescription tau_p = tau_c =
/// tau_d, b_opt = 1/tau_p, frame long enough for both the dead time and one
/// chip per potential user.
struct TimingPrescription {
    double tau_p;
    double tau_c;
    double tau_d;
    double b_opt;    ///< GHz
    double frame_t;  ///< ns
    int n_chips;
};

[[nodiscard]] inline TimingPrescription prescribe_timing(double tau_detector,
                                                         double dead_time,
                                                         int n_star) {
    if (!(tau_detector > 0.0))
        throw model_error("prescribe_timing: tau_detector must be > 0");
    if (dead_time < 0.0)
        throw model_error("prescribe_timing: dead_time must be >= 0");
    if (n_star < 1) throw model_error("prescribe_timing: n_star must be >= 1");
    TimingPrescription t{};
    t.tau_p = t.tau_c = t.tau_d = tau_detector;
    t.b_opt = 1.0 / tau_detector;
    t.frame_t = std::max(dead_time, n_star * tau_detector);
    t.n_chips = static_cast<int>(std::ceil(t.frame_t / t.tau_c - 1e-9));
    return t;
}

} // namespace qkdstar
