#pragma once

#include <cmath>
#include <string>

#include "qkdstar/errors.hpp"

namespace qkdstar {

// ============================================================================
// Decoy-state BB84 secret-key lower bound, as pure functions of link-level
// quantities. All probabilities are per gated pulse slot.
// ============================================================================

/// Inputs of the per-pulse key bound.
struct DecoyInputs {
    double mu;          ///< mean photon number per signal pulse, > 0
    double eta;         ///< total link transmissivity in [0,1]
    double y0;          ///< vacuum (background) yield in [0,1]
    double e_d;         ///< misalignment error probability in [0, 0.5]
    double e0 = 0.5;    ///< background error probability in [0,1]
    double f_ec = 1.0;  ///< error-correction inefficiency, >= 1
};

/// Per-pulse quantities derived from DecoyInputs.
struct DecoyBreakdown {
    double q_mu;  ///< overall gain
    double e_mu;  ///< overall QBER
    double q1;    ///< single-photon gain
    double e1;    ///< single-photon error rate
    double y1;    ///< single-photon yield
    double p_y0;  ///< key bits per pulse, unclamped (negative = no key)
};

/// Shannon binary entropy in bits; exactly 0 at p in {0,1}.
[[nodiscard]] inline double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw model_error("binary_entropy: p = " + std::to_string(p) +
                          " outside [0,1]");
    if (p == 0.0 || p == 1.0) return 0.0;
    // evaluate on min(p, 1-p) so H(p) == H(1-p) bit-for-bit whenever both
    // arguments are exactly representable
    const double q = p < 0.5 ? p : 1.0 - p;
    return -q * std::log2(q) - (1.0 - q) * std::log2(1.0 - q);
}

inline void validate_decoy_inputs(const DecoyInputs& in) {
    std::string bad;
    auto flag = [&bad](const std::string& msg) {
        if (!bad.empty()) bad += "; ";
        bad += msg;
    };
    if (!(in.mu > 0.0)) flag("mu must be > 0 (got " + std::to_string(in.mu) + ")");
    if (!(in.eta >= 0.0 && in.eta <= 1.0)) flag("eta outside [0,1]");
    if (!(in.y0 >= 0.0 && in.y0 <= 1.0)) flag("y0 outside [0,1]");
    if (!(in.e_d >= 0.0 && in.e_d <= 0.5)) flag("e_d outside [0,0.5]");
    if (!(in.e0 >= 0.0 && in.e0 <= 1.0)) flag("e0 outside [0,1]");
    if (!(in.f_ec >= 1.0)) flag("f_ec must be >= 1");
    if (!bad.empty()) throw model_error("invalid decoy inputs: " + bad);
}

/// Gains, error rates and the unclamped per-pulse key bound.
///
/// q_mu = 1 - (1-y0) e^{-eta mu}
/// e_mu = (e0 y0 + e_d (1 - e^{-eta mu})) / q_mu
/// y1   = y0 + eta (1-y0)
/// q1   = y1 mu e^{-mu}
/// e1   = (y0/2 + e_d eta) / y1
[[nodiscard]] inline DecoyBreakdown decoy_breakdown(const DecoyInputs& in) {
    validate_decoy_inputs(in);
    const double absorbed = -std::expm1(-in.eta * in.mu);  // 1 - e^{-eta mu}
    DecoyBreakdown b{};
    b.q_mu = in.y0 + (1.0 - in.y0) * absorbed;
    if (b.q_mu <= 0.0)
        throw model_error("degenerate link: overall gain q_mu = 0 "
                          "(y0 = 0 and eta*mu = 0)");
    b.e_mu = (in.e0 * in.y0 + in.e_d * absorbed) / b.q_mu;
    if (b.e_mu > 1.0)
        throw model_error("decoy_breakdown: e_mu > 1 (background error mass "
                          "exceeds the gain; unphysical parameter corner)");
    b.y1 = in.y0 + in.eta * (1.0 - in.y0);
    if (b.y1 <= 0.0)
        throw model_error("degenerate link: single-photon yield y1 = 0");
    b.q1 = b.y1 * in.mu * std::exp(-in.mu);
    b.e1 = (in.y0 / 2.0 + in.e_d * in.eta) / b.y1;
    b.p_y0 = 0.5 * (-in.f_ec * b.q_mu * binary_entropy(b.e_mu) +
                    b.q1 * (1.0 - binary_entropy(b.e1)));
    return b;
}

/// Unclamped secret-key bits per pulse slot; callers clamp at zero when
/// turning this into a rate.
[[nodiscard]] inline double key_bits_per_pulse(const DecoyInputs& in) {
    return decoy_breakdown(in).p_y0;
}

/// Argmax of key_bits_per_pulse over mu in [lo, hi] by deterministic dense
/// grid search plus two local refinement passes (resolution << 0.005).
[[nodiscard]] inline double optimize_mu(DecoyInputs in, double lo, double hi) {
    if (!(lo > 0.0 && hi > lo && hi <= 2.0))
        throw model_error("optimize_mu: search range must satisfy 0 < lo < hi <= 2");
    auto value = [&in](double mu) {
        in.mu = mu;
        return key_bits_per_pulse(in);
    };
    double best_mu = lo, best_v = value(lo);
    auto scan = [&](double a, double b, int steps) {
        for (int i = 0; i <= steps; ++i) {
            const double mu = a + (b - a) * i / steps;
            if (mu <= 0.0 || mu > 2.0) continue;
            const double v = value(mu);
            if (v > best_v) {
                best_v = v;
                best_mu = mu;
            }
        }
    };
    scan(lo, hi, 800);
    double span = (hi - lo) / 800.0;
    for (int pass = 0; pass < 2; ++pass) {
        scan(std::max(lo, best_mu - span), std::min(hi, best_mu + span), 200);
        span /= 100.0;
    }
    return best_mu;
}

} // namespace qkdstar
