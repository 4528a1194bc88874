// Prints the headline per-user key rates of every multiple-access scheme at
// the nominal 16-user operating point, then scans the WDM overlay capacity.

#include <cstdio>

#include "qkdstar/mac_rates.hpp"
#include "qkdstar/network_model.hpp"

int main() {
    using namespace qkdstar;
    const SystemParams p = nominal_params();
    const int n = p.n_star;

    std::printf("%-12s %14s %14s\n", "scheme", "per-user b/s", "network b/s");
    const RateReport tdma = rate_tdma(p, n);
    std::printf("%-12s %14.1f %14.1f\n", "tdma", tdma.per_user_rate, tdma.total_rate);
    for (int w : {1, 2, 3}) {
        const RateReport r = rate_cdma(p, n, w, true, true);
        std::printf("cdma w=%-5d %14.1f %14.1f\n", w, r.per_user_rate, r.total_rate);
    }
    for (long k : {0L, 100L, 500L, 1000L}) {
        const RateReport r = rate_lbs(p, n, k);
        std::printf("lbs k=%-6ld %14.1f %14.1f\n", k, r.per_user_rate, r.total_rate);
    }

    std::printf("\nWDM-TDMA overlay capacity:\n");
    const SchemeSpec inner{SchemeKind::tdma, 1, 0, {}};
    for (double iso_db : {30.0, 20.0}) {
        const double alpha = std::pow(10.0, -iso_db / 10.0);
        const int w = max_wdm_channels(p, alpha, inner, 256);
        std::printf("  %2.0f dB isolation: %3d channels, %4d users\n", iso_db, w,
                    w * p.n_star);
    }
    return 0;
}
