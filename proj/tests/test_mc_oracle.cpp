#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "qkdstar/mc_oracle.hpp"

using namespace qkdstar;
using Catch::Matchers::WithinAbs;

namespace {

McConfig cdma_cfg(std::uint64_t trials, std::uint64_t seed, int w = 1) {
    McConfig cfg;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.mode = McMode::bernoulli_model;
    cfg.scheme.kind = SchemeKind::cdma;
    cfg.scheme.weight = w;
    return cfg;
}

std::uint64_t hist_total(const McResult& r) {
    return std::accumulate(r.interferer_histogram.begin(),
                           r.interferer_histogram.end(), std::uint64_t{0});
}

double tvd_vs_binomial(const McResult& r, double p) {
    const long n = static_cast<long>(r.interferer_histogram.size()) - 1;
    double tvd = 0.0;
    for (long m = 0; m <= n; ++m) {
        const double f =
            static_cast<double>(r.interferer_histogram[static_cast<size_t>(m)]) /
            static_cast<double>(r.trials);
        tvd += std::abs(f - binomial_weight(m, n, p));
    }
    return 0.5 * tvd;
}

} // namespace

TEST_CASE("identical seed and config reproduce the result bit for bit") {
    const McConfig cfg = cdma_cfg(50000, 99);
    const McResult a = simulate_interferers(cfg);
    const McResult b = simulate_interferers(cfg);
    REQUIRE(a.interferer_histogram == b.interferer_histogram);
    REQUIRE(a.empirical_rate == b.empirical_rate);
    REQUIRE(a.empirical_rate_stderr == b.empirical_rate_stderr);
    REQUIRE(a.collision_freq == b.collision_freq);
}

TEST_CASE("histogram does not depend on the thread partition") {
    McConfig cfg = cdma_cfg(100000, 7);
    const McResult serial = simulate_interferers(cfg);
    cfg.threads = 4;
    const McResult parallel = simulate_interferers(cfg);
    REQUIRE(serial.interferer_histogram == parallel.interferer_histogram);
    REQUIRE(serial.empirical_rate == parallel.empirical_rate);
}

TEST_CASE("histograms always account for every trial") {
    for (std::uint64_t trials : {1ULL, 17ULL, 5000ULL}) {
        const McResult r = simulate_interferers(cdma_cfg(trials, 3));
        REQUIRE(hist_total(r) == trials);
        REQUIRE(r.trials == trials);
    }
}

TEST_CASE("a lone pair never sees interference") {
    McConfig cfg = cdma_cfg(2000, 5);
    cfg.n_active = 1;
    const McResult r = simulate_interferers(cfg);
    REQUIRE(r.interferer_histogram[0] == 2000);
    REQUIRE(r.collision_freq == 0.0);
}

TEST_CASE("dedicated chips never collide and reproduce the analytic rate") {
    McConfig cfg = cdma_cfg(3000, 11);
    cfg.scheme.kind = SchemeKind::tdma;
    const McResult r = simulate_interferers(cfg);
    REQUIRE(r.interferer_histogram[0] == 3000);
    REQUIRE(r.empirical_rate == rate_tdma(cfg.params, 16).per_user_rate);
    REQUIRE(r.empirical_rate_stderr == 0.0);
}

TEST_CASE("interferer counts follow the binomial collision model") {
    const McConfig cfg = cdma_cfg(1000000, 20240817);
    const McResult r = simulate_interferers(cfg);

    const double p = 1.0 / 16.0;
    const double f0 = static_cast<double>(r.interferer_histogram[0]) / 1e6;
    const double sigma0 = std::sqrt(0.379812405815 * (1.0 - 0.379812405815) / 1e6);
    REQUIRE_THAT(f0, WithinAbs(0.379812405815, 3.5 * sigma0));

    REQUIRE_THAT(r.collision_freq, WithinAbs(p, 3.5 * r.collision_freq_stderr));
    REQUIRE(tvd_vs_binomial(r, p) < 5.0 * std::sqrt(16.0 / 1e6));

    const double analytic = rate_cdma(cfg.params, 16, 1).per_user_rate;
    REQUIRE(std::abs(r.empirical_rate - analytic) <=
            3.5 * r.empirical_rate_stderr);
}

TEST_CASE("code-level collisions of weight-1 codes are uniform over shifts") {
    McConfig cfg = cdma_cfg(200000, 31);
    cfg.mode = McMode::code_level;
    const McResult r = simulate_interferers(cfg);
    REQUIRE_THAT(r.collision_freq,
                 WithinAbs(1.0 / 16.0, 3.5 * r.collision_freq_stderr));
    REQUIRE(tvd_vs_binomial(r, 1.0 / 16.0) < 5.0 * std::sqrt(16.0 / 200000.0));
}

TEST_CASE("code-level collisions of weight-2 codes stay below w squared over chips") {
    McConfig cfg = cdma_cfg(100000, 37, 2);
    cfg.mode = McMode::code_level;
    cfg.n_active = 7;
    const McResult r = simulate_interferers(cfg);
    REQUIRE(r.collision_freq > 0.0);
    REQUIRE(r.collision_freq <=
            collision_probability(16, 2) + 3.5 * r.collision_freq_stderr);
    REQUIRE(hist_total(r) == 100000);
}

TEST_CASE("code-level mode rejects schemes without codes and over-capacity requests") {
    McConfig cfg = cdma_cfg(100, 1);
    cfg.mode = McMode::code_level;
    cfg.scheme.kind = SchemeKind::tdma;
    REQUIRE_THROWS_AS(simulate_interferers(cfg), model_error);
    cfg.scheme.kind = SchemeKind::lbs;
    REQUIRE_THROWS_AS(simulate_interferers(cfg), model_error);
    cfg.scheme.kind = SchemeKind::cdma;
    cfg.scheme.weight = 2;
    cfg.n_active = 16;  // capacity for weight 2 over 16 chips is 7
    REQUIRE_THROWS_AS(simulate_interferers(cfg), capacity_error);
}

TEST_CASE("invalid simulation configs are rejected") {
    McConfig cfg = cdma_cfg(0, 1);
    REQUIRE_THROWS_AS(simulate_interferers(cfg), model_error);
    cfg = cdma_cfg(100, 1);
    cfg.n_active = 99;
    REQUIRE_THROWS_AS(simulate_interferers(cfg), model_error);
    cfg = cdma_cfg(100, 1);
    cfg.threads = 0;
    REQUIRE_THROWS_AS(simulate_interferers(cfg), model_error);
}

TEST_CASE("lbs sensing simulation is reproducible and partition independent") {
    McConfig cfg = cdma_cfg(20000, 13);
    cfg.scheme.kind = SchemeKind::lbs;
    cfg.scheme.listen_periods = 100;
    const McResult a = simulate_lbs_sensing(cfg, 100);
    const McResult b = simulate_lbs_sensing(cfg, 100);
    REQUIRE(a.interferer_histogram == b.interferer_histogram);
    cfg.threads = 3;
    const McResult c = simulate_lbs_sensing(cfg, 100);
    REQUIRE(a.interferer_histogram == c.interferer_histogram);
    REQUIRE(hist_total(a) == 20000);
}

TEST_CASE("lbs sensing without listening matches the blind binomial model") {
    McConfig cfg = cdma_cfg(50000, 17);
    cfg.scheme.kind = SchemeKind::lbs;
    cfg.scheme.listen_periods = 0;
    const McResult r = simulate_lbs_sensing(cfg, 0);
    REQUIRE(tvd_vs_binomial(r, 1.0 / 16.0) < 5.0 * std::sqrt(16.0 / 50000.0));
}

TEST_CASE("perfect detection clears the tagged chip completely") {
    McConfig cfg;
    cfg.trials = 2000;
    cfg.seed = 23;
    cfg.scheme.kind = SchemeKind::lbs;
    cfg.scheme.listen_periods = 3;
    cfg.n_active = 2;
    cfg.params = nominal_params();
    cfg.params.eta_d = 1.0;
    cfg.params.path_loss_db = 0.0;
    cfg.params.n_star = 2;
    cfg.params.mu = 1.0;
    cfg.params.gamma_dc = 0.5;   // detection probability per frame becomes 1
    cfg.params.gamma_xtalk = 0.0;
    const McResult r = simulate_lbs_sensing(cfg, 3);
    REQUIRE(r.interferer_histogram[0] == 2000);
}

TEST_CASE("more listening pushes the sensed rate toward the dedicated chip") {
    McConfig base = cdma_cfg(30000, 41);
    base.scheme.kind = SchemeKind::lbs;
    const double tdma = rate_tdma(base.params, 16).per_user_rate;
    double prev_rate = -1.0;
    for (long k : {0L, 50L, 500L}) {
        McConfig cfg = base;
        cfg.scheme.listen_periods = k;
        const McResult r = simulate_lbs_sensing(cfg, k);
        REQUIRE(r.empirical_rate >= prev_rate - 4.0 * r.empirical_rate_stderr);
        REQUIRE(r.empirical_rate <= tdma * 1.0001);
        prev_rate = r.empirical_rate;
    }
}

TEST_CASE("sensing simulation rejects non-lbs schemes and negative listening") {
    McConfig cfg = cdma_cfg(100, 1);
    REQUIRE_THROWS_AS(simulate_lbs_sensing(cfg, 10), model_error);
    cfg.scheme.kind = SchemeKind::lbs;
    REQUIRE_THROWS_AS(simulate_lbs_sensing(cfg, -1), model_error);
}
