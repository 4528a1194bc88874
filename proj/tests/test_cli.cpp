#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qkdstar/cli.hpp"

using Catch::Matchers::ContainsSubstring;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "qkdstar");
    std::ostringstream out, err;
    const int code = qkdstar::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("scenario subcommand emits the preset table") {
    const CliResult r = run_cli({"scenario", "fig5a"});
    REQUIRE(r.code == 0);
    REQUIRE_THAT(r.out, ContainsSubstring(
                            "scheme,n_active,per_user_rate_bps,total_rate_bps"));
    REQUIRE_THAT(r.out, ContainsSubstring("tdma,16,16543.4,"));
}

TEST_CASE("unknown scenarios exit with the configuration code") {
    const CliResult r = run_cli({"scenario", "fig99"});
    REQUIRE(r.code == 2);
    REQUIRE_THAT(r.err, ContainsSubstring("unknown scenario"));
}

TEST_CASE("scenario honors the per-frame and format flags") {
    CliResult r = run_cli({"scenario", "fig5a", "--per-frame"});
    REQUIRE(r.code == 0);
    REQUIRE_THAT(r.out, ContainsSubstring("per_user_rate_bpframe"));

    r = run_cli({"scenario", "fig5a", "--format", "keyvalue"});
    REQUIRE(r.code == 0);
    REQUIRE_THAT(r.out, ContainsSubstring("scheme: tdma\n"));

    r = run_cli({"scenario", "fig5a", "--format", "xml"});
    REQUIRE(r.code == 2);
}

TEST_CASE("results can be redirected to a file") {
    const std::string path =
        (std::filesystem::temp_directory_path() / "cli_codes_out.txt").string();
    std::remove(path.c_str());
    const CliResult r = run_cli({"codes", "16", "2", "7", "--output", path});
    REQUIRE(r.code == 0);
    REQUIRE(r.out.empty());
    const std::string text = slurp(path);
    REQUIRE_THAT(text, ContainsSubstring("0,1\n"));
    REQUIRE_THAT(text, ContainsSubstring("0,7\n"));
    std::remove(path.c_str());
}

TEST_CASE("code generation respects capacity at the command line") {
    CliResult r = run_cli({"codes", "16", "2", "7"});
    REQUIRE(r.code == 0);
    int lines = 0;
    for (char c : r.out) lines += c == '\n';
    REQUIRE(lines == 7);

    r = run_cli({"codes", "16", "3", "3"});
    REQUIRE(r.code == 3);
    REQUIRE_THAT(r.err, ContainsSubstring("capacity"));
}

TEST_CASE("sweep subcommand runs config files and surfaces their errors") {
    const std::string path =
        (std::filesystem::temp_directory_path() / "cli_sweep.cfg").string();
    {
        std::ofstream out(path, std::ios::binary);
        out << "mu = 0.48\ngamma_dc = 1e-7\ngamma_xtalk = 8e-8\nb_opt = 1\n"
               "eta_d = 0.3\npath_loss_db = 6\nn_star = 16\nn_chips = 16\n"
               "tau_p = 1\ntau_d = 1\ntau_c = 1\nframe_t = 16\nf_ec = 1.22\n"
               "e_d = 0.033\nvariable = path_loss_db\nvalues = 0, 6\n"
               "schemes = tdma\n";
    }
    CliResult r = run_cli({"sweep", path});
    REQUIRE(r.code == 0);
    REQUIRE_THAT(r.out, ContainsSubstring("scheme,path_loss_db,"));
    REQUIRE_THAT(r.out, ContainsSubstring("tdma,6,16543.4,"));

    r = run_cli({"sweep", "definitely_not_here.cfg"});
    REQUIRE(r.code == 2);

    const std::string nosweep =
        (std::filesystem::temp_directory_path() / "cli_nosweep.cfg").string();
    {
        std::ofstream out(nosweep, std::ios::binary);
        out << "mu = 0.48\ngamma_dc = 1e-7\ngamma_xtalk = 8e-8\nb_opt = 1\n"
               "eta_d = 0.3\npath_loss_db = 6\nn_star = 16\nn_chips = 16\n"
               "tau_p = 1\ntau_d = 1\ntau_c = 1\nframe_t = 16\nf_ec = 1.22\n"
               "e_d = 0.033\n";
    }
    r = run_cli({"sweep", nosweep});
    REQUIRE(r.code == 2);
    REQUIRE_THAT(r.err, ContainsSubstring("no sweep"));
}

TEST_CASE("monte carlo runs are reproducible from the command line") {
    const std::vector<std::string> args = {"mc",      "--scheme", "cdma",
                                           "--w",     "1",        "--trials",
                                           "5000",    "--seed",   "42"};
    const CliResult a = run_cli(args);
    const CliResult b = run_cli(args);
    REQUIRE(a.code == 0);
    REQUIRE(a.out == b.out);
    REQUIRE_THAT(a.out, ContainsSubstring("analytical_collision_p: 0.0625\n"));
    REQUIRE_THAT(a.out, ContainsSubstring("trials: 5000\n"));
    REQUIRE_THAT(a.out, ContainsSubstring("seed: 42\n"));
    REQUIRE_THAT(a.out, ContainsSubstring("mode: bernoulli-model\n"));
}

TEST_CASE("monte carlo mode defaults follow the scheme") {
    CliResult r = run_cli({"mc", "--scheme", "lbs", "--k", "50", "--trials", "2000"});
    REQUIRE(r.code == 0);
    REQUIRE_THAT(r.out, ContainsSubstring("mode: sequential-sensing\n"));
    REQUIRE_THAT(r.out, ContainsSubstring("scheme: lbs_k50\n"));

    r = run_cli({"mc", "--scheme", "cdma", "--mode", "sensing", "--trials", "100"});
    REQUIRE(r.code == 2);
    REQUIRE_THAT(r.err, ContainsSubstring("sensing"));

    r = run_cli({"mc", "--scheme", "cdma", "--mode", "code", "--trials", "2000",
                 "--parallel", "2"});
    REQUIRE(r.code == 0);
    REQUIRE_THAT(r.out, ContainsSubstring("mode: code-level\n"));

    r = run_cli({"mc", "--scheme", "lbs:k=25", "--mode", "bernoulli",
                 "--trials", "1"});
    REQUIRE(r.code == 0);
    REQUIRE_THAT(r.out, ContainsSubstring("trials: 1\n"));
    REQUIRE_THAT(r.out, ContainsSubstring("scheme: lbs_k25\n"));
}

TEST_CASE("monte carlo histogram table via the csv format") {
    const CliResult r = run_cli({"mc", "--scheme", "cdma", "--trials", "2000",
                                 "--format", "csv", "--n-active", "4"});
    REQUIRE(r.code == 0);
    REQUIRE_THAT(r.out, ContainsSubstring("m,count,frequency,model_weight\n"));
    int lines = 0;
    for (char c : r.out) lines += c == '\n';
    REQUIRE(lines == 5);  // header + bins 0..3
}

TEST_CASE("maximum wavelength scan from the command line") {
    CliResult r = run_cli({"maxw", "20"});
    REQUIRE(r.code == 0);
    REQUIRE_THAT(r.out, ContainsSubstring("max_channels: 8\n"));
    REQUIRE_THAT(r.out, ContainsSubstring("alpha_xt: 0.01\n"));
    REQUIRE_THAT(r.out, ContainsSubstring("total_users: 128\n"));

    r = run_cli({"maxw", "30", "--wmax", "200"});
    REQUIRE(r.code == 0);
    REQUIRE_THAT(r.out, ContainsSubstring("max_channels: 76\n"));

    r = run_cli({"maxw", "-5"});
    REQUIRE(r.code == 2);
}

TEST_CASE("usage errors and help exit distinctly") {
    CliResult r = run_cli({});
    REQUIRE(r.code == 2);

    r = run_cli({"frobnicate"});
    REQUIRE(r.code == 2);

    r = run_cli({"scenario"});
    REQUIRE(r.code == 2);  // missing required name

    r = run_cli({"--help"});
    REQUIRE(r.code == 0);
    REQUIRE_THAT(r.out, ContainsSubstring("scenario"));

    r = run_cli({"mc", "--scheme", "fdma", "--trials", "10"});
    REQUIRE(r.code == 2);
}
