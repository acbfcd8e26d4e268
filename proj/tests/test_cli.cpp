#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

using testsupport::CliResult;
using testsupport::run_cli;
using Catch::Approx;

namespace {

std::string bin() { return OPSPEC_BIN_PATH; }

std::string cfg(const std::string& name) {
    return std::string("--config \"") + OPSPEC_CONFIG_DIR + "/" + name + "\"";
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::string line;
    for (char c : text) {
        if (c == '\n') {
            std::vector<std::string> fields;
            std::string f;
            for (char k : line) {
                if (k == ',') {
                    fields.push_back(f);
                    f.clear();
                } else {
                    f += k;
                }
            }
            fields.push_back(f);
            rows.push_back(fields);
            line.clear();
        } else {
            line += c;
        }
    }
    REQUIRE(line.empty()); // machine output ends with a newline
    return rows;
}

double num(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

} // namespace

TEST_CASE("help and argument errors") {
    REQUIRE(run_cli(bin(), "--help").exit_code == 0);
    REQUIRE(run_cli(bin(), "spectrum --help").exit_code == 0);
    REQUIRE(run_cli(bin(), "").exit_code == 2);
    REQUIRE(run_cli(bin(), "frobnicate").exit_code == 2);
    REQUIRE(run_cli(bin(), "spectrum " + cfg("periodic_single.json") + " --engine sketchy")
                .exit_code == 2);
    REQUIRE(run_cli(bin(), "check " + cfg("periodic_single.json") + " --format yaml")
                .exit_code == 2);

    // --config is mandatory for config-driven subcommands
    CliResult r = run_cli(bin(), "check");
    REQUIRE(r.exit_code == 2);
    REQUIRE(r.err.find("--config") != std::string::npos);

    r = run_cli(bin(), "check --config /nonexistent/x.json");
    REQUIRE(r.exit_code == 2);
    REQUIRE(r.err.find("cannot open") != std::string::npos);

    r = run_cli(bin(), "spectrum " + cfg("periodic_single.json") + " --m 3");
    REQUIRE(r.exit_code == 2);
}

TEST_CASE("check reports admissibility per block") {
    CliResult r = run_cli(bin(), "check " + cfg("periodic_single.json"));
    REQUIRE(r.exit_code == 0);
    auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 2);
    REQUIRE(rows[0] == std::vector<std::string>{"block", "w_residual", "v_residual",
                                                "commutator_norm", "admissible"});
    REQUIRE(rows[1][0] == "1");
    REQUIRE(rows[1][4] == "true");
    REQUIRE(num(rows[1][3]) <= 1e-12);

    REQUIRE(run_cli(bin(), "check " + cfg("mixed_three_block.json")).exit_code == 0);
    REQUIRE(run_cli(bin(), "check " + cfg("custom_admissible.json")).exit_code == 0);

    r = run_cli(bin(), "check " + cfg("non_admissible.json"));
    REQUIRE(r.exit_code == 1);
    rows = parse_csv(r.out);
    REQUIRE(rows[1][4] == "false");
    REQUIRE(num(rows[1][3]) > 1e-8);

    r = run_cli(bin(), "check " + cfg("mixed_three_block.json") + " --format json");
    REQUIRE(r.exit_code == 0);
    auto doc = nlohmann::json::parse(r.out);
    REQUIRE(doc["schema_version"] == "1");
    REQUIRE(doc["all_admissible"] == true);
    REQUIRE(doc["blocks"].size() == 3);
    REQUIRE(doc["blocks"][2]["admissible"] == true);
}

TEST_CASE("check rejects invalid configs with a located message") {
    CliResult r = run_cli(bin(), "check " + cfg("invalid_nonhermitian.json"));
    REQUIRE(r.exit_code == 2);
    REQUIRE(r.err.find("blocks[0].A") != std::string::npos);
    REQUIRE(r.err.find("Hermitian") != std::string::npos);

    r = run_cli(bin(), "check " + cfg("invalid_nonunitary.json"));
    REQUIRE(r.exit_code == 2);
    REQUIRE(r.err.find("blocks[0].W") != std::string::npos);
    REQUIRE(r.err.find("unitary") != std::string::npos);
}

TEST_CASE("analytic spectrum of the single periodic block") {
    const double four_pi_sq = 4.0 * std::acos(-1.0) * std::acos(-1.0);
    CliResult r = run_cli(bin(), "spectrum " + cfg("periodic_single.json") +
                                     " --engine analytic");
    REQUIRE(r.exit_code == 0);
    auto rows = parse_csv(r.out);
    REQUIRE(rows[0] == std::vector<std::string>{"block", "engine", "re_lambda", "im_lambda",
                                                "multiplicity", "residual"});
    // two eigenvalues in the default window, reported per block and as union
    REQUIRE(rows.size() == 5);
    for (std::size_t k = 1; k < rows.size(); ++k) {
        REQUIRE(rows[k][1] == "analytic");
        REQUIRE(num(rows[k][5]) <= 1e-9);
        REQUIRE(num(rows[k][3]) == Approx(2.0).margin(1e-8));
    }
    REQUIRE(rows[1][0] == "0");
    REQUIRE(num(rows[1][2]) == Approx(0.0).margin(1e-8));
    REQUIRE(rows[1][4] == "1");
    REQUIRE(rows[2][0] == "0");
    REQUIRE(num(rows[2][2]) == Approx(four_pi_sq).margin(1e-7));
    REQUIRE(rows[2][4] == "2");
    REQUIRE(rows[3][0] == "1");
    REQUIRE(rows[4][0] == "1");
    REQUIRE(num(rows[4][2]) == Approx(four_pi_sq).margin(1e-7));
}

TEST_CASE("discrete engine approaches the analytic spectrum") {
    const double four_pi_sq = 4.0 * std::acos(-1.0) * std::acos(-1.0);
    CliResult r = run_cli(bin(), "spectrum " + cfg("periodic_single.json") +
                                     " --engine discrete --m 201");
    REQUIRE(r.exit_code == 0);
    auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 5);
    REQUIRE(rows[1][1] == "discrete");
    REQUIRE(num(rows[1][2]) == Approx(0.0).margin(1e-9));
    REQUIRE(num(rows[1][3]) == Approx(2.0).margin(1e-9));
    // second-order closure: the k = 1 pair lands within O(h^2) of 4 pi^2
    REQUIRE(num(rows[2][2]) == Approx(four_pi_sq).margin(0.02));
    REQUIRE(rows[2][4] == "2");
}

TEST_CASE("engine both emits a pairing table on stderr") {
    CliResult r = run_cli(bin(), "spectrum " + cfg("periodic_single.json") +
                                     " --engine both --m 101");
    REQUIRE(r.exit_code == 0);
    auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 9); // header + (2 analytic + 2 discrete) x (block, union)
    REQUIRE(r.err.find("pairing") != std::string::npos);
    REQUIRE(r.err.find("deviation") != std::string::npos);
}

TEST_CASE("empty search window yields a header-only table") {
    CliResult r = run_cli(bin(), "spectrum " + cfg("empty_region.json") + " --engine both");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out == std::string(opspec::spectrum_csv_header()) + "\n");
}

TEST_CASE("eigensolver cap maps to the resource exit code") {
    CliResult r = run_cli(bin(), "spectrum " + cfg("cap_exceeded.json") + " --engine discrete");
    REQUIRE(r.exit_code == 3);
    REQUIRE(r.err.find("cap") != std::string::npos);

    // the analytic engine never touches the eigensolver
    REQUIRE(run_cli(bin(), "spectrum " + cfg("cap_exceeded.json") + " --engine analytic")
                .exit_code == 0);
}

TEST_CASE("output is byte-identical across reruns") {
    const std::string args = "spectrum " + cfg("mixed_three_block.json") +
                             " --engine both --m 101";
    CliResult a = run_cli(bin(), args);
    CliResult b = run_cli(bin(), args);
    REQUIRE(a.exit_code == 0);
    REQUIRE(a.out == b.out);
    REQUIRE_FALSE(a.out.empty());

    const std::string jargs = "spectrum " + cfg("mixed_three_block.json") +
                              " --engine analytic --format json";
    CliResult ja = run_cli(bin(), jargs);
    CliResult jb = run_cli(bin(), jargs);
    REQUIRE(ja.exit_code == 0);
    REQUIRE(ja.out == jb.out);
    auto doc = nlohmann::json::parse(ja.out);
    REQUIRE(doc["schema_version"] == "1");
    REQUIRE(doc["rows"].is_array());
}

TEST_CASE("thread cap changes nothing observable and bad values are rejected") {
    const std::string args = "spectrum " + cfg("periodic_single.json") + " --engine analytic";
    CliResult one = run_cli(bin(), args, "OPSPEC_THREADS=1 ");
    CliResult two = run_cli(bin(), args, "OPSPEC_THREADS=2 ");
    REQUIRE(one.exit_code == 0);
    REQUIRE(two.exit_code == 0);
    REQUIRE(one.out == two.out);

    REQUIRE(run_cli(bin(), args, "OPSPEC_THREADS=abc ").exit_code == 2);
    REQUIRE(run_cli(bin(), args, "OPSPEC_THREADS=0 ").exit_code == 2);
    REQUIRE(run_cli(bin(), "normality " + cfg("periodic_single.json"),
                    "OPSPEC_THREADS=-3 ")
                .exit_code == 2);
}

TEST_CASE("--out writes the same bytes the terminal would get") {
    const std::string path = "cli_out_probe.csv";
    CliResult direct = run_cli(bin(), "check " + cfg("periodic_single.json"));
    CliResult filed = run_cli(bin(), "check " + cfg("periodic_single.json") +
                                         " --out " + path);
    REQUIRE(filed.exit_code == 0);
    REQUIRE(filed.out.empty());
    REQUIRE(testsupport::read_file(path) == direct.out);
    std::remove(path.c_str());
}

TEST_CASE("normality verdicts and exit codes") {
    CliResult r = run_cli(bin(), "normality " + cfg("custom_admissible.json") + " --m 101");
    REQUIRE(r.exit_code == 0);
    auto rows = parse_csv(r.out);
    REQUIRE(rows[0] == std::vector<std::string>{"block", "normality_residual",
                                                "refined_residual", "identity_residual",
                                                "normal"});
    REQUIRE(rows.size() == 2);
    REQUIRE(rows[1][4] == "true");
    // eliminated closure: macroscopic matrix witness that halves under refinement
    REQUIRE(num(rows[1][1]) > 1e-4);
    REQUIRE(num(rows[1][2]) <= 0.75 * num(rows[1][1]));
    REQUIRE(num(rows[1][3]) <= 1e-3);

    r = run_cli(bin(), "normality " + cfg("non_admissible.json") + " --m 51");
    REQUIRE(r.exit_code == 1);
    rows = parse_csv(r.out);
    REQUIRE(rows[1][4] == "false");
    REQUIRE(num(rows[1][3]) > 1e-2);

    r = run_cli(bin(), "normality " + cfg("mixed_three_block.json") + " --m 101 --format json");
    REQUIRE(r.exit_code == 0);
    auto doc = nlohmann::json::parse(r.out);
    REQUIRE(doc["all_normal"] == true);
    REQUIRE(doc["blocks"].size() == 3);
    for (const auto& b : doc["blocks"]) {
        REQUIRE(b["normal"] == true);
        REQUIRE(b["identity_residual"].get<double>() <= 1e-3);
    }
}

TEST_CASE("counterexample table, plot file and JSON verdict") {
    CliResult r = run_cli(bin(), "counterexample --m 5");
    REQUIRE(r.exit_code == 0);
    auto rows = parse_csv(r.out);
    REQUIRE(rows[0] == std::vector<std::string>{"n", "alpha_n", "c_n", "norm_sq_closed",
                                                "norm_sq_quadrature", "partial_sum"});
    REQUIRE(rows.size() == 6);
    for (int n = 1; n <= 5; ++n) {
        REQUIRE(rows[n][0] == std::to_string(n));
        REQUIRE(num(rows[n][3]) == Approx(1.0).margin(1e-12));
        REQUIRE(num(rows[n][5]) == Approx(double(n)).margin(1e-12));
    }
    REQUIRE(r.err.find("diverges") != std::string::npos);

    const std::string plot = "cli_plot_probe.txt";
    r = run_cli(bin(), "counterexample --m 5 --plot-out " + plot);
    REQUIRE(r.exit_code == 0);
    std::string content = testsupport::read_file(plot);
    REQUIRE(content == "1 1\n2 2\n3 3\n4 4\n5 5\n");
    std::remove(plot.c_str());

    r = run_cli(bin(), "counterexample --m 12 --format json");
    REQUIRE(r.exit_code == 0);
    auto doc = nlohmann::json::parse(r.out);
    REQUIRE(doc["divergent"] == true);
    REQUIRE(doc["growth_exponent"].get<double>() == Approx(1.0).margin(1e-9));
    REQUIRE(doc["blocks"].size() == 12);

    r = run_cli(bin(), "counterexample --m 12 --c-power 0 --format json");
    REQUIRE(r.exit_code == 0);
    doc = nlohmann::json::parse(r.out);
    REQUIRE(doc["divergent"] == false);
    REQUIRE(doc["growth_exponent"].get<double>() < 0.5);

    REQUIRE(run_cli(bin(), "counterexample --m 0").exit_code == 2);
    REQUIRE(run_cli(bin(), "counterexample --length 0").exit_code == 2);
}
