#include "support/subprocess.hpp"

#include <json.hpp>

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

using testsupport::read_file;
using testsupport::run_command;
using testsupport::write_file;

namespace {

const std::string kBin = CONJSCAN_BIN;
const std::string kDemos = CONJSCAN_DEMO_DIR;

std::string fresh_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("conjscan_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream cs(line);
        std::string cell;
        while (std::getline(cs, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("scan of the interval demo writes the frozen schema and passes") {
    auto out = fresh_dir("scan_interval");
    auto run = run_command(kBin + " scan --problem " + kDemos + "/demo_interval.cfg --out " + out);
    CHECK(run.exit_code == 0);
    auto csv = read_file(out + "/scan.csv");
    auto rows = parse_csv(csv);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"r0", "multiplicity", "signature", "regular",
                                              "gamma_min_eig", "gamma_max_eig",
                                              "forms_rel_disagreement"});
    CHECK(std::fabs(std::stod(rows[1][0]) - 0.4) <= 1e-4);
    CHECK(std::fabs(std::stod(rows[2][0]) - 0.8) <= 1e-4);
    for (int i : {1, 2}) {
        CHECK(rows[i][1] == "1");
        CHECK(rows[i][2] == "-1");
        CHECK(rows[i][3] == "true");
        CHECK(std::stod(rows[i][5]) < 0.0); // gamma_max_eig
    }
    auto summary = nlohmann::json::parse(read_file(out + "/summary.json"));
    CHECK(summary["smale_lhs"] == 2);
    CHECK(summary["smale_rhs"] == 2);
    CHECK(summary["smale_holds"] == true);
    CHECK(summary["bifurcation_lower_bound"] == 2);
}

TEST_CASE("scan outputs are byte-for-byte reproducible") {
    auto out1 = fresh_dir("repro_a");
    auto out2 = fresh_dir("repro_b");
    std::string base = kBin + " scan --problem " + kDemos + "/demo_interval.cfg --n 501 --out ";
    CHECK(run_command(base + out1).exit_code == 0);
    CHECK(run_command(base + out2).exit_code == 0);
    CHECK(read_file(out1 + "/scan.csv") == read_file(out2 + "/scan.csv"));
    CHECK(read_file(out1 + "/summary.json") == read_file(out2 + "/summary.json"));
}

TEST_CASE("verify-smale on the radial demo reports 5 = 5") {
    auto out = fresh_dir("smale_radial");
    auto run = run_command(kBin + " verify-smale --problem " + kDemos +
                           "/demo_radial.cfg --out " + out);
    CHECK(run.exit_code == 0);
    auto summary = nlohmann::json::parse(read_file(out + "/summary.json"));
    CHECK(summary["smale_lhs"] == 5);
    CHECK(summary["smale_rhs"] == 5);
    CHECK(summary["smale_holds"] == true);
    CHECK(summary["crossings"].size() == 3);
}

TEST_CASE("missing problem files exit with a usage error") {
    auto run = run_command(kBin + " scan --problem /nonexistent/nowhere.cfg");
    CHECK(run.exit_code == 1);
    CHECK(run.output.find("error") != std::string::npos);
}

TEST_CASE("unknown config keys are rejected") {
    auto out = fresh_dir("badkey");
    write_file(out + "/bad.cfg",
               "[problem]\nkind = interval\nchaos = 7\n[coefficients]\na = 1\nf = 0\n");
    auto run = run_command(kBin + " scan --problem " + out + "/bad.cfg --out " + out);
    CHECK(run.exit_code == 1);
    CHECK(run.output.find("unknown key") != std::string::npos);
}

TEST_CASE("validate splits good from bad configs by exit code") {
    auto out = fresh_dir("validate");
    CHECK(run_command(kBin + " validate --problem " + kDemos + "/demo_interval.cfg").exit_code ==
          0);
    write_file(out + "/bad.cfg", "[problem]\nkind = interval\n[coefficients]\na = -1\nf = 0\n");
    auto run = run_command(kBin + " validate --problem " + out + "/bad.cfg");
    CHECK(run.exit_code == 1);
    CHECK(run.output.find("ELLIPTICITY_VIOLATION") != std::string::npos);
}

TEST_CASE("morse subcommand prints the index") {
    auto run = run_command(kBin + " morse --problem " + kDemos + "/demo_interval.cfg --n 501");
    CHECK(run.exit_code == 0);
    CHECK(run.output.find("morse index at r = 1: 2") != std::string::npos);
}

TEST_CASE("morse subcommand dumps pencil triplets on request") {
    auto out = fresh_dir("dump");
    auto run = run_command(kBin + " morse --problem " + kDemos +
                           "/demo_interval.cfg --n 64 --dump-pencil " + out + "/pencil");
    CHECK(run.exit_code == 0);
    auto k_text = read_file(out + "/pencil.K.txt");
    auto m_text = read_file(out + "/pencil.M.txt");
    CHECK(!k_text.empty());
    CHECK(!m_text.empty());
    int i, j;
    double v;
    std::istringstream in(k_text);
    REQUIRE((in >> i >> j >> v));
    CHECK(i == 0);
    CHECK(j == 0);
}

TEST_CASE("certify reports a single instant") {
    auto out = fresh_dir("certify");
    auto run = run_command(kBin + " certify --problem " + kDemos +
                           "/demo_interval.cfg --r0 0.4 --out " + out);
    CHECK(run.exit_code == 0);
    CHECK(run.output.find("multiplicity = 1") != std::string::npos);
    CHECK(run.output.find("signature = -1") != std::string::npos);
    auto rows = parse_csv(read_file(out + "/scan.csv"));
    REQUIRE(rows.size() == 2);
}

TEST_CASE("matrix-lab emits one row per seeded path") {
    auto out = fresh_dir("lab");
    auto run = run_command(kBin + " matrix-lab --paths 3 --dims 4 8 --seed 5 --out " + out);
    CHECK(run.exit_code == 0);
    auto rows = parse_csv(read_file(out + "/matrix_lab.csv"));
    REQUIRE(rows.size() == 7); // header + 3 paths x 2 dims
    CHECK(rows[0] == std::vector<std::string>{"seed", "d", "n_crossings", "lhs", "rhs", "holds"});
    for (size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][5] == "true");
}

TEST_CASE("bifurcate confirms the cubic demo") {
    auto out = fresh_dir("bifurcate");
    auto run = run_command(kBin + " bifurcate --problem " + kDemos +
                           "/demo_interval_cubic.cfg --n 1001 --out " + out);
    CHECK(run.exit_code == 0);
    CHECK(run.output.find("bifurcation theorem: confirmed") != std::string::npos);
    auto rows = parse_csv(read_file(out + "/bifurcate.csv"));
    REQUIRE(rows.size() >= 7); // header + 2 branches x 3 schedule points
    CHECK(rows[0] == std::vector<std::string>{"s", "k", "r", "amplitude"});
}

TEST_CASE("config scan section feeds defaults that flags override") {
    auto out = fresh_dir("override");
    write_file(out + "/cfg.cfg", "[problem]\nkind = interval\n[coefficients]\na = 1\n"
                                 "f = -(2.5*pi)^2\n[scan]\nn = 501\nsamples = 128\n");
    auto run = run_command(kBin + " scan --problem " + out + "/cfg.cfg --out " + out);
    CHECK(run.exit_code == 0);
    auto summary = nlohmann::json::parse(read_file(out + "/summary.json"));
    CHECK(summary["grid_nodes"] == 501);
    CHECK(summary["r_samples"] == 128);
    auto run2 = run_command(kBin + " scan --problem " + out + "/cfg.cfg --out " + out +
                            " --n 601 --samples 256");
    CHECK(run2.exit_code == 0);
    auto summary2 = nlohmann::json::parse(read_file(out + "/summary.json"));
    CHECK(summary2["grid_nodes"] == 601);
    CHECK(summary2["r_samples"] == 256);
}

TEST_CASE("worker cap does not change the outputs") {
    auto out1 = fresh_dir("threads1");
    auto out2 = fresh_dir("threads4");
    std::string base = " scan --problem " + kDemos + "/demo_radial.cfg --n 501 --out ";
    CHECK(run_command("CONJSCAN_THREADS=1 " + kBin + base + out1).exit_code == 0);
    CHECK(run_command("CONJSCAN_THREADS=4 " + kBin + base + out2).exit_code == 0);
    CHECK(read_file(out1 + "/scan.csv") == read_file(out2 + "/scan.csv"));
    CHECK(read_file(out1 + "/summary.json") == read_file(out2 + "/summary.json"));
}

TEST_CASE("matrix-lab reads its section from a config file") {
    auto out = fresh_dir("lab_cfg");
    write_file(out + "/lab.cfg", "[matrix_lab]\nseed = 9\npaths = 2\ndims = 4\n");
    auto run = run_command(kBin + " matrix-lab --problem " + out + "/lab.cfg --out " + out);
    CHECK(run.exit_code == 0);
    auto rows = parse_csv(read_file(out + "/matrix_lab.csv"));
    REQUIRE(rows.size() == 3); // header + 2 paths
    CHECK(rows[1][0] == "9");
    CHECK(rows[1][1] == "4");
}

TEST_CASE("usage errors exit with code 1") {
    CHECK(run_command(kBin + " frobnicate").exit_code == 1);
    CHECK(run_command(kBin + " scan").exit_code == 1); // missing --problem
}

} // TEST_SUITE
