#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "psh/io.hpp"

namespace {

const std::string kCli = PSH_CLI_PATH;
const std::string kCase = std::string(PSH_DATA_DIR) + "/two_unit.json";

struct RunOutput {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunOutput run(const std::string& args, const std::string& env = "") {
    std::string out_file = "/tmp/psh_cli_out.txt";
    std::string err_file = "/tmp/psh_cli_err.txt";
    std::string cmd =
        env + " " + kCli + " " + args + " >" + out_file + " 2>" + err_file;
    int rc = std::system(cmd.c_str());
    RunOutput r;
    r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(out_file);
    r.err = slurp(err_file);
    std::remove(out_file.c_str());
    std::remove(err_file.c_str());
    return r;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

}  // namespace

TEST_CASE("solve writes a results file and a one-line summary") {
    std::string out = "/tmp/psh_cli_results.json";
    RunOutput r = run("solve --case " + kCase + " --model proposed --out " + out);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("proposed: status=optimal") != std::string::npos);

    psh::ResultsFile rf = psh::load_results(out);
    REQUIRE(rf.runs.size() == 1);
    CHECK(rf.runs[0].model_tag == "proposed");
    CHECK(rf.runs[0].objective == doctest::Approx(358300.0));
    CHECK(rf.runs[0].schedule.n_intervals == 24);

    // the exported results feed plot-data
    std::string csv = "/tmp/psh_cli_plot.csv";
    RunOutput p = run("plot-data --results " + out + " --out " + csv);
    CHECK(p.exit_code == 0);
    std::string text = slurp(csv);
    CHECK(text.rfind("t,net_load_mw,psh_net_mw,lmp,soc_mwh,model_tag", 0) == 0);
    std::remove(out.c_str());
    std::remove(csv.c_str());
}

TEST_CASE("legacy solve clears the bid windows") {
    std::string out = "/tmp/psh_cli_legacy.json";
    RunOutput r = run("solve --case " + kCase + " --model legacy --out " + out);
    CHECK(r.exit_code == 0);
    psh::ResultsFile rf = psh::load_results(out);
    REQUIRE(rf.runs.size() == 1);
    CHECK(rf.runs[0].thermal_cost == doctest::Approx(359650.0));
    std::remove(out.c_str());
}

TEST_CASE("compare emits scenario summaries") {
    std::string out = "/tmp/psh_cli_compare.json";
    RunOutput r = run("compare --case " + kCase + " --scenarios 1 --out " + out);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("scenario 0:") != std::string::npos);
    psh::ResultsFile rf = psh::load_results(out);
    REQUIRE(rf.benefit.has_value());
    CHECK(rf.benefit->legacy_objective == doctest::Approx(359650.0));
    CHECK(rf.benefit->proposed_objective == doctest::Approx(358300.0));
    REQUIRE(rf.scenarios.size() == 1);
    CHECK(rf.runs.size() == 2);
    std::remove(out.c_str());
}

TEST_CASE("stats prints the storage accounting block") {
    RunOutput r = run("stats --case " + kCase);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("storage adds: soc_variables=25") != std::string::npos);
    CHECK(r.out.find("soc row nonzeros per reservoir: 6") != std::string::npos);
}

TEST_CASE("lmp writes a price CSV") {
    std::string out = "/tmp/psh_cli_lmp.csv";
    RunOutput r = run("lmp --case " + kCase + " --out " + out);
    CHECK(r.exit_code == 0);
    std::string text = slurp(out);
    CHECK(text.rfind("t,lmp\n", 0) == 0);
    int rows = 0;
    for (char c : text)
        if (c == '\n') ++rows;
    CHECK(rows == 25);  // header + 24 intervals
    std::remove(out.c_str());
}

TEST_CASE("exit codes separate the failure families") {
    SUBCASE("missing file") {
        RunOutput r = run("solve --case /nonexistent.json --out /tmp/x.json");
        CHECK(r.exit_code == 3);
        CHECK(r.err.find("\"error\":\"IoError\"") != std::string::npos);
    }
    SUBCASE("malformed json") {
        write_file("/tmp/psh_cli_bad.json", "{broken");
        RunOutput r = run("solve --case /tmp/psh_cli_bad.json --out /tmp/x.json");
        CHECK(r.exit_code == 3);
        CHECK(r.err.find("ParseError") != std::string::npos);
        std::remove("/tmp/psh_cli_bad.json");
    }
    SUBCASE("validation failure") {
        psh::Case c = psh::load_case(kCase);
        c.reservoirs[0].e_initial = 1e6;
        psh::save_case(c, "/tmp/psh_cli_invalid.json");
        RunOutput r = run("solve --case /tmp/psh_cli_invalid.json --out /tmp/x.json");
        CHECK(r.exit_code == 4);
        CHECK(r.err.find("BoundViolation") != std::string::npos);
        std::remove("/tmp/psh_cli_invalid.json");
    }
    SUBCASE("node limit") {
        RunOutput r = run("solve --case " + kCase + " --node-limit 1 --out /tmp/x.json");
        CHECK(r.exit_code == 5);
        CHECK(r.err.find("NodeLimit") != std::string::npos);
    }
    SUBCASE("unknown backend requested") {
        RunOutput r = run("stats --case " + kCase, "PSH_SOLVER_BACKEND=bogus");
        CHECK(r.exit_code == 6);
        CHECK(r.err.find("BackendUnavailable") != std::string::npos);
    }
    SUBCASE("usage error") {
        RunOutput r = run("solve");
        CHECK(r.exit_code != 0);
        CHECK(r.exit_code != 3);
    }
}
