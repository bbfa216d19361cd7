#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

struct CommandResult {
    int exit_code;
    std::string out;
};

fs::path work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() /
                     ("spua_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CommandResult run_cli(const std::string& args) {
    const fs::path out = work_dir() / "stdout.txt";
    const std::string cmd = std::string(SPUA_CLI_PATH) + " " + args + " > " +
                            out.string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    return {WEXITSTATUS(rc), slurp(out)};
}

}  // namespace

TEST_CASE("solve writes a policy whose evaluation matches") {
    const fs::path policy = work_dir() / "pol_5_1.json";
    CommandResult solve =
        run_cli("solve --n 5 --p 1 --full --out " + policy.string());
    REQUIRE(solve.exit_code == 0);
    CHECK(solve.out.find("0.433333333333") != std::string::npos);

    const fs::path report = work_dir() / "rep_5_1.json";
    CommandResult eval = run_cli("eval --policy " + policy.string() +
                                 " --n 5 --p 1 --out " + report.string());
    REQUIRE(eval.exit_code == 0);
    auto j = nlohmann::json::parse(slurp(report));
    CHECK(j.at("gamma").get<double>() == doctest::Approx(13.0 / 30.0).epsilon(1e-8));
    CHECK(j.at("argmin_k").get<int>() == 1);
}

TEST_CASE("solve trivial instance") {
    CommandResult r = run_cli("solve --n 1 --p 0.4");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("gamma_n* = 1") != std::string::npos);
}

TEST_CASE("capped solve prints a certified interval covering the bound") {
    CommandResult r = run_cli("solve --n 60 --p 0.8 --cap 12");
    REQUIRE(r.exit_code == 0);
    const auto tag = r.out.find("certified interval");
    REQUIRE(tag != std::string::npos);
    // upper end of the interval must dominate p^{p/(1-p)} = 0.4096
    const auto comma = r.out.find(", ", tag);
    const auto close = r.out.find("]", tag);
    REQUIRE(comma != std::string::npos);
    REQUIRE(close != std::string::npos);
    const std::string upper_text = r.out.substr(comma + 2, close - comma - 2);
    CHECK(std::stod(upper_text) >= 0.4096 - 1e-9);
}

TEST_CASE("eval of the never-offer policy returns gamma 0") {
    const fs::path policy = work_dir() / "zero.json";
    std::ofstream(policy) << "{\"n\":3,\"p\":0.5,\"q\":[[0],[0,0],[0,0,0]]}";
    CommandResult r = run_cli("eval --policy " + policy.string());
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("gamma = 0") != std::string::npos);
}

TEST_CASE("flag mismatches and bad input exit with code 1") {
    const fs::path policy = work_dir() / "mismatch.json";
    std::ofstream(policy) << "{\"n\":3,\"p\":0.5,\"q\":[[0],[0,0],[0,0,0]]}";
    CHECK(run_cli("eval --policy " + policy.string() + " --n 4").exit_code == 1);
    CHECK(run_cli("eval --policy " + (work_dir() / "missing.json").string())
              .exit_code == 1);
    CHECK(run_cli("solve --n 5").exit_code == 1);          // missing --p
    CHECK(run_cli("solve --n 5 --p 1.7").exit_code == 1);  // p out of range
    const fs::path bad = work_dir() / "bad.json";
    std::ofstream(bad) << "{\"n\":2,\"p\":0.5,\"q\":[[0]]}";
    CHECK(run_cli("simulate --policy " + bad.string() +
                  " --trials 10 --seed 1")
              .exit_code == 1);
}

TEST_CASE("simulate is byte-deterministic for a fixed seed") {
    const fs::path policy = work_dir() / "sim.json";
    std::ofstream(policy)
        << "{\"n\":3,\"p\":0.6,\"q\":[[1.0],[0.5,0.0],[1.0,0.25,0.0]]}";
    const fs::path rep1 = work_dir() / "sim1.json";
    const fs::path rep2 = work_dir() / "sim2.json";
    REQUIRE(run_cli("simulate --policy " + policy.string() +
                    " --trials 40000 --seed 31 --out " + rep1.string())
                .exit_code == 0);
    REQUIRE(run_cli("simulate --policy " + policy.string() +
                    " --trials 40000 --seed 31 --threads 2 --out " +
                    rep2.string())
                .exit_code == 0);
    CHECK(slurp(rep1) == slurp(rep2));
}

TEST_CASE("simulate accepts availability tables") {
    const fs::path policy = work_dir() / "avail.json";
    std::ofstream(policy)
        << "{\"n\":2,\"p\":1.0,\"offer_if_available\":[[true],[true,true]]}";
    const fs::path rep = work_dir() / "avail_rep.json";
    REQUIRE(run_cli("simulate --policy " + policy.string() +
                    " --trials 20000 --seed 3 --out " + rep.string())
                .exit_code == 0);
    auto j = nlohmann::json::parse(slurp(rep));
    CHECK(j.contains("success_freq"));
    // p = 1 and offer-to-first: always succeeds iff first is best? The rule
    // offers immediately, so success frequency = Prob(first is best) = 1/2.
    CHECK(j.at("success_freq").get<double>() == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("bounds CSV schema and closed-form rows") {
    const fs::path csv = work_dir() / "bounds.csv";
    REQUIRE(run_cli("bounds --p-list 0.3,0.8,1.0 --out " + csv.string())
                .exit_code == 0);
    std::istringstream in(slurp(csv));
    std::string line;
    std::getline(in, line);
    CHECK(line == "p,upper,lower,gamma_n,status");
    std::getline(in, line);
    // upper bound at p = 0.3 is min{0.3^{3/7}, 1/beta} = 0.3^{3/7} ~ 0.5969
    CHECK(line.find("0.3,0.596") != std::string::npos);
    CHECK(line.find("0.46") != std::string::npos);
    std::getline(in, line);
    CHECK(line.find("0.8,0.4096,0.4096,,ok") != std::string::npos);
    std::getline(in, line);  // p = 1: both branches collapse to 1/e
    CHECK(line.find("0.367879441171,0.367879441171") != std::string::npos);
}

TEST_CASE("bounds with a reference n solves the LP per row") {
    const fs::path csv = work_dir() / "bounds_ref.csv";
    REQUIRE(run_cli("bounds --p-list 0.5 --ref-n 12 --out " + csv.string())
                .exit_code == 0);
    std::istringstream in(slurp(csv));
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    // gamma_12(0.5) sits between lower(0.5) and 1, and the row is ok
    const auto last_comma = row.rfind(',');
    CHECK(row.substr(last_comma + 1) == "ok");
    std::istringstream fields(row);
    std::string tok;
    std::getline(fields, tok, ',');  // p
    std::getline(fields, tok, ',');  // upper
    std::getline(fields, tok, ',');  // lower
    const double lower = std::stod(tok);
    std::getline(fields, tok, ',');  // gamma_n
    const double gamma = std::stod(tok);
    CHECK(gamma >= lower - 1e-6);
    CHECK(gamma <= 1.0);
}

TEST_CASE("experiment CSV schema and orderings") {
    const fs::path csv = work_dir() / "exp.csv";
    REQUIRE(run_cli("experiment --n 12 --utility topk --k 2 "
                    "--p-list 0.2,0.9 --seed 11 --trials 20000 --out " +
                    csv.string())
                .exit_code == 0);
    std::istringstream in(slurp(csv));
    std::string line;
    std::getline(in, line);
    CHECK(line == "p,policy,ratio,stderr,status");
    int rows = 0;
    double rob = -1, util = -1;
    while (std::getline(in, line)) {
        ++rows;
        CHECK(line.find(",ok") != std::string::npos);
        std::istringstream fields(line);
        std::string p_text, policy, ratio_text;
        std::getline(fields, p_text, ',');
        std::getline(fields, policy, ',');
        std::getline(fields, ratio_text, ',');
        const double ratio = std::stod(ratio_text);
        CHECK(ratio > 0.0);
        CHECK(ratio <= 1.0 + 1e-9);
        if (p_text == "0.2") {
            if (policy == "rob_pol") rob = ratio;
            if (policy == "util_pol") util = ratio;
        }
    }
    CHECK(rows == 6);
    CHECK(util >= rob - 1e-8);
}
