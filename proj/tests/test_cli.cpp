#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace {

std::string cli() {
    const char* p = std::getenv("DDSIM_CLI");
    REQUIRE(p != nullptr);
    return p;
}

int run(const std::string& args) {
    int st = std::system((cli() + " " + args + " >/dev/null 2>&1").c_str());
    REQUIRE(st != -1);
    return WEXITSTATUS(st);
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("classify emits a csv table with both processes") {
    const std::string out = "/tmp/ddsim_cli_classify.csv";
    CHECK(run("classify --p 0.4 --q 0.55 --out " + out) == 0);
    std::string s = slurp(out);
    CHECK(s.find("# config_digest ") == 0);
    CHECK(s.find("process,verdict,margin,eta_star,region") != std::string::npos);
    CHECK(s.find("X_star,transient") != std::string::npos);
    CHECK(s.find("X_tilde,") != std::string::npos);
}

TEST_CASE("bad invocations exit with the validation status") {
    CHECK(run("verify --p 0.4 --q 0.55") == 2);          // missing required --suite
    CHECK(run("verify --suite no-such-suite") == 2);     // unknown suite name
    CHECK(run("classify --p 1.5") == 2);                 // invalid model parameter
    CHECK(run("classify --frobnicate 1") == 2);          // unknown option
    CHECK(run("simulate-tagged --variant nope") == 2);   // unknown variant
}

TEST_CASE("quasi-check distinguishes pass and tolerance-failure exits") {
    const std::string out = "/tmp/ddsim_cli_quasi.csv";
    CHECK(run("quasi-check --p 0.3 --q 0 --i 1 --trunc 400 --out " + out) == 0);
    std::string s = slurp(out);
    CHECK(s.find("i,K,max_relative_error") != std::string::npos);
    // an impossible tolerance flips only the exit status, not the csv shape
    CHECK(run("quasi-check --p 0.3 --q 0 --i 1 --trunc 400 --tol 1e-30 --out " + out) == 3);
}

TEST_CASE("expected reports the truncation deficit alongside the masses") {
    const std::string out = "/tmp/ddsim_cli_expected.csv";
    CHECK(run("expected --p 0.5 --q 0.1 --m0 5 --m 50 --out " + out) == 0);
    std::string s = slurp(out);
    CHECK(s.find("# deficit ") != std::string::npos);
    CHECK(s.find("k,mass") != std::string::npos);
}

TEST_CASE("verify reruns with one seed are byte-identical") {
    const std::string a = "/tmp/ddsim_cli_rep_a.json", b = "/tmp/ddsim_cli_rep_b.json";
    const std::string cmd = "verify --suite coupling --n 20000 --seed 42 --out ";
    CHECK(run(cmd + a) == 0);
    CHECK(run(cmd + b) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a).find("\"pass\": true") != std::string::npos);
}

TEST_CASE("seed environment override changes the report seed") {
    const std::string a = "/tmp/ddsim_cli_env_a.json", b = "/tmp/ddsim_cli_env_b.json";
    int st = std::system(
        ("DD_SEED=7 " + cli() + " verify --suite coupling --n 5000 --seed 1 --out " + a +
         " >/dev/null 2>&1")
            .c_str());
    REQUIRE(st != -1);
    CHECK(WEXITSTATUS(st) == 0);
    CHECK(run("verify --suite coupling --n 5000 --seed 7 --out " + b) == 0);
    CHECK(slurp(a) == slurp(b));
}

TEST_CASE("tagged simulation emits one json record per checkpoint") {
    const std::string out = "/tmp/ddsim_cli_tagged.jsonl";
    CHECK(run("simulate-tagged --p 0.5 --q 0.1 --variant base --x0 3 --t-max 2 "
              "--paths 3 --checkpoints 1 2 --seed 9 --out " +
              out) == 0);
    std::string s = slurp(out);
    int lines = 0;
    for (char c : s)
        if (c == '\n') ++lines;
    CHECK(lines == 6);
    CHECK(s.find("\"config_digest\"") != std::string::npos);
    CHECK(s.find("\"w\"") != std::string::npos);
}
