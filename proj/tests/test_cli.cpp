#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "doctest.h"

#ifndef PERMRAT_CLI_PATH
#error "PERMRAT_CLI_PATH must point at the CLI binary"
#endif

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunResult {
    int code = -1;
    std::string out;
};

fs::path scratch_root() {
    static fs::path root = [] {
        fs::path p = fs::temp_directory_path() / "permrat_cli_tests";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return root;
}

RunResult run(const std::string& args) {
    static int counter = 0;
    fs::path outfile = scratch_root() / ("out" + std::to_string(counter++) + ".txt");
    std::string cmd = std::string(PERMRAT_CLI_PATH) + " " + args + " > " +
                      outfile.string() + " 2> /dev/null";
    int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(outfile);
    std::stringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    return r;
}

json run_json(const std::string& args, int want_code) {
    RunResult r = run(args);
    REQUIRE(r.code == want_code);
    return json::parse(r.out);
}

// Cache populated once by the first test that needs it.
std::string cli_cache() {
    static std::string dir = [] {
        fs::path p = scratch_root() / "cache";
        RunResult r = run("derive --n 3 --cache " + p.string());
        REQUIRE(r.code == 0);
        return p.string();
    }();
    return dir;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("threshold") {
    json j3 = run_json("threshold --n 3", 0);
    CHECK(j3.at("record") == "threshold");
    CHECK(j3.at("d") == 18);
    CHECK(j3.at("least_admissible") == 1734081);
    CHECK(j3.at("least_prime") == 1734097);
    CHECK(j3.at("prime_ordinal") == 130492);

    json j4 = run_json("threshold --n 4", 0);
    CHECK(j4.at("d") == 46);
    CHECK(j4.at("least_prime") == 100018663);
    CHECK(j4.at("prime_ordinal") == 5762458);

    CHECK(run("threshold --n 5").code == 2);
    CHECK(run("threshold").code == 2);

    // global flags are accepted after the subcommand
    RunResult text = run("threshold --n 3 --format text");
    CHECK(text.code == 0);
    CHECK(text.out.find("1734097") != std::string::npos);
}

TEST_CASE("derive is idempotent") {
    std::string dir = cli_cache();
    json j = run_json("derive --n 3 --cache " + dir, 0);
    CHECK(j.at("record") == "derive");
    CHECK(j.at("polys").at("n3_G.poly").at("terms") == 222);
    CHECK(j.at("polys").at("n3_P.poly").at("terms") == 27);
    CHECK(fs::exists(fs::path(dir) / "n3_G.poly"));
    CHECK(fs::exists(fs::path(dir) / "manifest.json"));
}

TEST_CASE("verify dispatch") {
    CHECK(run("verify").code == 2);
    CHECK(run("verify --n 3 --lemma21 5 3").code == 2);
    CHECK(run("verify --n 2").code == 2);

    json lemma = run_json("verify --lemma21 5 3 --trials 10 --seed 5", 0);
    CHECK(lemma.at("verdict") == "pass");
    CHECK(lemma.at("seed") == 5);

    json diff = run_json("verify --diff 5 3 1,0,0 --trials 10", 0);
    CHECK(diff.at("verdict") == "pass");

    // zero trace is a usage error
    CHECK(run("verify --diff 3 3 1,0,0 --trials 5").code == 2);
}

TEST_CASE("verify full cubic suite") {
    json j = run_json("verify --n 3 --cache " + cli_cache(), 0);
    CHECK(j.at("verdict") == "pass");
    CHECK(j.at("checks").size() == 14);
}

TEST_CASE("verify refuses a corrupted cache") {
    fs::path dir = scratch_root() / "bad_cache";
    RunResult d = run("derive --n 3 --cache " + dir.string());
    REQUIRE(d.code == 0);
    {
        std::ofstream out(dir / "n3_G.poly", std::ios::app);
        out << "1 0 9 9 9\n";
    }
    CHECK(run("verify --n 3 --cache " + dir.string()).code == 1);
    // derive repairs it in place
    CHECK(run("derive --n 3 --cache " + dir.string()).code == 0);
    CHECK(run("verify --n 3 --cache " + dir.string()).code == 0);
}

TEST_CASE("permtest") {
    json all = run_json("permtest --p 5 --n 2 --all-b --extras 1", 0);
    CHECK(all.at("record") == "classification");
    CHECK(all.at("consistent_within_class") == true);
    REQUIRE(all.at("classes").size() == 4);
    std::map<int, bool> verdicts;
    for (const auto& c : all.at("classes"))
        verdicts[c.at("trace").get<int>()] = c.at("is_permutation").get<bool>();
    CHECK(verdicts.at(1) == true);
    CHECK(verdicts.at(2) == false);
    CHECK(verdicts.at(3) == false);
    CHECK(verdicts.at(4) == true);

    json single = run_json("permtest --p 5 --n 2 --b 2,0", 0);
    CHECK(single.at("record") == "permutation_scan");
    CHECK(single.at("is_permutation") == false);

    CHECK(run("permtest --p 5 --n 2").code == 2);
    CHECK(run("permtest --p 5 --n 2 --b 1,0 --all-b").code == 2);
    CHECK(run("permtest --p 4 --n 2 --b 1,0").code == 2);
    CHECK(run("permtest --p 5 --n 3 --b 1,0,0 --scan-budget 10").code == 1);
    CHECK(run("permtest --p 5 --n 3 --b 1,0,0 --scan-budget 0").code == 2);
}

TEST_CASE("witness") {
    json found = run_json("witness --p 5 --n 3 --b 1,0,0 --cache " + cli_cache(), 0);
    CHECK(found.at("record") == "witness");
    CHECK(found.at("method") == "variety");
    CHECK(found.at("instance").at("p") == 5);

    json brute = run_json("witness --p 5 --n 3 --b 1,0,0 --method brute", 0);
    CHECK(brute.at("method") == "brute");

    json missing = run_json("witness --p 5 --n 2 --b 3,0", 1);
    CHECK(missing.at("record") == "witness_not_found");
    CHECK(missing.at("t") == 2);

    CHECK(run("witness --p 5 --n 2 --b 0,1").code == 2);   // trace 0
    CHECK(run("witness --p 5 --n 2 --b 5,0").code == 2);   // bad coordinate
    CHECK(run("witness --p 5 --n 2").code == 2);           // missing --b
}

TEST_CASE("count") {
    std::string dir = cli_cache();
    std::string polys = " --poly " + dir + "/n3_G.poly --poly " + dir + "/n3_Q.poly";

    json j = run_json("count --p 7 --t 6 --moore" + polys, 0);
    CHECK(j.at("record") == "count_report");
    CHECK(j.at("moore") == true);
    CHECK(j.at("t") == 6);
    CHECK(j.at("primary").at("count") == 61);
    CHECK(j.at("joint").at("count") == 1);
    CHECK(j.at("within_bound") == true);
    // 324 p with p = 7
    CHECK(j.at("intersection_bound") == "2268");

    json t2 = run_json("count --p 7 --t 2 --moore --workers 2" + polys, 0);
    CHECK(t2.at("primary").at("count") == 31);
    CHECK(t2.at("joint").at("count") == 7);

    // the parameter needs a value
    CHECK(run("count --p 7 --moore" + polys).code == 2);
    CHECK(run("count --p 7 --t 6 --moore --poly " + dir + "/nothere.poly").code == 2);
    CHECK(run("count --p 6 --t 5 --moore" + polys).code == 2);
    CHECK(run("count --p 7 --t 6 --moore --count-budget 10" + polys).code == 1);
}

TEST_CASE("top-level usage") {
    CHECK(run("").code == 2);
    CHECK(run("frobnicate").code == 2);
    CHECK(run("--help").code == 0);
    CHECK(run("--format yaml threshold --n 3").code == 2);
}

}  // TEST_SUITE
