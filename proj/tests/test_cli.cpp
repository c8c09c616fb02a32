#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "mmeq/cli.hpp"
#include "mmeq/core.hpp"
#include "mmeq/error.hpp"
#include "mmeq/json_io.hpp"
#include "support.hpp"

using namespace mmeq;
using testsup::Q;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code;
    std::string out, err;
};

RunResult run(std::vector<std::string> args, const std::string& stdin_text = "") {
    std::ostringstream out, err;
    std::istringstream in(stdin_text);
    auto* oldOut = std::cout.rdbuf(out.rdbuf());
    auto* oldErr = std::cerr.rdbuf(err.rdbuf());
    auto* oldIn = std::cin.rdbuf(in.rdbuf());
    int code = cli::run_command(std::move(args));
    std::cout.rdbuf(oldOut);
    std::cerr.rdbuf(oldErr);
    std::cin.rdbuf(oldIn);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path dir;
    TempDir() {
        static int counter = 0;
        dir = fs::temp_directory_path() /
              ("mmeq-cli-" + std::to_string(std::random_device{}()) + "-" +
               std::to_string(counter++));
        fs::create_directories(dir);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
    std::string file(const std::string& name, const std::string& content) const {
        fs::path p = dir / name;
        std::ofstream(p, std::ios::binary) << content;
        return p.string();
    }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

std::string read_file(const std::string& path) {
    std::ostringstream ss;
    ss << std::ifstream(path, std::ios::binary).rdbuf();
    return ss.str();
}

const char* kHz2 = R"({
  "kind": "hz",
  "n": 2,
  "utilities": [["1", "0"], ["1", "0"]],
  "budgets": ["3", "1"]
})";

const char* kNb2 = R"({
  "kind": "1dlad",
  "n": 2,
  "utilities": [["1", "0"], ["1", "0"]],
  "disagreement": ["1/2", "0"]
})";

const char* kAdhz2 = R"({
  "kind": "adhz",
  "n": 2,
  "utilities": [["1", "1"], ["1", "1"]],
  "endowments": [["1", "0"], ["0", "1"]]
})";

} // namespace

TEST_CASE("instance documents: canonical writing, digests, strict parsing") {
    AnyInstance inst = io::parse_instance(kHz2);
    const auto* hz = std::get_if<HZInstance>(&inst);
    REQUIRE(hz != nullptr);
    CHECK(hz->b == Vec{Q("3"), Q("1")});

    SUBCASE("write/parse round trip is the identity") {
        std::string text = io::write_instance(inst);
        AnyInstance again = io::parse_instance(text);
        CHECK(io::write_instance(again) == text);
        CHECK(io::instance_digest(again) == io::instance_digest(inst));
    }
    SUBCASE("digest: 16 hex chars, insensitive to comments") {
        std::string digest = io::instance_digest(inst);
        CHECK(digest.size() == 16);
        CHECK(digest.find_first_not_of("0123456789abcdef") == std::string::npos);
        std::string commented = std::string(kHz2);
        commented.insert(commented.rfind('}'), ", \"comment\": \"scratch note\"\n");
        CHECK(io::instance_digest(io::parse_instance(commented)) == digest);
    }
    SUBCASE("syntax errors carry the line number") {
        try {
            (void)io::parse_instance("{\n  \"kind\": \"hz\",\n  oops\n}");
            FAIL("expected SyntaxError");
        } catch (const Error& e) {
            CHECK(e.code() == "SyntaxError");
            CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        }
    }
    SUBCASE("schema errors name the offending field") {
        try {
            (void)io::parse_instance(R"({"kind": "hz", "n": 2,
                "utilities": [["1","0"],["1","0"]]})");
            FAIL("expected SchemaError");
        } catch (const Error& e) {
            CHECK(e.code() == "SchemaError");
            CHECK(std::string(e.what()).find("budgets") != std::string::npos);
        }
        try {
            (void)io::parse_instance(R"({"kind": "hz", "n": 1, "utilities": [["1"]],
                "budgets": ["1"], "extra": 5})");
            FAIL("expected SchemaError");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("extra") != std::string::npos);
        }
        try {
            (void)io::parse_instance(R"({"kind": "hz", "n": 1, "utilities": [["1/0"]],
                "budgets": ["1"]})");
            FAIL("expected SchemaError");
        } catch (const Error& e) {
            CHECK(e.code() == "SchemaError");
            CHECK(std::string(e.what()).find("utilities[0][0]") != std::string::npos);
        }
    }
    SUBCASE("numbers must be rational-strings") {
        CHECK_THROWS_AS((void)io::parse_instance(
                            R"({"kind": "hz", "n": 1, "utilities": [[1]], "budgets": ["1"]})"),
                        Error);
    }
}

TEST_CASE("solve/verify round trip: fixed-budget market") {
    TempDir tmp;
    std::string instPath = tmp.file("inst.json", kHz2);
    std::string outPath = tmp.path("result.json");

    RunResult solve = run({"solve", "--kind", "hz", "--input", instPath, "--output", outPath});
    REQUIRE(solve.code == 0);

    io::ResultDocument doc = io::parse_result(read_file(outPath));
    CHECK(doc.kind == "hz");
    CHECK(doc.prices == Vec{Q("4"), Q("0")});
    CHECK(doc.utilities == Vec{Q("3/4"), Q("1/4")});
    CHECK(doc.budgets == Vec{Q("3"), Q("1")});
    Mat want = {{Q("3/4"), Q("1/4")}, {Q("1/4"), Q("3/4")}};
    CHECK(doc.allocation == want);
    CHECK(doc.verdicts.pass());

    SUBCASE("verification passes and prints one line per check") {
        RunResult v = run(
            {"verify", "--kind", "hz", "--instance", instPath, "--result", outPath});
        CHECK(v.code == 0);
        CHECK(v.out.find("PASS within-budget") != std::string::npos);
        CHECK(v.out.find("PASS cheapest-optimal-bundle") != std::string::npos);
        CHECK(v.out.find("VERDICT: all") != std::string::npos);
    }
    SUBCASE("solving twice produces byte-identical documents") {
        std::string second = tmp.path("result2.json");
        run({"solve", "--kind", "hz", "--input", instPath, "--output", second});
        CHECK(read_file(outPath) == read_file(second));
    }
    SUBCASE("tampered utilities are caught by the document check") {
        doc.utilities[0] = Q("1");
        std::string tampered = tmp.file("tampered.json", io::write_result(doc));
        RunResult v = run(
            {"verify", "--kind", "hz", "--instance", instPath, "--result", tampered});
        CHECK(v.code == 1);
        CHECK(v.out.find("FAIL document-utilities-consistent") != std::string::npos);
    }
    SUBCASE("tampered allocation fails a named equilibrium check") {
        doc.allocation[0][0] = Q("1/2");
        std::string tampered = tmp.file("tampered.json", io::write_result(doc));
        RunResult v = run(
            {"verify", "--kind", "hz", "--instance", instPath, "--result", tampered});
        CHECK(v.code == 1);
        CHECK(v.out.find("FAIL") != std::string::npos);
    }
    SUBCASE("a result for a different instance is refused by digest") {
        std::string other = tmp.file("other.json", R"({
          "kind": "hz", "n": 2,
          "utilities": [["1", "0"], ["1", "0"]],
          "budgets": ["1", "1"]
        })");
        RunResult v = run(
            {"verify", "--kind", "hz", "--instance", other, "--result", outPath});
        CHECK(v.code == 2);
        CHECK(v.err.find("digest") != std::string::npos);
    }
    SUBCASE("kind flags must match the documents") {
        RunResult v = run(
            {"verify", "--kind", "1dlad", "--instance", instPath, "--result", outPath});
        CHECK(v.code == 2);
    }
    SUBCASE("stdin and stdout work as - paths") {
        RunResult piped =
            run({"solve", "--kind", "hz", "--input", "-", "--output", "-"}, kHz2);
        CHECK(piped.code == 0);
        io::ResultDocument viaPipe = io::parse_result(piped.out);
        CHECK(viaPipe.prices == doc.prices);
    }
}

TEST_CASE("solve/verify round trip: bargaining market") {
    TempDir tmp;
    std::string instPath = tmp.file("inst.json", kNb2);
    std::string outPath = tmp.path("result.json");

    RunResult solve = run({"solve", "--kind", "1dlad", "--input", instPath, "--output", outPath});
    REQUIRE(solve.code == 0);

    io::ResultDocument doc = io::parse_result(read_file(outPath));
    CHECK(doc.prices == Vec{Q("4"), Q("0")});
    CHECK(doc.offsets == Vec{Q("0"), Q("0")});
    CHECK(doc.utilities == Vec{Q("3/4"), Q("1/4")});
    // agent money = spend + offset: 3/4 * 4 = 3 and 1/4 * 4 = 1
    CHECK(doc.budgets == Vec{Q("3"), Q("1")});

    RunResult v = run({"verify", "--kind", "1dlad", "--instance", instPath, "--result", outPath});
    CHECK(v.code == 0);
    CHECK(v.out.find("PASS kkt-6-support-at-equality") != std::string::npos);

    SUBCASE("offsets carry the money in perfectly matchable markets") {
        std::string pmPath = tmp.file("pm.json", R"({
          "kind": "1dlad", "n": 2,
          "utilities": [["1", "0"], ["0", "1"]],
          "disagreement": ["1/2", "0"]
        })");
        std::string pmOut = tmp.path("pm-out.json");
        REQUIRE(run({"solve", "--kind", "1dlad", "--input", pmPath, "--output", pmOut}).code == 0);
        io::ResultDocument pm = io::parse_result(read_file(pmOut));
        CHECK(pm.prices == Vec{Q("0"), Q("0")});
        CHECK(pm.offsets == Vec{Q("2"), Q("1")});
        CHECK(pm.budgets == Vec{Q("2"), Q("1")});
        CHECK(pm.utilities == Vec{Q("1"), Q("1")});
    }
    SUBCASE("infeasible disagreement points exit 3 with a witness") {
        std::string badPath = tmp.file("bad.json", R"({
          "kind": "1dlad", "n": 2,
          "utilities": [["1", "0"], ["1", "0"]],
          "disagreement": ["2/3", "2/3"]
        })");
        RunResult r = run({"solve", "--kind", "1dlad", "--input", badPath, "--output", "-"});
        CHECK(r.code == 3);
        CHECK(r.err.find("error:") != std::string::npos);
        CHECK(r.err.find("witness: 0") != std::string::npos);
    }
}

TEST_CASE("solve/verify round trip: approximate exchange market") {
    TempDir tmp;
    std::string instPath = tmp.file("inst.json", kAdhz2);
    std::string outPath = tmp.path("result.json");

    RunResult solve = run({"solve", "--kind", "adhz", "--input", instPath, "--epsilon", "1/2",
                           "--trace", "--output", outPath});
    REQUIRE(solve.code == 0);

    io::ResultDocument doc = io::parse_result(read_file(outPath));
    CHECK(doc.prices == Vec{Q("37/64"), Q("37/64")});
    CHECK(doc.budgets == Vec{Q("37/64"), Q("37/64")});
    REQUIRE(doc.trace.size() == 3);
    CHECK(doc.trace[0].b == Vec{Q("1/4"), Q("1/4")});
    CHECK(doc.trace[1].p == Vec{Q("7/16"), Q("7/16")});

    SUBCASE("verification needs epsilon, accepts the window, honors --weak-core") {
        RunResult noEps = run(
            {"verify", "--kind", "adhz", "--instance", instPath, "--result", outPath});
        CHECK(noEps.code == 2);
        RunResult v = run({"verify", "--kind", "adhz", "--instance", instPath, "--result",
                           outPath, "--epsilon", "1/2"});
        CHECK(v.code == 0);
        CHECK(v.out.find("PASS budget-window-upper") != std::string::npos);
        RunResult wc = run({"verify", "--kind", "adhz", "--instance", instPath, "--result",
                            outPath, "--epsilon", "1/2", "--weak-core"});
        CHECK(wc.code == 0);
        CHECK(wc.out.find("PASS approx-weak-core") != std::string::npos);
    }
    SUBCASE("solve without epsilon is a usage error") {
        RunResult r = run({"solve", "--kind", "adhz", "--input", instPath, "--output", "-"});
        CHECK(r.code == 2);
    }
    SUBCASE("epsilon outside (0,1) is rejected") {
        RunResult r = run({"solve", "--kind", "adhz", "--input", instPath, "--epsilon", "3/2",
                           "--output", "-"});
        CHECK(r.code == 2);
        CHECK(r.err.find("epsilon") != std::string::npos);
    }
}

TEST_CASE("lottery subcommand: decomposition plus seeded draw") {
    TempDir tmp;
    std::string instPath = tmp.file("inst.json", kHz2);
    std::string outPath = tmp.path("result.json");
    REQUIRE(run({"solve", "--kind", "hz", "--input", instPath, "--output", outPath}).code == 0);

    RunResult r1 = run({"lottery", "--result", outPath, "--seed", "7"});
    REQUIRE(r1.code == 0);
    CHECK(r1.out.find("\"decomposition\"") != std::string::npos);
    CHECK(r1.out.find("\"sampled\"") != std::string::npos);
    CHECK(r1.out.find("\"3/4\"") != std::string::npos);
    CHECK(r1.out.find("\"1/4\"") != std::string::npos);

    RunResult r2 = run({"lottery", "--result", outPath, "--seed", "7"});
    CHECK(r2.out == r1.out); // same seed, same bytes
}

TEST_CASE("gen counterexample emits the parseable 10-agent market") {
    TempDir tmp;
    std::string outPath = tmp.path("cx.json");
    REQUIRE(run({"gen", "counterexample", "--output", outPath}).code == 0);

    AnyInstance inst = io::parse_instance(read_file(outPath));
    const auto* ad = std::get_if<ADHZInstance>(&inst);
    REQUIRE(ad != nullptr);
    CHECK(ad->n() == 10);
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
            CHECK(ad->e[i][j] == (i == j ? Q("1") : Q("0")));

    std::string second = tmp.path("cx2.json");
    run({"gen", "counterexample", "--output", second});
    CHECK(read_file(outPath) == read_file(second));
}

TEST_CASE("scale-prices rewrites the price vector around 1") {
    TempDir tmp;
    std::string instPath = tmp.file("inst.json", kHz2);
    std::string outPath = tmp.path("result.json");
    REQUIRE(run({"solve", "--kind", "hz", "--input", instPath, "--output", outPath}).code == 0);

    RunResult r = run({"scale-prices", "--result", outPath, "--factor", "1/2"});
    REQUIRE(r.code == 0);
    io::ResultDocument scaled = io::parse_result(r.out);
    CHECK(scaled.prices == Vec{Q("5/2"), Q("1/2")}); // 1 + (1/2)(p - 1)
    CHECK(scaled.allocation == io::parse_result(read_file(outPath)).allocation);

    RunResult bad = run({"scale-prices", "--result", outPath, "--factor", "0"});
    CHECK(bad.code == 2);
}

TEST_CASE("reduce hz-to-adhz: unit budgets become uniform endowments") {
    TempDir tmp;
    std::string unitPath = tmp.file("unit.json", R"({
      "kind": "hz", "n": 2,
      "utilities": [["1", "0"], ["1", "0"]],
      "budgets": ["1", "1"]
    })");
    RunResult r = run({"reduce", "hz-to-adhz", "--input", unitPath, "--output", "-"});
    REQUIRE(r.code == 0);
    AnyInstance reduced = io::parse_instance(r.out);
    const auto* ad = std::get_if<ADHZInstance>(&reduced);
    REQUIRE(ad != nullptr);
    for (const Vec& row : ad->e)
        for (const Rational& cell : row) CHECK(cell == Q("1/2"));

    SUBCASE("non-unit budgets cannot reduce") {
        std::string other = tmp.file("nonunit.json", kHz2);
        RunResult bad = run({"reduce", "hz-to-adhz", "--input", other, "--output", "-"});
        CHECK(bad.code == 2);
    }
    SUBCASE("the reduction solves and verifies as an exchange market") {
        std::string redPath = tmp.file("reduced.json", r.out);
        std::string solPath = tmp.path("red-result.json");
        REQUIRE(run({"solve", "--kind", "adhz", "--input", redPath, "--epsilon", "1/4",
                     "--output", solPath})
                    .code == 0);
        CHECK(run({"verify", "--kind", "adhz", "--instance", redPath, "--result", solPath,
                   "--epsilon", "1/4"})
                  .code == 0);
    }
}

TEST_CASE("audit misreports: truth-telling holds, infeasible lies are skipped") {
    TempDir tmp;
    std::string instPath = tmp.file("inst.json", kNb2);

    RunResult quick = run({"audit", "misreports", "--input", instPath});
    CHECK(quick.code == 0);
    CHECK(quick.out.find("0 profitable") != std::string::npos);

    RunResult full = run({"audit", "misreports", "--input", instPath, "--exhaustive"});
    CHECK(full.code == 0);
    CHECK(full.out.find("0 profitable") != std::string::npos);

    SUBCASE("lies that break feasibility are counted as skipped") {
        std::string tightPath = tmp.file("tight.json", R"({
          "kind": "1dlad", "n": 2,
          "utilities": [["1", "0"], ["0", "1"]],
          "disagreement": ["1/2", "1/2"]
        })");
        RunResult r = run({"audit", "misreports", "--input", tightPath, "--exhaustive"});
        CHECK(r.code == 0);
        CHECK(r.out.find("skipped") != std::string::npos);
        CHECK(r.out.find("0 profitable") != std::string::npos);
    }
    SUBCASE("the exhaustive sweep is capped at n = 8") {
        NBInstance big;
        big.u.assign(9, Vec(9, Q("0")));
        big.c.assign(9, Q("0"));
        for (int i = 0; i < 9; ++i) big.u[i][i] = Q("1");
        std::string bigPath = tmp.file("big.json", io::write_instance(AnyInstance{big}));
        RunResult r = run({"audit", "misreports", "--input", bigPath, "--exhaustive"});
        CHECK(r.code == 2);
    }
    SUBCASE("wrong instance kind is refused") {
        std::string hzPath = tmp.file("hz.json", kHz2);
        RunResult r = run({"audit", "misreports", "--input", hzPath});
        CHECK(r.code == 2);
    }
}

TEST_CASE("usage errors and help") {
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"solve", "--kind", "hz"}).code == 2);          // missing required flags
    CHECK(run({"solve", "--kind", "nope", "--input", "x", "--output", "y"}).code == 2);
    CHECK(run({}).code == 2);                                  // no subcommand
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"solve", "--kind", "hz", "--input", "/nonexistent/file.json",
               "--output", "-"})
              .code == 2); // IOError
}
