#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(FRACTLAB_CLI) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p);
    std::string out;
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof buf, p))
        out.append(buf, n);
    const int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string data(const std::string& name) { return std::string(FRACTLAB_DATA) + "/" + name; }

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// second field of the CSV summary row
double summary_value(const std::string& csv) {
    std::istringstream is(csv);
    std::string header, row;
    std::getline(is, header);
    std::getline(is, row);
    const auto a = row.find(','), b = row.find(',', a + 1);
    return std::stod(row.substr(a + 1, b - a - 1));
}

fs::path scratch() {
    const fs::path d = fs::temp_directory_path() / ("fractlab_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
}

} // namespace

TEST_CASE("dim formula", "[cli]") {
    const Run r = run("dim formula --kind assouad --seq " + data("cantor13.json") + " --kmax 40 --nmin 10 --nmax 40");
    REQUIRE(r.code == 0);
    CHECK_THAT(summary_value(r.out), Catch::Matchers::WithinAbs(std::log(2.0) / std::log(3.0), 1e-9));

    const fs::path d = scratch();
    const fs::path out = d / "report.csv";
    REQUIRE(run("dim formula --seq " + data("cantor13.json") + " --out " + out.string()).code == 0);
    CHECK(fs::exists(out));
    const json conv = json::parse(slurp(out.string() + ".json"));
    CHECK(conv["kind"] == "assouad_formula");
    CHECK(!conv["convergence"].empty());
    fs::remove_all(d);
}

TEST_CASE("malformed input exits with 2 and writes nothing", "[cli]") {
    const fs::path d = scratch();
    {
        std::ofstream f(d / "bad.json");
        f << "{\"kind\": ";
    }
    const fs::path out = d / "out.csv";
    CHECK(run("dim formula --seq " + (d / "bad.json").string() + " --out " + out.string()).code == 2);
    CHECK(!fs::exists(out));
    CHECK(!fs::exists(out.string() + ".json"));
    {
        std::ofstream f(d / "unknown.json");
        f << "{\"kind\": \"spiral\"}";
    }
    CHECK(run("check --seq " + (d / "unknown.json").string()).code == 2);
    CHECK(run("dim formula --seq " + data("cantor13.json") + " --nmin 0").code == 2);
    CHECK(run("frobnicate").code == 2);
    fs::remove_all(d);
}

TEST_CASE("domain errors exit with 3", "[cli]") {
    CHECK(run("build assouad-target --ratios 1/3 --s 0.5").code == 3);
    CHECK(run("build assouad-target --ratios 1/3 --s 1").code == 3);
    CHECK(run("cover --seq " + data("cantor13.json") + " --depth 2 --x 0 --R 0.1 --r 0.2").code == 3);
}

TEST_CASE("build manifests", "[cli]") {
    const Run a = run("build assouad-target --ratios 1/3 --s 0.8 --stages 6");
    REQUIRE(a.code == 0);
    const json ja = json::parse(a.out);
    CHECK(std::stod(ja["gamma"].get<std::string>()) == Catch::Approx(0.420448).margin(1e-6));
    CHECK(ja["all_pass"] == true);
    CHECK(ja["stages"].size() == 6);

    const Run l = run("build lower-target --ratios 1/3 --alpha 0.5 --depth 12");
    REQUIRE(l.code == 0);
    const json jl = json::parse(l.out);
    CHECK(jl["d"] == "0.25");
    CHECK(jl["k_table"].size() == 12);

    const Run c = run("build cantor --seq " + data("cantor13.json") + " --depth 2");
    REQUIRE(c.code == 0);
    const json jc = json::parse(c.out);
    REQUIRE(jc["residuals"].size() == 4);
    const double offsets[] = {0, 2.0 / 9, 2.0 / 3, 8.0 / 9};
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(std::stod(jc["residuals"][i]["lo"].get<std::string>()) == Catch::Approx(offsets[i]).margin(1e-11));

    const Run e = run("build example35 --K 10");
    REQUIRE(e.code == 0);
    CHECK(json::parse(e.out)["all_pass"] == true);
    CHECK(run("build decreasing --seq " + data("geometric_half.json") + " --count 4").code == 0);
}

TEST_CASE("check diagnostics", "[cli]") {
    const json g = json::parse(run("check --seq " + data("geometric_half.json")).out);
    CHECK(g["dim_A_Da"]["verdict"] == "zero");
    CHECK(g["epsilon_star"]["value"] == "1");
    const json c = json::parse(run("check --seq " + data("cantor13.json")).out);
    CHECK(c["dim_A_Da"]["verdict"] == "one");
    CHECK(c["tau_star"]["value"] == "3");
    const json e = json::parse(run("check --seq " + data("example35_k10.json")).out);
    CHECK(e["example35"]["all_pass"] == true);
}

TEST_CASE("map and cover", "[cli]") {
    const Run m = run("map --seq " + data("explicit_three.json") + " --target " + data("explicit_three_b.json") +
                      " --arrangement decreasing --floor 0.1");
    REQUIRE(m.code == 0);
    CHECK(m.out.find("0.5,0.3\n") != std::string::npos);
    const Run c = run("cover --seq " + data("cantor13.json") + " --depth 6 --x 0 --R 2^-1.58496250072 --r 2^-6.33985000288");
    REQUIRE(c.code == 0);
    const json jc = json::parse(c.out);
    CHECK(jc["lower"] == jc["upper"]);
    CHECK(jc["certified"] == true);
}

TEST_CASE("repeated runs are byte-identical", "[cli]") {
    for (const std::string& args :
         {"dim empirical --seq " + data("cantor13.json") + " --arrangement random --depth 10 --seed 3 --nmin 4",
          std::string("build assouad-target --ratios 1/3 --s 0.8 --stages 4")}) {
        const Run a = run(args), b = run(args);
        REQUIRE(a.code == 0);
        CHECK(a.out == b.out);
    }
}
