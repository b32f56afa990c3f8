#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "sphcone/cli.hpp"
#include "sphcone/json_io.hpp"
#include "sphcone/report.hpp"

using namespace sphcone;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "sphcone");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& text) {
    const auto p = std::filesystem::temp_directory_path() / ("sphcone_cli_" + name);
    std::ofstream(p) << text;
    return p.string();
}

const std::string zsquared =
    R"({"alpha": 1.0, "num": [{"a": 2, "b": 0, "re": 1.0, "im": 0.0}], "den": [{"a": 0, "b": 0, "re": 1.0, "im": 0.0}]})";

// every verdict carries its measured value and tolerance
void check_shape(const json& j) {
    CHECK(j.at("schema") == report_schema);
    REQUIRE(j.at("checks").is_array());
    CHECK(!j["checks"].empty());
    bool all = true;
    for (const auto& c : j["checks"]) {
        CHECK(c.contains("value"));
        CHECK(c.contains("tolerance"));
        CHECK(c.contains("relation"));
        all = all && c.at("pass").get<bool>();
    }
    CHECK(j.at("pass").get<bool>() == all);
    CHECK(!j.contains("wall_time_s"));
}

}  // namespace

TEST_CASE("cones of z^2: two cones of angle 4 pi") {
    const auto path = temp_file("z2.json", zsquared);
    const auto r = run({"cones", "-f", path});
    CHECK(r.code == 0);
    const auto j = json::parse(r.out);
    check_shape(j);
    const auto& cones = j["results"]["cones"];
    REQUIRE(cones.size() == 2);
    for (const auto& c : cones) {
        CHECK(c["angle"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(c["angle_rad"].get<double>() == doctest::Approx(4 * pi).epsilon(1e-12));
    }
    CHECK(j["results"]["area_over_2pi"].get<double>() == doctest::Approx(4.0));
}

TEST_CASE("reproduce intro passes with a small residual") {
    const auto r = run({"reproduce", "intro", "--beta", "0.5", "--k", "2"});
    CHECK(r.code == 0);
    const auto j = json::parse(r.out);
    check_shape(j);
    CHECK(j["pass"].get<bool>());
    int residuals = 0;
    for (const auto& c : j["checks"])
        if (c["name"].get<std::string>().find("eigen residual") != std::string::npos) {
            ++residuals;
            CHECK(c["value"].get<double>() <= 1e-5);
            CHECK(c["tolerance"].get<double>() == 1e-5);
        }
    CHECK(residuals == 2);
}

TEST_CASE("reports are byte-stable; --timing adds the wall time") {
    const auto path = temp_file("z2b.json", zsquared);
    const auto a = run({"monodromy", "-f", path});
    const auto b = run({"monodromy", "-f", path});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    const auto c = run({"construct", "--m", "2", "--k", "2", "--alpha", "1.5", "--seed", "7"});
    const auto d = run({"construct", "--m", "2", "--k", "2", "--alpha", "1.5", "--seed", "7"});
    CHECK(c.code == 0);
    CHECK(c.out == d.out);
    check_shape(json::parse(c.out));
    const auto t = run({"--timing", "cones", "-f", path});
    CHECK(json::parse(t.out).contains("wall_time_s"));
}

TEST_CASE("a failing check exits 1 with a report") {
    // the first family has no admissible member in [1, 7]
    const auto r = run({"scan", "--lo", "1", "--hi", "7", "--samples", "60", "--exclude", "0", "--expect", "4"});
    CHECK(r.code == 1);
    const auto j = json::parse(r.out);
    check_shape(j);
    CHECK(!j["pass"].get<bool>());
}

TEST_CASE("a mathematical breakdown exits 1 with a diagnostic report") {
    // two cone points: no quadratic differential to build the surface from
    const auto path = temp_file("z2c.json", zsquared);
    const auto r = run({"weierstrass", "-f", path});
    CHECK(r.code == 1);
    const auto j = json::parse(r.out);
    check_shape(j);
    CHECK(!j["notes"].empty());
}

TEST_CASE("bad input exits 2 with a message") {
    CHECK(run({}).code == 2);
    CHECK(run({"bogus"}).code == 2);
    CHECK(run({"cones"}).code == 2);                                  // missing -f
    CHECK(run({"cones", "-f", "/nonexistent/map.json"}).code == 2);
    const auto bad = temp_file("bad.json", "{x");
    const auto r = run({"cones", "-f", bad});
    CHECK(r.code == 2);
    CHECK(r.out.empty());
    CHECK(!r.err.empty());
    const auto wrong = temp_file("wrong.json", R"({"alpha": 1.0, "num": []})");
    CHECK(run({"cones", "-f", wrong}).code == 2);
    CHECK(run({"scan", "--lo", "3", "--hi", "1"}).code == 2);
    CHECK(run({"scan", "--family", "nope"}).code == 2);
    CHECK(run({"reproduce", "ex9"}).code == 2);
    CHECK(run({"construct", "--m", "2", "--k", "2", "--alpha", "2"}).code == 2);  // alpha must lie below k - (m - 2)
}

TEST_CASE("scan writes CSV and -o writes the report") {
    const auto dir = std::filesystem::temp_directory_path();
    const auto csv = (dir / "sphcone_cli_scan.csv").string();
    const auto out = (dir / "sphcone_cli_scan.json").string();
    const auto r = run({"-o", out, "scan", "--lo", "-7", "--hi", "-1", "--samples", "61", "--expect", "-4", "--csv", csv});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream c(csv);
    std::string line;
    std::getline(c, line);
    CHECK(line == "b,abs_residue");
    int rows = 0;
    while (std::getline(c, line)) ++rows;
    CHECK(rows >= 50);
    std::ifstream o(out);
    const auto j = json::parse(o);
    check_shape(j);
    CHECK(j["pass"].get<bool>());
}
