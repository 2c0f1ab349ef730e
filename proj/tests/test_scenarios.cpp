#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "ypde/scenario.hpp"

using namespace ypde;

TEST_CASE("parse_config: minimal S1 fills the defaults") {
    auto res = parse_config("scenario = S1\n");
    REQUIRE(res.ok());
    CHECK(res.config->n == 4096);
    CHECK(res.config->d == 128);
    CHECK(res.config->seeds == std::vector<std::uint64_t>({1, 2, 3, 4, 5}));
    CHECK(res.config->operator_kind == "p_laplace");
    CHECK(res.config->driver_kind == "additive_fbm");
}

TEST_CASE("parse_config: scenario-driven defaults") {
    auto s2 = parse_config("scenario = S2\n");
    REQUIRE(s2.ok());
    CHECK(s2.config->driver_kind == "young");
    CHECK(s2.config->hurst > 0.75);
    auto s4 = parse_config("scenario = S4\n");
    REQUIRE(s4.ok());
    CHECK(s4.config->operator_kind == "porous_medium");
}

TEST_CASE("parse_config: rejections") {
    SUBCASE("Hurst outside (0,1)") {
        auto res = parse_config("scenario = S1\nhurst = 1.2\n");
        REQUIRE(!res.ok());
        bool found = false;
        for (auto& e : res.errors) found = found || e.find("Hurst in (0,1)") != std::string::npos;
        CHECK(found);
    }
    SUBCASE("zero mollification") {
        auto res = parse_config("scenario = S5\neps = 0\n");
        REQUIRE(!res.ok());
        bool found = false;
        for (auto& e : res.errors)
            found = found || e.find("mollification must be positive") != std::string::npos;
        CHECK(found);
    }
    SUBCASE("additive regime needs Hurst above 1/2") {
        auto res = parse_config("scenario = S1\nhurst = 0.4\n");
        REQUIRE(!res.ok());
        bool found = false;
        for (auto& e : res.errors) found = found || e.find("gamma > 1/2") != std::string::npos;
        CHECK(found);
    }
    SUBCASE("unknown keys are itemized") {
        auto res = parse_config("scenario = S1\nbogus = 3\nhurst = 2\n");
        REQUIRE(!res.ok());
        CHECK(res.errors.size() >= 2);
    }
    SUBCASE("young regime needs Hurst above 3/4") {
        auto res = parse_config("scenario = S2\nhurst = 0.6\n");
        CHECK(!res.ok());
    }
}

TEST_CASE("config hash is canonical and order-insensitive") {
    auto a = parse_config("scenario = S1\nn = 512\nd = 16\nseeds = 1,2\n");
    auto b = parse_config("seeds = 1,2\nd = 16\nn = 512\nscenario = S1\n");
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    CHECK(a.config->hash() == b.config->hash());
    auto c = parse_config("scenario = S1\nn = 1024\nd = 16\nseeds = 1,2\n");
    REQUIRE(c.ok());
    CHECK(a.config->hash() != c.config->hash());
}

TEST_CASE("run_scenario: S6 battery passes and is deterministic") {
    namespace fs = std::filesystem;
    auto res = parse_config("scenario = S6\nn = 2048\nseeds = 3\nout = /tmp/ypde_test_s6\n");
    REQUIRE(res.ok());
    fs::remove_all("/tmp/ypde_test_s6");
    auto m1 = run_scenario(*res.config);
    CHECK(m1.pass);
    REQUIRE(m1.runs.size() == 1);
    CHECK(m1.runs[0].flags.at("young_chain_rule"));
    CHECK(m1.runs[0].flags.at("bochner_identification"));
    CHECK(m1.runs[0].flags.at("identity_chain_rule"));

    // byte-identical CSV on rerun
    std::ifstream f1("/tmp/ypde_test_s6/S6/seed3/young_chain.csv");
    std::string first((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    auto m2 = run_scenario(*res.config);
    std::ifstream f2("/tmp/ypde_test_s6/S6/seed3/young_chain.csv");
    std::string second((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(first == second);
    CHECK(m1.config_hash == m2.config_hash);
}

TEST_CASE("run_scenario: desk-scale S1 passes its audits") {
    auto res = parse_config(
        "scenario = S1\nn = 512\nd = 32\nseeds = 1,2\nt_final = 0.5\nout = /tmp/ypde_test_s1\n");
    REQUIRE(res.ok());
    auto manifest = run_scenario(*res.config);
    CHECK(manifest.pass);
    for (auto& r : manifest.runs) {
        CHECK(r.flags.at("monotone_contraction"));
        CHECK(r.flags.at("gronwall_ratio"));
        CHECK(r.flags.at("energy_inequality"));
        CHECK(std::isfinite(r.constants.at("fitted_constant")));
    }
    // every referenced file exists (paths are relative to the output root)
    for (auto& r : manifest.runs)
        for (auto& f : r.files)
            CHECK(std::filesystem::exists(std::filesystem::path(res.config->out_dir) / f));
}

TEST_CASE("convergence_table: heat study reports first-order rates") {
    auto res = parse_config("scenario = S1\nd = 32\nseeds = 1\n");
    REQUIRE(res.ok());
    auto csv = convergence_table(*res.config, 3);
    // parse the rate column of the last row
    std::istringstream is(csv);
    std::string line, last;
    std::getline(is, line);
    CHECK(line == "level,n,error,rate");
    std::vector<double> rates;
    while (std::getline(is, line)) {
        auto pos = line.rfind(',');
        std::string rate = line.substr(pos + 1);
        if (rate != "na" && rate != "exact") rates.push_back(std::stod(rate));
    }
    REQUIRE(!rates.empty());
    for (double r : rates) {
        CHECK(r >= 0.9);
        CHECK(r <= 1.1);
    }
    CHECK_THROWS(convergence_table(*res.config, 2));
}

TEST_CASE("convergence_table: S6 sewing study and exact rows") {
    auto res = parse_config("scenario = S6\nseeds = 1\n");
    REQUIRE(res.ok());
    auto csv = convergence_table(*res.config, 3);
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    int exact_rows = 0;
    std::vector<double> rates;
    while (std::getline(is, line)) {
        auto pos = line.rfind(',');
        std::string rate = line.substr(pos + 1);
        if (rate == "exact")
            ++exact_rows;
        else if (rate != "na")
            rates.push_back(std::stod(rate));
    }
    CHECK(exact_rows == 3);
    for (double r : rates) CHECK(r >= 0.9);
}
