#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "support.hpp"
#include "thzuav/absorption.hpp"
#include "thzuav/scenario.hpp"

using namespace thzuav;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const std::filesystem::path kDefaultFile = std::filesystem::path(THZUAV_SOURCE_DIR) / "scenarios" / "default.json";

nlohmann::json default_doc()
{
    std::ifstream in(kDefaultFile);
    return nlohmann::json::parse(in);
}

std::string validation_message(const nlohmann::json &doc)
{
    try
    {
        parse_scenario(doc.dump());
    }
    catch (const ValidationError &e)
    {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("absorption interpolates linearly and is exact at knots")
{
    AbsorptionTable table({{200e9, 0.01}, {300e9, 0.03}});
    CHECK_THAT(absorption_at(table, 250e9), WithinRel(0.02, 1e-14));
    CHECK(absorption_at(table, 200e9) == 0.01);
    CHECK(absorption_at(table, 300e9) == 0.03);
    CHECK_THROWS_AS(absorption_at(table, 150e9), AbsorptionRangeError);
    CHECK_THROWS_AS(absorption_at(table, 300.1e9), AbsorptionRangeError);
}

TEST_CASE("absorption is continuous across knots")
{
    AbsorptionTable table = default_absorption_table();
    for (std::size_t k = 1; k + 1 < table.samples().size(); k += 97)
    {
        double f = table.samples()[k].frequency_hz;
        double left = absorption_at(table, std::nextafter(f, 0.0));
        double right = absorption_at(table, std::nextafter(f, 1e30));
        CHECK_THAT(left, WithinAbs(table.samples()[k].k_per_m, 1e-12));
        CHECK_THAT(right, WithinAbs(table.samples()[k].k_per_m, 1e-12));
    }
}

TEST_CASE("absorption table rejects bad samples")
{
    CHECK_THROWS_AS(AbsorptionTable({{200e9, 0.01}, {200e9, 0.02}}), std::invalid_argument);
    CHECK_THROWS_AS(AbsorptionTable({{200e9, -0.01}}), std::invalid_argument);
    CHECK_THROWS_AS(AbsorptionTable(std::vector<AbsorptionSample>{}), std::invalid_argument);
}

TEST_CASE("synthesized absorption follows the Lorentzian sum")
{
    auto flat = synthesize_absorption({}, 0.005, 200e9, 400e9, 11);
    for (const auto &s : flat.samples())
        CHECK(s.k_per_m == 0.005);
    CHECK(absorption_at(flat, 333.3e9) == 0.005);

    const double baseline = 0.005;
    AbsorptionPeak peak{300e9, 0.1, 5e9};
    CHECK_THAT(lorentzian_profile({peak}, baseline, 300e9), WithinRel(baseline + 0.1, 1e-15));
    // height * w^2 / (w^2 + w^2) = height / 2
    CHECK_THAT(lorentzian_profile({peak}, baseline, 305e9), WithinRel(baseline + 0.05, 1e-14));

    auto table = synthesize_absorption({peak}, baseline, 200e9, 400e9, 201);
    CHECK_THAT(absorption_at(table, 300e9), WithinRel(baseline + 0.1, 1e-14));
    CHECK(table.min_frequency() == 200e9);
    CHECK(table.max_frequency() == 400e9);

    CHECK_THROWS_AS(synthesize_absorption({peak}, baseline, 400e9, 200e9, 10), std::invalid_argument);
    CHECK_THROWS_AS(synthesize_absorption({peak}, baseline, 200e9, 400e9, 0), std::invalid_argument);
    CHECK_THROWS_AS(synthesize_absorption({{300e9, 0.1, 0.0}}, baseline, 200e9, 400e9, 10), std::invalid_argument);
}

TEST_CASE("absorption CSV loads with an optional header")
{
    auto path = std::filesystem::temp_directory_path() / "thzuav_absorption_test.csv";
    {
        std::ofstream out(path);
        out << "frequency_hz,k_per_m\n200e9,0.01\n300e9,0.03\n";
    }
    auto table = load_absorption_csv(path);
    CHECK(table.samples().size() == 2);
    CHECK_THAT(absorption_at(table, 250e9), WithinRel(0.02, 1e-14));
    {
        std::ofstream out(path);
        out << "200e9,0.01\n300e9,oops\n";
    }
    CHECK_THROWS_AS(load_absorption_csv(path), std::runtime_error);
    std::filesystem::remove(path);
}

TEST_CASE("shipped default scenario")
{
    Scenario s = load_scenario(kDefaultFile);
    REQUIRE(s.band_count() == 20);
    CHECK(s.bands.front().center_hz == 205e9);
    CHECK(s.bands.back().center_hz == 395e9);
    for (const auto &b : s.bands)
    {
        CHECK(b.bandwidth_hz == 10e9);
        CHECK(b.center_hz - 0.5 * b.bandwidth_hz >= 200e9);
        CHECK(b.center_hz + 0.5 * b.bandwidth_hz <= 400e9);
    }
    CHECK(s.irs.nx == 8);
    CHECK(s.irs.nz == 10);
    CHECK(s.irs.spacing_x_m == 5e-3);
    CHECK(s.irs.spacing_z_m == 5e-3);
    CHECK(s.irs.anchor_z_m == 2.0);
    CHECK(s.uav.altitude_m == 10.0);
    CHECK(s.uav.max_power_w == 1.0);
    CHECK(s.uav.max_speed_mps == 2.0);
    CHECK(s.uav.horizon_s == 120.0);
    CHECK(s.uav.slots == 50);
    CHECK(s.ue_count() == 4);
    CHECK(s == default_scenario());

    double cx = s.irs.anchor_x_m + 0.5 * (s.irs.nx - 1) * s.irs.spacing_x_m;
    for (const auto &ue : s.ues)
    {
        CHECK(std::fabs(ue.x - cx) <= 20.0);
        CHECK(std::fabs(ue.y) <= 20.0);
        CHECK(ue.z == 0.0);
    }
}

TEST_CASE("validation names the violated invariant")
{
    auto doc = default_doc();
    doc["irs"]["nx"] = 0;
    CHECK_THAT(validation_message(doc), ContainsSubstring("N_x must be >= 1"));

    doc = default_doc();
    doc["bands"] = nlohmann::json::array({{{"center_hz", 300e9}, {"bandwidth_hz", 10e9}, {"absorption_per_m", 0.01}},
                                          {{"center_hz", 310e9}, {"bandwidth_hz", 10e9}, {"absorption_per_m", 0.01}}});
    doc.erase("ue_layout");
    doc["ues"] = nlohmann::json::array({{0.0, 1.0}, {2.0, 3.0}, {4.0, 5.0}});
    CHECK_THAT(validation_message(doc), ContainsSubstring("I must be >= U"));

    doc = default_doc();
    doc["uav"]["slots"] = 1;
    CHECK_THAT(validation_message(doc), ContainsSubstring("T must be >= 2"));

    doc = default_doc();
    doc["uav"]["max_power_w"] = 0.0;
    CHECK_THAT(validation_message(doc), ContainsSubstring("p_max must be > 0"));

    doc = default_doc();
    doc.erase("ue_layout");
    doc["ues"] = nlohmann::json::array({{0.0, 1.0, 2.0}});
    CHECK_THAT(validation_message(doc), ContainsSubstring("UE z-coordinate must be 0"));

    doc = default_doc();
    doc["irs"]["spacing_z_m"] = -1.0;
    CHECK_THAT(validation_message(doc), ContainsSubstring("delta_z must be > 0"));
}

TEST_CASE("malformed documents raise parse errors")
{
    CHECK_THROWS_AS(parse_scenario("{ not json"), ParseError);
    CHECK_THROWS_AS(parse_scenario(R"({"version": "v2"})"), ParseError);
    auto doc = default_doc();
    doc.erase("uav");
    CHECK_THROWS_AS(parse_scenario(doc.dump()), ParseError);
    doc = default_doc();
    doc["irs"]["nx"] = "eight";
    CHECK_THROWS_AS(parse_scenario(doc.dump()), ParseError);
}

TEST_CASE("scenarios round-trip through serialization")
{
    Scenario a = load_scenario(kDefaultFile);
    Scenario b = parse_scenario(serialize_scenario(a));
    CHECK(a == b);
    CHECK(serialize_scenario(a) == serialize_scenario(b));

    Scenario toy = testing::toy_scenario(3, 2, 4, 3, 2);
    toy.seed = 99;
    toy.tol.outer_rel = 0.5;
    toy.limits.search_radii = 3;
    CHECK(parse_scenario(serialize_scenario(toy)) == toy);
}

TEST_CASE("scenario digest is a stable content hash")
{
    Scenario a = default_scenario();
    std::string d = scenario_digest(a);
    CHECK(d.size() == 64);
    CHECK(d.find_first_not_of("0123456789abcdef") == std::string::npos);
    CHECK(scenario_digest(default_scenario()) == d);
    a.uav.max_power_w = 2.0;
    CHECK(scenario_digest(a) != d);
}

TEST_CASE("per-slot travel budget is positive")
{
    Scenario s = default_scenario();
    CHECK_THAT(s.uav.travel_budget_m(), WithinRel(2.0 * 120.0 / 50.0, 1e-15));
    CHECK(testing::toy_scenario(2, 1, 2).uav.travel_budget_m() > 0.0);
}

TEST_CASE("noise floor is -174 dBm/Hz")
{
    CHECK_THAT(thermal_noise_psd(), WithinRel(std::pow(10.0, -17.4) * 1e-3, 1e-14));
}
