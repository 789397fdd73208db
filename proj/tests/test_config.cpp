#include <string>

#include "doctest.h"

#include "cpm/config.hpp"
#include "cpm/numerics.hpp"

using cpm::parse_config;
using cpm::RunConfig;

TEST_CASE("defaults and echo") {
    auto c = parse_config(R"({"ic": "gaussian-cosine"})");
    CHECK(c.flux == "burgers");
    CHECK(c.n == 2);
    CHECK(c.sampling == "equidistant");
    CHECK(c.postprocess);
    CHECK(c.ref_multiplier == 8);
    CHECK(c.fv_cfl == 0.9);
    auto echo = cpm::config_json(c);
    CHECK(echo.find("\"flux\"") != std::string::npos);
    CHECK(echo.find("\"burgers\"") != std::string::npos);
}

TEST_CASE("full document parses") {
    auto c = parse_config(R"({
        "flux": "quartic",
        "ic": "gaussian-cosine",
        "domain_lo": -3.0,
        "domain_hi": 3.0,
        "n": 200,
        "sampling": "adaptive",
        "t_end": 10.0,
        "output_times": [0.0, 1.0, 10.0],
        "postprocess": false,
        "audit_entropy": true,
        "shock_window_factor": 12.5,
        "output_dir": "results"
    })");
    CHECK(c.flux == "quartic");
    CHECK(c.n == 200);
    CHECK(c.sampling == "adaptive");
    CHECK(c.output_times.size() == 3);
    CHECK_FALSE(c.postprocess);
    CHECK(c.audit_entropy);
    CHECK(c.shock_window_factor == 12.5);
    CHECK(c.output_dir == "results");
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("unknown keys and wrong types are rejected") {
    CHECK_THROWS_AS(parse_config(R"({"fluxx": "burgers"})"), cpm::ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"n": "many"})"), cpm::ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"output_times": 3})"), cpm::ConfigError);
    CHECK_THROWS_AS(parse_config("not json"), cpm::ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"n": -5})"), cpm::ConfigError);
}

TEST_CASE("validation catches inconsistent setups") {
    auto base = parse_config(R"({"ic": "riemann", "t_end": 1.0})");
    CHECK_NOTHROW(base.validate());

    auto bad = base;
    bad.n = 1;
    CHECK_THROWS_AS(bad.validate(), cpm::ConfigError);

    bad = base;
    bad.sampling = "random";
    CHECK_THROWS_AS(bad.validate(), cpm::ConfigError);

    bad = base;
    bad.output_times = {0.5, 0.2};
    CHECK_THROWS_AS(bad.validate(), cpm::ConfigError);

    bad = base;
    bad.output_times = {2.0};  // past t_end
    CHECK_THROWS_AS(bad.validate(), cpm::ConfigError);

    bad = base;
    bad.fv_cfl = 0.95;
    CHECK_THROWS_AS(bad.validate(), cpm::ConfigError);

    bad = base;
    bad.ref_multiplier = 4;
    CHECK_THROWS_AS(bad.validate(), cpm::ConfigError);

    bad = base;
    bad.shock_window_factor = 0.0;
    CHECK_THROWS_AS(bad.validate(), cpm::ConfigError);
}

TEST_CASE("factories assemble the configured models") {
    auto c = parse_config(R"({
        "flux": "buckley-leverett",
        "ic": "buckley-jumps",
        "domain_lo": 0.0,
        "domain_hi": 2.0,
        "t_end": 0.4
    })");
    auto flux = cpm::make_flux(c);
    CHECK(flux.name() == "buckley-leverett");
    CHECK(flux.inflection_values().size() == 1);

    auto ic = cpm::make_ic(c);
    REQUIRE(ic.jumps.size() == 2);
    CHECK(ic.jumps[0].x == 0.5);
    CHECK(ic.jumps[0].left == 1.0);
    CHECK(ic.jumps[0].right == 0.0);
    CHECK(ic.jumps[1].x == 0.8);
    CHECK(ic.jumps[1].right == 0.3);

    auto src = cpm::make_source(c);
    CHECK(src.is_zero());

    auto c2 = parse_config(R"({
        "flux": "polynomial",
        "flux_coeffs": [0.0, 0.0, 0.5],
        "ic": "polynomial",
        "ic_coeffs": [1.0, 2.0],
        "source": "bottom-profile",
        "t_end": 1.0
    })");
    auto flux2 = cpm::make_flux(c2);
    CHECK(flux2.f(2.0) == doctest::Approx(2.0));
    auto ic2 = cpm::make_ic(c2);
    CHECK(ic2.value(0.5) == doctest::Approx(2.0));
    auto src2 = cpm::make_source(c2);
    CHECK_FALSE(src2.is_zero());
    CHECK(src2.x_discontinuities.size() == 2);

    auto c3 = parse_config(R"({"flux": "unknown-flux", "ic": "gaussian-cosine"})");
    CHECK_THROWS_AS(cpm::make_flux(c3), cpm::ConfigError);
    auto c4 = parse_config(R"({"ic": "unknown-ic"})");
    CHECK_THROWS_AS(cpm::make_ic(c4), cpm::ConfigError);
}
