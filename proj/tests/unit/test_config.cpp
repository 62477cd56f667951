#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dunesim/config.hpp"

using namespace dunesim;

TEST_CASE("minimal config fills defaults") {
    const ParseResult r = parse_config("[grid]\ncount_x = 32\n[model]\nlambda = 0.5\nfinal_time = 0.1\n");
    REQUIRE(r.ok());
    const RunConfig& c = *r.config;
    CHECK(c.grid.dim == 1);
    CHECK(c.grid.counts[0] == 32);
    CHECK(c.model.lambda == 0.5);
    CHECK(c.model.final_time == 0.1);
    CHECK(c.model.cfl_number == 0.45);
    CHECK_FALSE(c.model.dt.has_value());
    CHECK(c.model.picard_iters == 1);
    CHECK(c.snapshot_every == 1);
    CHECK(c.output_dir == "out");
}

TEST_CASE("range error names the key and its line") {
    const ParseResult r = parse_config("[model]\n\nlambda = -1\n");
    REQUIRE(r.errors.size() == 1);
    CHECK(r.errors[0].key == "model.lambda");
    CHECK(r.errors[0].line == 3);
    CHECK(r.errors[0].column == 10);
    CHECK(r.errors[0].message.find("model.lambda") != std::string::npos);
    CHECK_FALSE(r.config.has_value());
}

TEST_CASE("every error is collected") {
    const ParseResult r = parse_config(
        "[grid]\ncount_x = abc\nnorm = hexagonal\n[model]\nlambda = 0\nh_profile = erf_smoothed\nh_epsilon = 2\n"
        "[nonsense]\nx = 1\n[solver]\nstrict = maybe\n");
    CHECK(r.errors.size() == 6);
    for (const auto& e : r.errors) CHECK(e.line > 0);
}

TEST_CASE("unknown key suggests the nearest valid key") {
    const ParseResult r = parse_config("[model]\nwindspeed = 3\n");
    REQUIRE(r.errors.size() == 1);
    const std::string& msg = r.errors[0].message;

    // Oracle: exhaustive comparison against every key in the section.
    std::string best;
    std::size_t best_d = 1000;
    for (const std::string& full : valid_config_keys()) {
        if (full.rfind("model.", 0) != 0) continue;
        const std::string key = full.substr(6);
        const std::size_t d = edit_distance("windspeed", key);
        if (d < best_d) {
            best_d = d;
            best = key;
        }
    }
    CHECK(msg.find("did you mean '" + best + "'") != std::string::npos);
}

TEST_CASE("edit distance") {
    CHECK(edit_distance("", "abc") == 3);
    CHECK(edit_distance("kitten", "sitting") == 3);
    CHECK(edit_distance("lambda", "lambda") == 0);
    CHECK(edit_distance("lamda", "lambda") == 1);
}

TEST_CASE("duplicate keys and malformed lines") {
    const ParseResult r = parse_config("[model]\nlambda = 1\nlambda = 2\njust words\n[grid\n");
    CHECK(r.errors.size() == 3);
}

TEST_CASE("cross-field checks") {
    CHECK_FALSE(parse_config("[source]\nkind = constant_patch\nx0 = 0.6\nx1 = 0.4\n").ok());
    CHECK_FALSE(parse_config("[source]\nkind = tabulated\n").ok());
    CHECK_FALSE(parse_config("[initial]\npreset = file\n").ok());
    CHECK_FALSE(parse_config("[model]\nh_profile = smooth_ramp\nkernel_radius = 0.001\n").ok());
    CHECK(parse_config("[model]\nh_profile = zero\nkernel_radius = 0.001\n").ok());
}

TEST_CASE("format and parse round trip") {
    const ParseResult r = parse_config(
        "seed = 99\n[grid]\ndim = 2\ncount_x = 17\nextent_x = 1.3\nnorm = anisotropic\n[model]\nlambda = 0.7\n"
        "h_profile = erf_smoothed\nh_epsilon = 0.03\ngamma_profile = saturating\ngamma_a = 2\ngamma_b = 0.1\n"
        "kernel = cosine_bump\nkernel_radius = 0.3\ndt = 0.001\n[source]\nkind = constant_patch\nrate = 0.1\n"
        "x0 = 0.2\nx1 = 0.4\ny0 = 0.1\ny1 = 0.9\n[initial]\npreset = dune\nlee_width = 0.1\n[verify]\nenabled = true\n");
    REQUIRE(r.ok());
    CHECK(r.config->grid.counts[1] == 17);  // count_y follows count_x in 2D
    const std::string text = format_config(*r.config);
    const ParseResult again = parse_config(text);
    REQUIRE(again.ok());
    CHECK(format_config(*again.config) == text);
    CHECK(config_entries(*again.config) == config_entries(*r.config));
    CHECK(again.config->model.h.param == 0.03);
    CHECK(*again.config->model.dt == 0.001);
}

TEST_CASE("initial presets") {
    const Grid g = Grid::make_1d(1.0, 63);
    InitialSpec s;
    s.preset = InitialSpec::Preset::cone;
    s.scale = 0.5;
    const HeightField cone = make_initial(s, g, 2.0, ".");
    CHECK(cone(31) == doctest::Approx(0.5));
    s.preset = InitialSpec::Preset::dune;
    s.center = 0.5;
    s.height = 0.1;
    s.width = 0.25;
    s.lee_width = 0.125;
    const HeightField dune = make_initial(s, g, 1.0, ".");
    CHECK(dune(31) == doctest::Approx(0.1));
    CHECK(dune(15) == doctest::Approx(0.1 * (1.0 - 0.25 / 0.25)).epsilon(1e-12));
    CHECK(dune(39) == doctest::Approx(0.1 * (1.0 - 0.125 / 0.125)).epsilon(1e-12));
    CHECK(dune(35) == doctest::Approx(0.05));
    s.preset = InitialSpec::Preset::hump;
    const HeightField hump = make_initial(s, g, 1.0, ".");
    CHECK(hump(31) == doctest::Approx(0.1));
    CHECK(hump(0) == 0.0);
}

TEST_CASE("prepare_run loads an initial field file") {
    RunConfig c;
    c.grid.dim = 2;
    c.grid.extents = {4.0, 4.0};
    c.grid.counts = {3, 3};
    c.model.lambda = 100.0;
    c.initial.preset = InitialSpec::Preset::file;
    c.initial.file = "snapshot_2d_3x3.csv";
    c.base_dir = DUNESIM_FIXTURE_DIR;
    const PreparedRun p = prepare_run(c);
    CHECK(p.u0(0, 0) == 1.0);
    CHECK(p.u0(2, 0) == 3.0);
    CHECK(p.u0(0, 2) == 21.0);
    c.initial.file = "missing.csv";
    CHECK_THROWS_AS(prepare_run(c), std::runtime_error);
}
