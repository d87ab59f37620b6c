#include <doctest.h>

#include <string>

#include "nlstring/config.hpp"

using namespace nlstring;
using cli::ConfigError;
using cli::RunConfig;

TEST_CASE("minimal config: given keys stick, the rest take defaults") {
    const auto c = cli::parse_config_text("L=6.2831853\nv=1.0\ngamma=0.01\nsigma=0.1\n");
    CHECK(c.string_params.length == 6.2831853);
    CHECK(c.string_params.gamma == 0.01);
    CHECK(c.quantum.cutoff == 3);
    CHECK(c.quantum.max_phonons == 4);
    CHECK(!c.quantum.momentum_sector.has_value());
    CHECK(c.classical.grid == 256);
    CHECK(c.output.format == cli::OutputConfig::Format::csv);
    CHECK(c.output.path == "out");

    // derived defaults
    CHECK(c.effective_dt() == doctest::Approx(1e-3 * 6.2831853));
    CHECK(c.effective_t_end() == doctest::Approx(6.2831853));
}

TEST_CASE("comments, blank lines, and whitespace are tolerated") {
    const auto c = cli::parse_config_text(
        "# a comment\n\n  L = 3.0 \n\tquantum.cutoff=2\nclassical.reduction=off\n");
    CHECK(c.string_params.length == 3.0);
    CHECK(c.quantum.cutoff == 2);
    CHECK(c.classical.reduction == cli::ClassicalConfig::Reduction::off);
}

TEST_CASE("config errors name the key and the lines involved") {
    CHECK_THROWS_WITH_AS(cli::parse_config_text("quantum.cutoff=0\n"),
                         doctest::Contains("quantum.cutoff"), ConfigError);

    CHECK_THROWS_WITH_AS(cli::parse_config_text("L=1\ngamma=0\nL=2\n"),
                         doctest::Contains("lines 1 and 3"), ConfigError);

    CHECK_THROWS_WITH_AS(cli::parse_config_text("bogus.key=1\n"),
                         doctest::Contains("unknown key 'bogus.key'"), ConfigError);

    CHECK_THROWS_WITH_AS(cli::parse_config_text("L\n"), doctest::Contains("key=value"),
                         ConfigError);

    CHECK_THROWS_WITH_AS(cli::parse_config_text("gamma=abc\n"),
                         doctest::Contains("not a number"), ConfigError);

    CHECK_THROWS_WITH_AS(cli::parse_config_text("classical.grid=100\n"),
                         doctest::Contains("classical.grid"), ConfigError);

    CHECK_THROWS_AS(cli::load_config("/nonexistent/path.cfg"), ConfigError);
}

TEST_CASE("overrides reuse the key table and validation") {
    RunConfig c;
    cli::apply_overrides(c, {"gamma=0.5", "quantum.momentum_sector=-2", "output.format=json"});
    CHECK(c.string_params.gamma == 0.5);
    CHECK(c.quantum.momentum_sector == -2);
    CHECK(c.output.format == cli::OutputConfig::Format::json);

    CHECK_THROWS_AS(cli::apply_overrides(c, {"nope=1"}), ConfigError);
    CHECK_THROWS_AS(cli::apply_overrides(c, {"gamma"}), ConfigError);
    CHECK_THROWS_AS(cli::apply_overrides(c, {"quantum.cutoff=0"}), ConfigError);
}

TEST_CASE("key-value echo reparses to an equal config") {
    RunConfig c;
    cli::apply_overrides(c, {"gamma=0.0123456789012345", "sigma=0.25", "quantum.cutoff=5",
                             "quantum.momentum_sector=1", "classical.dt=0.00625",
                             "classical.reduction=off", "output.path=results/run1"});
    std::string text;
    for (const auto& [k, v] : c.to_key_values()) text += k + "=" + v + "\n";
    const RunConfig back = cli::parse_config_text(text);
    CHECK(back == c);
}
