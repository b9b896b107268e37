#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "negcall/scenario.hpp"

using namespace negcall;

TEST_CASE("scenario defaults") {
    const ScenarioConfig cfg;
    CHECK(cfg.claim == "atm_call");
    CHECK(cfg.backend == Backend::euler_qv);
    CHECK(cfg.n_steps == 4096);
    CHECK(cfg.tau_max == 40.0);
    CHECK(cfg.n_paths == 10000);
    CHECK(cfg.seed == 12345);
    CHECK(cfg.alpha == 0.01);
    CHECK((cfg.ruin_levels == std::vector<double>{1.0, 5.0, 10.0}));
    CHECK(cfg.output_dir == "out");
    CHECK(cfg.format == OutFormat::both);
    CHECK(cfg.bridge_correction);
    CHECK(cfg.threads == 0);
    CHECK((cfg.n_list == std::vector<std::size_t>{64, 128, 256, 512, 1024, 2048, 4096}));
    CHECK(cfg.converge_paths == 10000);
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("backend and format names round-trip") {
    for (const Backend b : {Backend::euler_qv, Backend::euler_uniform_t, Backend::exact_law})
        CHECK(parse_backend(backend_name(b)) == b);
    for (const OutFormat f : {OutFormat::csv, OutFormat::json, OutFormat::both})
        CHECK(parse_format(format_name(f)) == f);
    CHECK_THROWS_AS(parse_backend("euler"), ConfigError);
    CHECK_THROWS_AS(parse_format("yaml"), ConfigError);
}

TEST_CASE("key-value application covers every setting") {
    ScenarioConfig cfg;
    apply_key_value(cfg, "claim", "digital_call");
    CHECK(cfg.claim == "digital_call");
    apply_key_value(cfg, "backend", "exact_law");
    CHECK(cfg.backend == Backend::exact_law);
    apply_key_value(cfg, "n_steps", "512");
    CHECK(cfg.n_steps == 512);
    apply_key_value(cfg, "tau_max", "12.5");
    CHECK(cfg.tau_max == 12.5);
    apply_key_value(cfg, "n_paths", "777");
    CHECK(cfg.n_paths == 777);
    apply_key_value(cfg, "seed", "18446744073709551615");  // full 64-bit range
    CHECK(cfg.seed == 18446744073709551615ull);
    apply_key_value(cfg, "alpha", "0.05");
    CHECK(cfg.alpha == 0.05);
    apply_key_value(cfg, "ruin_levels", "2, 4,8");
    CHECK((cfg.ruin_levels == std::vector<double>{2.0, 4.0, 8.0}));
    apply_key_value(cfg, "output_dir", "results/run1");
    CHECK(cfg.output_dir == "results/run1");
    apply_key_value(cfg, "format", "csv");
    CHECK(cfg.format == OutFormat::csv);
    apply_key_value(cfg, "bridge_correction", "off");
    CHECK_FALSE(cfg.bridge_correction);
    apply_key_value(cfg, "bridge_correction", "1");
    CHECK(cfg.bridge_correction);
    apply_key_value(cfg, "threads", "4");
    CHECK(cfg.threads == 4);
    apply_key_value(cfg, "n_list", "256,64,128,64");  // sorted and deduplicated
    CHECK((cfg.n_list == std::vector<std::size_t>{64, 128, 256}));
    apply_key_value(cfg, "converge_paths", "5000");
    CHECK(cfg.converge_paths == 5000);

    // keys and values are trimmed
    apply_key_value(cfg, "  claim ", "  atm_call  ");
    CHECK(cfg.claim == "atm_call");
}

TEST_CASE("key-value rejection") {
    ScenarioConfig cfg;
    CHECK_THROWS_AS(apply_key_value(cfg, "path_count", "10"), ConfigError);
    CHECK_THROWS_AS(apply_key_value(cfg, "n_steps", "12x"), ConfigError);
    CHECK_THROWS_AS(apply_key_value(cfg, "n_steps", "3.5"), ConfigError);
    CHECK_THROWS_AS(apply_key_value(cfg, "n_steps", ""), ConfigError);
    CHECK_THROWS_AS(apply_key_value(cfg, "threads", "-4"), ConfigError);
    CHECK_THROWS_AS(apply_key_value(cfg, "bridge_correction", "maybe"), ConfigError);
    CHECK_THROWS_AS(apply_key_value(cfg, "ruin_levels", "1,,5"), ConfigError);
    CHECK_THROWS_AS(apply_key_value(cfg, "ruin_levels", ""), ConfigError);
    CHECK_THROWS_AS(apply_key_value(cfg, "backend", "monte_carlo"), ConfigError);
    CHECK_THROWS_AS(apply_key_value(cfg, "format", "parquet"), ConfigError);
}

TEST_CASE("scenario validation") {
    const auto broken = [](auto mutate) {
        ScenarioConfig cfg;
        mutate(cfg);
        return cfg;
    };
    CHECK_THROWS_AS(broken([](auto& c) { c.n_steps = 1; }).validate(), ConfigError);
    CHECK_THROWS_AS(broken([](auto& c) { c.tau_max = 0.0; }).validate(), ConfigError);
    CHECK_THROWS_AS(broken([](auto& c) { c.n_paths = 0; }).validate(), ConfigError);
    CHECK_THROWS_AS(broken([](auto& c) { c.alpha = 0.5; }).validate(), ConfigError);
    CHECK_THROWS_AS(broken([](auto& c) { c.alpha = 0.0; }).validate(), ConfigError);
    CHECK_THROWS_AS(broken([](auto& c) { c.ruin_levels = {}; }).validate(), ConfigError);
    CHECK_THROWS_AS(broken([](auto& c) { c.ruin_levels = {-1.0}; }).validate(), ConfigError);
    CHECK_THROWS_AS(broken([](auto& c) { c.n_list = {}; }).validate(), ConfigError);
    CHECK_THROWS_AS(broken([](auto& c) { c.n_list = {1}; }).validate(), ConfigError);
    CHECK_THROWS_AS(broken([](auto& c) { c.converge_paths = 1; }).validate(), ConfigError);
    CHECK_THROWS_AS(broken([](auto& c) { c.output_dir = ""; }).validate(), ConfigError);
    CHECK_THROWS_AS(broken([](auto& c) { c.claim = "swaption"; }).validate(), ConfigError);
    CHECK_NOTHROW(broken([](auto& c) { c.backend = Backend::exact_law; }).validate());
}

TEST_CASE("grid spec follows the backend") {
    ScenarioConfig cfg;
    cfg.n_steps = 128;
    cfg.tau_max = 7.0;
    const GridSpec qv = cfg.grid_spec();
    CHECK(qv.kind == GridKind::uniform_qv);
    CHECK(qv.n_steps == 128);
    CHECK(qv.tau_max == 7.0);
    cfg.backend = Backend::euler_uniform_t;
    CHECK(cfg.grid_spec().kind == GridKind::uniform_t);
    cfg.backend = Backend::exact_law;
    CHECK_THROWS_AS(cfg.grid_spec(), ConfigError);
}

TEST_CASE("config file loading") {
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "negcall_scenario_test.cfg";
    {
        std::ofstream out(path);
        out << "# full-scale run\n";
        out << "\n";
        out << "claim = digital_call\n";
        out << "n_paths=2500   # inline comment\n";
        out << "  backend =  euler_uniform_t\n";
        out << "alpha = 0.45\n";
        out << "n_list = 64, 32\n";
    }
    const ScenarioConfig cfg = load_config_file(path.string());
    CHECK(cfg.claim == "digital_call");
    CHECK(cfg.n_paths == 2500);
    CHECK(cfg.backend == Backend::euler_uniform_t);
    CHECK(cfg.alpha == 0.45);
    CHECK((cfg.n_list == std::vector<std::size_t>{32, 64}));
    CHECK(cfg.n_steps == 4096);  // untouched keys keep their defaults
    CHECK_NOTHROW(cfg.validate());

    {
        std::ofstream out(path);
        out << "claim digital_call\n";  // no '='
    }
    CHECK_THROWS_AS(load_config_file(path.string()), ConfigError);

    {
        std::ofstream out(path);
        out << "alpha = 0.9\n";  // loads fine; validation is a separate step
    }
    const ScenarioConfig lax = load_config_file(path.string());
    CHECK(lax.alpha == 0.9);
    CHECK_THROWS_AS(lax.validate(), ConfigError);

    fs::remove(path);
    CHECK_THROWS_AS(load_config_file(path.string()), ConfigError);
}
