#include <string>

#include "doctest.h"
#include "helpers.hpp"
#include "vismem/config.hpp"

using namespace vismem;

TEST_SUITE("config") {

TEST_CASE("defaults survive an empty config") {
    RunConfig cfg = parse_config_text("");
    CHECK(cfg.memory.n == 100);
    CHECK(cfg.memory.gamma_w == 5.0);
    CHECK(cfg.memory.gamma_r == 5.0);
    CHECK(cfg.memory.seed == 7);
    CHECK(cfg.encoder.c == 64);
    CHECK(cfg.encoder.h == 12);
    CHECK(cfg.encoder.w == 12);
    CHECK(cfg.encoder.resize_w == 192);
    CHECK(cfg.encoder.seed == 11);
    CHECK(cfg.short_term.max_epochs == 10);
    CHECK(cfg.short_term.acc_threshold == 0.98);
    CHECK(cfg.short_term.patience == 3);
    CHECK((cfg.eval.deltas == std::vector<double>{1.0, 2.0, 3.0}));
    CHECK(cfg.eval.category_threshold == 1);
    CHECK(cfg.eval.stride == 1);
    CHECK_FALSE(cfg.eval.pessimistic_ties);
    validate_config(cfg);
}

TEST_CASE("keys parse into their sections") {
    RunConfig cfg = parse_config_text(
        "memory.n = 42\n"
        "memory.gamma_w = 2.5\n"
        "memory.seed = 1234\n"
        "encoder.kind = external-features\n"
        "encoder.c = 16\n"
        "encoder.resize_w = 96\n"
        "encoder.resize_h = 96\n"
        "short_term.max_epochs = 4\n"
        "eval.deltas = 1, 2.5, 4\n"
        "eval.pessimistic_ties = true\n"
        "paths.input = /data/in\n");
    CHECK(cfg.memory.n == 42);
    CHECK(cfg.memory.gamma_w == 2.5);
    CHECK(cfg.memory.seed == 1234);
    CHECK(cfg.encoder.kind == EncoderSpec::Kind::external_features);
    CHECK(cfg.encoder.c == 16);
    CHECK(cfg.encoder.resize_w == 96);
    CHECK(cfg.encoder.resize_h == 96);
    CHECK(cfg.short_term.max_epochs == 4);
    CHECK((cfg.eval.deltas == std::vector<double>{1.0, 2.5, 4.0}));
    CHECK(cfg.eval.pessimistic_ties);
    CHECK(cfg.paths.input == "/data/in");
}

TEST_CASE("comments and blank lines are ignored") {
    RunConfig cfg = parse_config_text(
        "# a comment\n"
        "\n"
        "memory.n = 9   # trailing comment\n"
        "   \n");
    CHECK(cfg.memory.n == 9);
}

TEST_CASE("unknown keys are rejected loudly") {
    CHECK_THROWS_WITH_AS(parse_config_text("memory.gamma = 1\n"),
                         doctest::Contains("memory.gamma"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("memry.n = 5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("just a line without equals\n"), ConfigError);
}

TEST_CASE("malformed values are rejected") {
    CHECK_THROWS_AS(parse_config_text("memory.n = five\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("memory.seed = -3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("memory.gamma_w = \n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("eval.pessimistic_ties = maybe\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("eval.deltas = 1,,2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("encoder.kind = resnet\n"), ConfigError);
}

TEST_CASE("validation enforces ranges") {
    RunConfig cfg;
    cfg.memory.n = 0;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    cfg = RunConfig{};
    cfg.memory.gamma_w = 0.0;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    cfg = RunConfig{};
    cfg.eval.deltas = {0.5};
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    cfg = RunConfig{};
    cfg.eval.deltas.clear();
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    cfg = RunConfig{};
    cfg.encoder.resize_w = 4;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    cfg = RunConfig{};
    cfg.encoder.h = 300;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    cfg = RunConfig{};
    cfg.short_term.max_epochs = 0;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    cfg = RunConfig{};
    cfg.eval.stride = 0;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
}

TEST_CASE("dump and parse round trip every field") {
    RunConfig cfg;
    cfg.memory.n = 17;
    cfg.memory.gamma_w = 1.2345678901234567;
    cfg.memory.gamma_r = 9.876;
    cfg.memory.seed = 987654321;
    cfg.encoder.kind = EncoderSpec::Kind::external_features;
    cfg.encoder.c = 32;
    cfg.encoder.h = 10;
    cfg.encoder.w = 14;
    cfg.encoder.seed = 5;
    cfg.encoder.resize_w = 100;
    cfg.encoder.resize_h = 80;
    cfg.short_term.max_epochs = 2;
    cfg.short_term.acc_threshold = 0.5;
    cfg.short_term.patience = 9;
    cfg.eval.deltas = {1.0, 1.5};
    cfg.eval.category_threshold = 2;
    cfg.eval.stride = 3;
    cfg.eval.pessimistic_ties = true;
    cfg.paths.input = "in.tsv";
    cfg.paths.labels = "l.tsv";

    std::string text = dump_config(cfg);
    RunConfig back = parse_config_text(text);
    CHECK(dump_config(back) == text);
    CHECK(back.memory.gamma_w == cfg.memory.gamma_w);
    CHECK(back.memory.seed == cfg.memory.seed);
    CHECK(back.encoder.resize_h == 80);
    CHECK((back.eval.deltas == cfg.eval.deltas));
    CHECK(back.paths.labels == "l.tsv");
    CHECK(back.eval.pessimistic_ties);
}

TEST_CASE("config files load from disk") {
    testutil::TempDir tmp("cfg");
    testutil::spit(tmp.file("run.cfg"), "memory.n = 3\nmemory.gamma_r = 2\n");
    RunConfig cfg = parse_config_file(tmp.file("run.cfg"));
    CHECK(cfg.memory.n == 3);
    CHECK(cfg.memory.gamma_r == 2.0);
    CHECK_THROWS_AS(parse_config_file(tmp.file("absent.cfg")), ConfigError);
}

}  // TEST_SUITE
