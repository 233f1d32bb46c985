#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "rnss/experiments.hpp"

using namespace rnss;

TEST_CASE("double formatting is shortest round-trip") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(5.0) == "5");
    CHECK(format_double(747.0755365655176) == "747.0755365655176");
    CHECK(format_double(-466.5063877128687) == "-466.5063877128687");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("sweep specs") {
    const auto list = parse_sweep_spec("1,21,41");
    REQUIRE(list.size() == 3);
    CHECK(list[1] == 21.0);

    const auto logspace = parse_sweep_spec("1:1000:4");
    REQUIRE(logspace.size() == 4);
    CHECK(logspace.front() == Catch::Approx(1.0));
    CHECK(logspace.back() == Catch::Approx(1000.0));
    CHECK(logspace[1] == Catch::Approx(10.0).epsilon(1e-9));

    CHECK_THROWS_AS(parse_sweep_spec("10:1:5"), ConfigError);
    CHECK_THROWS_AS(parse_sweep_spec("1:10:1"), ConfigError);
}

TEST_CASE("config parsing and hashing") {
    const std::string text =
        "# comment\n"
        "n = 3\n"
        "t=1\n"
        "sigma2_y=1000\n"
        "steps=5\n"
        "seed=7\n"
        "listen=127.0.0.1:9000,127.0.0.1:9001,127.0.0.1:9002\n"
        "out=/tmp/somewhere.csv\n";
    const auto cfg = config_from_map(parse_config_text(text));
    CHECK(cfg.n == 3);
    CHECK(cfg.t == 1);
    CHECK(cfg.sigma2_y == 1000.0);
    CHECK(cfg.listen.size() == 3);

    // the output path is not part of the cross-party contract
    auto other = cfg;
    other.out = "/elsewhere.csv";
    CHECK(config_hash(cfg) == config_hash(other));

    auto different = cfg;
    different.seed = 8;
    CHECK(config_hash(cfg) != config_hash(different));

    CHECK_THROWS_AS(config_from_map(parse_config_text("bogus=1\n")), ConfigError);
    CHECK_THROWS_AS(config_from_map(parse_config_text("n=3\nt=5\n")), ConfigError);

    const Matrix m = parse_matrix("1,2;3,4");
    CHECK(m(0, 1) == 2.0);
    CHECK(m(1, 0) == 3.0);
    CHECK_THROWS_AS(parse_matrix("1,2;3"), ConfigError);

    // the canonical form round-trips through the parser onto the same hash
    const auto reparsed = config_from_map(parse_config_text(canonical_config_text(cfg)));
    CHECK(config_hash(reparsed) == config_hash(cfg));
    CHECK(canonical_config_text(reparsed) == canonical_config_text(cfg));
}

TEST_CASE("accuracy sweep meets the per-operation targets") {
    ExperimentConfig cfg;
    cfg.sigma2_sweep = {0.0, 1.0, 1000.0};
    cfg.trials = 25;
    cfg.seed = 12;
    const auto rows = accuracy_sweep_rows(cfg);
    REQUIRE(rows.size() == 12);

    auto row = [&](double s2y, const std::string& op) {
        for (const auto& r : rows)
            if (r.sigma2_y == s2y && r.op == op) return r;
        FAIL("row not found");
        return rows[0];
    };

    // noise-free sharing is exact up to interpolation rounding
    for (const std::string op : {"recon", "add", "mult", "inv"})
        CHECK(row(0.0, op).rse_max <= 1e-10);

    CHECK(row(1.0, "recon").rse_median <= 1e-9);
    CHECK(row(1000.0, "mult").rse_median <= 1e-4);
    CHECK(row(1000.0, "recon").rse_median <= 1e-7);
    CHECK(row(1000.0, "inv").rse_median <= 1e-7);
}

TEST_CASE("mi sweep rows carry estimates below their bounds") {
    ExperimentConfig cfg;
    cfg.sigma2_sweep = {981.0};
    cfg.samples = 100000;
    cfg.seed = 5;
    const auto rows = mi_sweep_rows(cfg);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
        CHECK(r.estimate_bits >= 0.0);
        CHECK(r.estimate_bits <= r.bound_bits + 0.01);
    }
    // deep in the sweep a single share is essentially silent
    CHECK(rows[0].quantity == "single_share");
    CHECK(rows[0].estimate_bits <= 1e-4);

    std::ostringstream expect_header;
    CHECK(mi_sweep_csv(cfg).rfind("sigma2_y,quantity,mi_estimate_bits,mi_bound_bits,N\n", 0) ==
          0);
}

TEST_CASE("kalman experiment rows") {
    ExperimentConfig cfg;
    cfg.n = 3;
    cfg.t = 1;
    cfg.sigma2_y = 1000.0;
    cfg.steps = 6;
    cfg.seed = 77;

    DeskEngine engine(cfg.domain(), cfg.seed);
    const auto rows = kalman_experiment_rows(engine, cfg);
    REQUIRE(rows.size() == 6);
    for (int k = 0; k < 6; ++k) {
        CHECK(rows[static_cast<std::size_t>(k)].k == k);  // contiguous step index
        CHECK(rows[static_cast<std::size_t>(k)].io_cumulative ==
              static_cast<std::uint64_t>(27 * (k + 1)));
    }

    // simulated parties agree with the desk run byte for byte
    const std::string desk_csv = kalman_rows_csv(rows);
    CHECK(kalman_csv_simulated(cfg) == desk_csv);
    CHECK(kalman_csv_desk(cfg) == desk_csv);
}

TEST_CASE("kalman model overrides from config") {
    ExperimentConfig cfg;
    cfg.kalman_a = "1";
    cfg.kalman_b = "0";
    cfg.kalman_h = "1";
    cfg.kalman_q = "0.01";
    cfg.kalman_r = "1";
    const KalmanModel m = kalman_model_from_config(cfg);
    CHECK(m.state_dim() == 1);
    CHECK(m.measurement_dim() == 1);

    ExperimentConfig bad;
    bad.kalman_q = "1,0;0,1;0,0";  // not square
    CHECK_THROWS_AS(kalman_model_from_config(bad), DimensionMismatch);
}
