#include <doctest.h>

#include <cmath>
#include <string>

#include "colsim/commands.hpp"

using namespace colsim;
using namespace colsim::cli;

namespace {

ExperimentConfig defaults() { return ExperimentConfig{}; }

bool message_contains(const std::exception& e, const std::string& needle) {
    return std::string(e.what()).find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("defaults match the reference qubit setup") {
    const ExperimentConfig config = defaults();
    CHECK(config.model.delta == 0.6);
    CHECK(config.model.lambda == 1.0);
    CHECK(config.model.barrier_length == 1.0);
    CHECK(config.model.mass == 0.1);
    CHECK(config.model.hbar == 1.0);
    CHECK(config.particle.beta == 0.1);
    CHECK(config.particle.dx == 1.0);
    CHECK(config.particle.x0 == -10.0);
    CHECK(config.map.backend == "approx");
    CHECK(config.map.nodes == 400);
    CHECK(config.map.p_cut_tolerance == 1e-14);
    CHECK(config.estimate.s_const == 0.01);
    CHECK_NOTHROW(config.validate());
}

TEST_CASE("configuration JSON round-trips") {
    ExperimentConfig config = defaults();
    config.run.gamma = 2.5;
    config.sweep.push_back({"gamma", 0.01, 10.0, 40, "log"});
    const auto j = config.to_json();
    const ExperimentConfig back = ExperimentConfig::from_json(j);
    CHECK(back.to_json() == j);
}

TEST_CASE("validation messages are field precise") {
    ExperimentConfig config = defaults();
    config.model.mass = -1.0;
    try {
        config.validate();
        FAIL("expected rejection");
    } catch (const ConfigError& e) {
        CHECK(message_contains(e, "model.mass"));
    }

    config = defaults();
    config.particle.dx = 0.02;  // violates the phase-space condition
    try {
        config.validate();
        FAIL("expected rejection");
    } catch (const ConfigError& e) {
        CHECK(message_contains(e, "4*pi*dx*sqrt(m/beta) >= hbar"));
    }

    CHECK_THROWS_AS(ExperimentConfig::from_json({{"mdoel", {{"delta", 1.0}}}}),
                    ConfigError);

    config = defaults();
    config.sweep.push_back({"mass", 0.1, 1.0, 4, "linear"});
    CHECK_THROWS_AS(config.validate(), ConfigError);
}

TEST_CASE("sweep axis grids hit both endpoints") {
    const SweepAxis lin{"gamma", 1.0, 5.0, 5, "linear"};
    const auto lin_values = lin.values();
    CHECK(lin_values.front() == 1.0);
    CHECK(lin_values.back() == 5.0);
    CHECK(lin_values[2] == doctest::Approx(3.0));

    const SweepAxis log{"gamma", 0.01, 10.0, 4, "log"};
    const auto log_values = log.values();
    CHECK(log_values.front() == 0.01);
    CHECK(log_values.back() == 10.0);
    CHECK(log_values[1] / log_values[0] == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("cmd_estimate evaluates the closed form") {
    ExperimentConfig config = defaults();
    const ResultTable table = cmd_estimate(config);
    REQUIRE(table.rows.size() == 1);
    CHECK(table.columns[4] == "estimate");
    CHECK(table.rows[0][4] == doctest::Approx(8.3183468252369776e-4).epsilon(1e-12));

    // Localization ratio between dx = 1 and dx = 10.
    config.sweep.push_back({"dx", 1.0, 10.0, 2, "linear"});
    const ResultTable swept = cmd_estimate(config);
    REQUIRE(swept.rows.size() == 2);
    CHECK(swept.rows[1][4] / swept.rows[0][4] ==
          doctest::Approx(std::exp(-0.0018 * 99.0)).epsilon(1e-12));
    CHECK(std::exp(-0.0018 * 99.0) == doctest::Approx(0.8367750517418029));
}

TEST_CASE("cmd_map_check convergence column shrinks with the node budget") {
    ExperimentConfig coarse = defaults();
    coarse.map.nodes = 16;
    ExperimentConfig fine = defaults();
    fine.map.nodes = 400;
    const double coarse_change = cmd_map_check(coarse).rows[0][7];
    const double fine_change = cmd_map_check(fine).rows[0][7];
    CHECK(fine_change < coarse_change);
}

TEST_CASE("cmd_map_check emits defect columns under threshold") {
    ExperimentConfig config = defaults();
    config.model.lambda = 0.0;
    const ResultTable table = cmd_map_check(config);
    REQUIRE(table.rows.size() == 1);
    const auto& row = table.rows[0];
    CHECK(row[0] <= 1e-10);  // trace defect (tail truncation only)
    CHECK(row[1] <= 1e-12);  // hermiticity
    CHECK(row[3] <= 1e-12);  // detailed balance
    CHECK(row[4] <= 1e-12);  // unitarity on the grid
    CHECK(row[5] <= 1e-12);  // modulus symmetry on the grid
    CHECK(table.metadata["threshold_exceeded"].get<bool>() == false);
}

TEST_CASE("cmd_steady single point equals the matching sweep row") {
    ExperimentConfig config = defaults();
    config.run.gamma = 2.0;
    const ResultTable steady = cmd_steady(config);

    ExperimentConfig sweep_config = defaults();
    sweep_config.sweep.push_back({"gamma", 2.0, 2.0, 1, "linear"});
    const ResultTable swept = cmd_sweep(sweep_config);

    REQUIRE(steady.rows.size() == 1);
    REQUIRE(swept.rows.size() == 1);
    REQUIRE(steady.columns == swept.columns);
    for (std::size_t c = 0; c < steady.columns.size(); ++c)
        CHECK(steady.rows[0][c] == swept.rows[0][c]);
}

TEST_CASE("cmd_steady solves a rate grid with one map build") {
    ExperimentConfig config = defaults();
    config.run.gamma_grid = {0.1, 1.0, 5.0, 10.0};
    const ResultTable table = cmd_steady(config);
    REQUIRE(table.rows.size() == 4);
    CHECK(table.metadata["map_builds"].get<int>() == 1);
    double previous = 0.0;
    for (const auto& row : table.rows) {
        CHECK(row[10] == 0.0);      // status
        CHECK(row[8] <= 1e-10);     // residual
        CHECK(row[7] > previous);   // |rho01| grows with gamma
        previous = row[7];
    }
}

TEST_CASE("cmd_sweep rebuilds the map only when the axes demand it") {
    ExperimentConfig config = defaults();
    config.sweep.push_back({"gamma", 0.01, 10.0, 40, "log"});
    const ResultTable table = cmd_sweep(config);
    REQUIRE(table.rows.size() == 40);
    CHECK(table.metadata["map_builds"].get<int>() == 1);

    // Rows arrive in deterministic grid order.
    for (std::size_t i = 1; i < table.rows.size(); ++i)
        CHECK(table.rows[i][0] > table.rows[i - 1][0]);

    // Low-rate limit approaches the thermal populations.
    CHECK(std::abs(table.rows[0][3] - 0.514996) <= 5e-3);
}

TEST_CASE("cmd_trajectory output schema and determinism") {
    ExperimentConfig config = defaults();
    config.run.gamma = 4.0;
    config.run.t_max = 3.0;
    config.run.sample_dt = 0.5;
    config.run.seed = 11;

    const ResultTable a = cmd_trajectory(config);
    const ResultTable b = cmd_trajectory(config);
    CHECK(a.to_csv() == b.to_csv());

    CHECK(a.columns == std::vector<std::string>{"t", "gamma_t", "rho00", "rho11",
                                                "re_rho01", "im_rho01", "abs_rho01",
                                                "collisions_so_far"});
    // gamma_t column is exactly gamma times t.
    for (const auto& row : a.rows) CHECK(row[1] == doctest::Approx(4.0 * row[0]));
    // Final collision count appears in the last row.
    CHECK(a.rows.back()[7] >= 0.0);

    config.run.seed = 12;
    const ResultTable c = cmd_trajectory(config);
    CHECK(a.to_csv() != c.to_csv());
}

TEST_CASE("ensemble trajectory output is worker-count independent") {
    ExperimentConfig config = defaults();
    config.run.gamma = 5.0;
    config.run.t_max = 1.0;
    config.run.sample_dt = 0.25;
    config.run.trajectories = 16;
    config.threads = 1;
    const ResultTable serial = cmd_trajectory(config);
    config.threads = 4;
    const ResultTable parallel = cmd_trajectory(config);
    // The config echo differs (threads), the numbers must not.
    CHECK(serial.to_csv() == parallel.to_csv());
}

TEST_CASE("metadata round-trip reproduces the table bit for bit") {
    ExperimentConfig config = defaults();
    config.run.gamma = 1.5;
    config.run.t_max = 2.0;
    config.run.sample_dt = 0.5;
    config.run.trajectories = 4;
    const ResultTable first = cmd_trajectory(config);

    const ExperimentConfig replay =
        ExperimentConfig::from_json(first.metadata["config"]);
    const ResultTable second = cmd_trajectory(replay);
    CHECK(first.to_csv() == second.to_csv());

    ExperimentConfig sweep_config = defaults();
    sweep_config.sweep.push_back({"gamma", 0.1, 10.0, 5, "log"});
    const ResultTable sweep_first = cmd_sweep(sweep_config);
    const ResultTable sweep_second =
        cmd_sweep(ExperimentConfig::from_json(sweep_first.metadata["config"]));
    CHECK(sweep_first.to_csv() == sweep_second.to_csv());
}

TEST_CASE("CSV formatting round-trips doubles and quotes reserved characters") {
    CHECK(std::stod(format_double(M_PI)) == M_PI);
    CHECK(std::stod(format_double(8.3183468252369776e-4)) == 8.3183468252369776e-4);

    ResultTable table;
    table.columns = {"plain", "needs,quote"};
    table.add_row({1.0, 2.0});
    const std::string csv = table.to_csv();
    CHECK(csv.find("plain,\"needs,quote\"\n") == 0);
    CHECK(csv.back() == '\n');
    CHECK(csv.find('\r') == std::string::npos);
}
