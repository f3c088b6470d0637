#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "zakmul/config.hpp"
#include "zakmul/sim.hpp"

using namespace zakmul;

namespace {

ExperimentConfig parse(const std::string& body) { return parse_config("schema = 1\n" + body); }

// Few trials, SNR axis, both modes; small enough for a unit test.
ExperimentConfig tiny_link() {
    return parse(R"(
[run]
master_seed = 7
trials = 3
[link]
users = 1, 3
mode = both
[sweep]
axis = snr_db
values = 10, 30
)");
}

}  // namespace

TEST_CASE("config defaults and overrides") {
    const auto d = parse("");
    CHECK(d.trials == 2000);
    CHECK(d.nu_max_hz == 815.0);
    CHECK(d.filter == PulseKind::sinc);
    CHECK(d.values.size() == 7);

    const auto c = parse(R"(
# comment line
[run]
master_seed = 42   # trailing comment
engine = oracle
[scenario]
filter = rrc
rrc_beta = 0.25
[channel]
profile = ideal
nu_max_hz = 6000
[link]
users = 2,4
mode = multiuser
[sweep]
axis = pdr_db
values = -10, -5, 0, 5
[leakage]
filters = sinc
[validate]
inject_fault = corrupt_tap
)");
    CHECK(c.master_seed == 42);
    CHECK(c.engine == Engine::oracle);
    CHECK(c.filter == PulseKind::rrc);
    CHECK(c.rrc_beta == 0.25);
    CHECK(c.profile == ChannelProfile::ideal);
    CHECK(c.nu_max_hz == 6000.0);
    CHECK(c.users == std::vector<int>{2, 4});
    CHECK(c.mode == LinkMode::multiuser);
    CHECK(c.axis == SweepAxis::pdr_db);
    CHECK(c.values == std::vector<double>{-10, -5, 0, 5});
    CHECK(c.leak_filters == std::vector<PulseKind>{PulseKind::sinc});
    CHECK(c.inject_fault == FaultInjection::corrupt_tap);
}

TEST_CASE("config errors name the line") {
    CHECK_THROWS_AS(parse_config("[run]\ntrials = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config(""), ConfigError);
    CHECK_THROWS_AS(parse_config("schema = 2\n"), ConfigError);
    CHECK_THROWS_WITH_AS(parse("[run]\nbogus = 1\n"), doctest::Contains("line 3"), ConfigError);
    CHECK_THROWS_WITH_AS(parse("[run]\ntrials = 0\n"), doctest::Contains("run.trials"), ConfigError);
    CHECK_THROWS_AS(parse("[run]\ntrials = 3x\n"), ConfigError);
    CHECK_THROWS_AS(parse("[sweep]\nvalues = 0, 5, 5\n"), ConfigError);
    CHECK_THROWS_AS(parse("[sweep]\nvalues = 5, 0\n"), ConfigError);
    CHECK_THROWS_AS(parse("[link]\nusers = 5\n"), ConfigError);
    CHECK_THROWS_AS(parse("[link]\nmode = duplex\n"), ConfigError);
    CHECK_THROWS_AS(parse("[scenario]\nrrc_beta = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse("[channel]\nnu_max_hz = nan\n"), ConfigError);
    CHECK_THROWS_AS(parse("[run\n"), ConfigError);
    CHECK_THROWS_AS(parse("[run]\njust_a_word\n"), ConfigError);
}

TEST_CASE("csv formatting") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1e-7) == "1e-07");
    CHECK(format_double(-2.5) == "-2.5");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    for (double v : {1.0 / 3.0, 6.02214076e23, -1.2345678901234567e-300}) CHECK(std::stod(format_double(v)) == v);

    const CsvTable t{{"a", "b"}, {{"1", "x"}, {"2", "y"}}};
    CHECK(t.str() == "a,b\n1,x\n2,y\n");
    CHECK(t.column("b") == 1);
    CHECK_THROWS_AS(t.column("c"), std::out_of_range);
}

TEST_CASE("parallel_for visits every index once and propagates exceptions") {
    std::vector<std::atomic<int>> hits(100);
    parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
    for (auto& h : hits) CHECK(h.load() == 1);
    CHECK_THROWS_AS(parallel_for(50, 3,
                                 [](std::size_t i) {
                                     if (i == 17) throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
}

TEST_CASE("link sweep tables: header, row layout, and thread-count invariance") {
    const auto cfg = tiny_link();
    const auto ber1 = run_ber_sweep(cfg, 1), ber3 = run_ber_sweep(cfg, 3);
    CHECK(ber1.str() == ber3.str());
    CHECK(ber1.header == std::vector<std::string>{"user", "sweep_name", "sweep_value", "ber", "trials", "mode", "bit_errors", "bits", "ci95_half_width"});
    // users x modes x points
    REQUIRE(ber1.rows.size() == 2 * 2 * 2);
    CHECK(ber1.rows[0][0] == "1");
    CHECK(ber1.rows[0][1] == "snr_db");
    CHECK(ber1.rows[0][5] == "single_user");
    CHECK(ber1.rows[2][5] == "multiuser");
    CHECK(ber1.rows[4][0] == "3");

    const auto nmse = run_nmse_sweep(cfg, 2);
    CHECK(nmse.header == std::vector<std::string>{"user", "sweep_name", "sweep_value", "nmse", "nmse_db", "trials", "mode"});
    CHECK(nmse.str() == run_nmse_sweep(cfg, 1).str());
    // Higher SNR lowers the estimation error of the single-user link.
    CHECK(std::stod(nmse.rows[1][3]) < std::stod(nmse.rows[0][3]));

    auto reseeded = cfg;
    reseeded.master_seed = 8;
    CHECK(run_nmse_sweep(reseeded, 1).str() != nmse.str());
}

TEST_CASE("single-user link at high SNR with an ideal channel is error free") {
    auto cfg = tiny_link();
    cfg.profile = ChannelProfile::ideal;
    cfg.mode = LinkMode::single_user;
    cfg.values = {40};
    const auto pts = run_link_sweep(cfg, 1);
    REQUIRE(pts.size() == 2);
    for (const auto& p : pts) {
        CHECK(p.bit_errors == 0);
        CHECK(p.bits > 0);
    }
}

TEST_CASE("leakage table layout and invariance") {
    auto cfg = parse(R"(
[channel]
nu_max_hz = 815
[leakage]
rx_users = 2, 4
filters = sinc
draws = 2
quad_oversample = 2
)");
    RunLog log;
    const auto t = run_leakage(cfg, 2, &log);
    CHECK(t.header == std::vector<std::string>{"tx_user", "rx_user", "nu_max_hz", "filter", "ratio_db"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0] == std::vector<std::string>{"1", "2", "815", "sinc", t.rows[0][4]});
    // Band-adjacent users sit well below the in-band signal.
    CHECK(std::stod(t.rows[0][4]) < -30.0);
    CHECK(run_leakage(cfg, 1).str() == t.str());

    cfg.leak_rx_users = {1};
    CHECK_THROWS_AS(run_leakage(cfg, 1), std::invalid_argument);
}

TEST_CASE("validation suite passes and catches an injected fault") {
    auto cfg = parse("");
    const auto ok = run_validation(cfg);
    REQUIRE(ok.size() == 9);
    for (const auto& c : ok) {
        INFO(c.name << " value=" << c.value << " tol=" << c.tolerance);
        CHECK(c.pass);
    }
    cfg.inject_fault = FaultInjection::corrupt_tap;
    const auto bad = run_validation(cfg);
    bool caught = false;
    for (const auto& c : bad)
        if (c.name == "tap_model_vs_lattice_link") caught = !c.pass;
    CHECK(caught);
    const auto t = validation_table(bad);
    CHECK(t.header == std::vector<std::string>{"check", "value", "tolerance", "status"});
}
