#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "zakmul/channel.hpp"
#include "zakmul/rng.hpp"

using namespace zakmul;

TEST_CASE("veh-a profile") {
    const auto p = veh_a_profile();
    const std::vector<double> d = {0.0, 0.31e-6, 0.71e-6, 1.09e-6, 1.73e-6, 2.51e-6};
    CHECK(p.delays == d);
    const auto w = normalized_powers(p);
    // Independent normalization of the dB weights.
    double sum = 0;
    for (double db : {0.0, -1.0, -9.0, -10.0, -15.0, -20.0}) sum += std::pow(10.0, db / 10.0);
    CHECK(w[0] == doctest::Approx(1.0 / sum).epsilon(1e-12));
    CHECK(w[0] == doctest::Approx(0.485003).epsilon(1e-6));
}

TEST_CASE("draws are deterministic and respect the Doppler bound") {
    const auto a = draw_veh_a(42, 815.0), b = draw_veh_a(42, 815.0);
    REQUIRE(a.paths.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(a.paths[i].gain == b.paths[i].gain);
        CHECK(a.paths[i].doppler == b.paths[i].doppler);
        CHECK(std::abs(a.paths[i].doppler) <= 815.0);
    }
    const auto z = draw_veh_a(42, 0.0);
    for (const auto& p : z.paths) CHECK(p.doppler == 0.0);
    // Same seed, different nu_max: identical gains, Dopplers scale.
    const auto c = draw_veh_a(42, 1630.0);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(c.paths[i].gain == a.paths[i].gain);
        CHECK(c.paths[i].doppler == doctest::Approx(2 * a.paths[i].doppler));
    }
}

TEST_CASE("ensemble statistics") {
    const int draws = 100000;
    double energy = 0, mean_cos = 0;
    for (int t = 0; t < draws; ++t) {
        const auto c = draw_veh_a(substream_seed(7, 1, t, StreamPurpose::channel), 1.0);
        for (const auto& p : c.paths) {
            energy += std::norm(p.gain);
            mean_cos += p.doppler;
        }
    }
    CHECK(std::abs(energy / draws - 1.0) < 0.01);
    CHECK(std::abs(mean_cos / (6.0 * draws)) < 0.01);
}

TEST_CASE("ideal channel and spread bounds") {
    const auto c = ideal_channel();
    REQUIRE(c.paths.size() == 1);
    CHECK(c.paths[0].gain == cplx{1.0, 0.0});
    CHECK(spread_bounds(c) == std::pair<double, double>{0.0, 0.0});
    CHECK(spread_bounds(draw_veh_a(3, 500.0)).first == 2.51e-6);
    const auto r = draw_veh_a(11, 3000.0);
    double nm = 0;
    for (const auto& p : r.paths) nm = std::max(nm, std::abs(p.doppler));
    CHECK(spread_bounds(r).second == nm);
}

TEST_CASE("profile validation") {
    CHECK_THROWS(draw_channel({{1e-6, 0.0}, {0.0, -3.0}}, 1, 0.0));
    CHECK_THROWS(draw_channel({{0.0}, {-1.0}}, 1, 0.0));
    CHECK_THROWS(draw_channel({{0.0}, {0.0, -1.0}}, 1, 0.0));
}

TEST_CASE("substream seeds separate purposes and trials") {
    CHECK(substream_seed(1, 1, 0, StreamPurpose::channel) != substream_seed(1, 1, 0, StreamPurpose::noise));
    CHECK(substream_seed(1, 1, 0, StreamPurpose::channel) != substream_seed(1, 1, 1, StreamPurpose::channel));
    CHECK(substream_seed(1, 1, 0, StreamPurpose::channel) != substream_seed(1, 2, 0, StreamPurpose::channel));
    CHECK(substream_seed(5, 3, 9, StreamPurpose::bits) == substream_seed(5, 3, 9, StreamPurpose::bits));
}
