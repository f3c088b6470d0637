#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "zakmul/channel.hpp"
#include "zakmul/eff_channel.hpp"
#include "zakmul/frame_pilot.hpp"
#include "zakmul/rng.hpp"

using namespace zakmul;

namespace {

const Scenario kSc = table1_scenario();
constexpr double kVehATauMax = 2.51e-6;

int count_columns(const FrameLayout& f, Region r) {
    int c = 0;
    for (auto x : f.column) c += x == r;
    return c;
}

std::vector<std::uint8_t> random_bits(std::size_t n, std::uint64_t seed) {
    Rng g(seed);
    std::vector<std::uint8_t> b(n);
    for (auto& x : b) x = static_cast<std::uint8_t>(g() & 1u);
    return b;
}

}  // namespace

TEST_CASE("layout for UT-1 with the default margins") {
    const auto f = build_layout(kSc.user(1), kVehATauMax);
    CHECK(f.k_max == 1);
    // Window starts at pulse 180 = 12 mod 24, so the pilot sits at (12 + 12) mod 24 = 0.
    CHECK(f.k_p == 0);
    CHECK(f.l_p == 8);
    CHECK(count_columns(f, Region::pilot) == 5);
    CHECK(count_columns(f, Region::guard1) == 4);
    CHECK(count_columns(f, Region::guard2) == 2);
    CHECK(f.data_count() == 195);
    // P = [-2, 2], G1 = [-6, -3], G2 = [3, 4], wrapped mod 24.
    for (int k = -2; k <= 2; ++k) CHECK(f.at(k, 0) == Region::pilot);
    for (int k = -6; k <= -3; ++k) CHECK(f.at(k, 3) == Region::guard1);
    for (int k = 3; k <= 4; ++k) CHECK(f.at(k, 14) == Region::guard2);
    // Explicit pilot placement.
    const auto c = build_layout(kSc.user(1), kVehATauMax, {}, std::pair{12, 8});
    for (int k = 10; k <= 14; ++k) CHECK(c.at(k, 0) == Region::pilot);
    for (int k = 6; k <= 9; ++k) CHECK(c.at(k, 3) == Region::guard1);
    for (int k = 15; k <= 16; ++k) CHECK(c.at(k, 14) == Region::guard2);
    CHECK(f.at(f.k_p, f.l_p) == Region::pilot);
}

TEST_CASE("regions partition the grid for every Table I user") {
    for (const auto& u : kSc.users) {
        const auto f = build_layout(u, kVehATauMax);
        int total = 0;
        for (auto r : {Region::data, Region::pilot, Region::guard1, Region::guard2}) total += count_columns(f, r);
        CHECK(total == u.M);
        CHECK(f.data_count() == count_columns(f, Region::data) * u.N);
        CHECK(f.at(f.k_p, f.l_p) == Region::pilot);
    }
    // UT-4 (720 kHz) needs k_max = 2.
    CHECK(build_layout(kSc.user(4), kVehATauMax).k_max == 2);
}

TEST_CASE("degenerate and rejected layouts") {
    const auto f = build_layout(kSc.user(1), 0.0, FrameMargins{0, 0, 0, 0});
    CHECK(count_columns(f, Region::pilot) == 1);
    CHECK(f.data_count() == 23 * 15);
    CHECK_THROWS_AS(build_layout(kSc.user(1), kVehATauMax, FrameMargins{6, 6, 6, 6}), std::invalid_argument);
    CHECK_THROWS_AS(build_layout(kSc.user(1), kVehATauMax, {}, std::pair{24, 0}), std::invalid_argument);
    // Strips wrap mod M when the pilot sits near the edge.
    const auto w = build_layout(kSc.user(1), kVehATauMax, {}, std::pair{0, 0});
    CHECK(w.at(22, 0) == Region::pilot);
    CHECK(w.at(18, 0) == Region::guard1);
    CHECK(w.data_count() == 195);
}

TEST_CASE("4-QAM mapping") {
    CHECK(std::abs(qam4(0, 0) - cplx{1, 1} / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(qam4(1, 0) - cplx{-1, 1} / std::sqrt(2.0)) < 1e-15);
    for (std::uint8_t b0 : {0, 1})
        for (std::uint8_t b1 : {0, 1}) {
            CHECK(std::abs(std::norm(qam4(b0, b1)) - 1.0) < 1e-15);
            CHECK(qam4_demap(qam4(b0, b1)) == std::pair{b0, b1});
        }
    // Boundary values decide bit 0.
    CHECK(qam4_demap(cplx{0.0, 0.0}) == std::pair<std::uint8_t, std::uint8_t>{0, 0});
    CHECK(qam4_demap(cplx{0.0, -0.5}) == std::pair<std::uint8_t, std::uint8_t>{0, 1});
}

TEST_CASE("frame mapping") {
    const auto f = build_layout(kSc.user(1), kVehATauMax);
    const double E_d = 4.0;
    const auto zeros = std::vector<std::uint8_t>(2 * 195, 0);
    const auto fr0 = map_frame(f, zeros, E_d, E_d);
    CHECK(fr0.E_p == fr0.E_d);  // PDR 0 dB
    const cplx first = fr0.x(f.data_cells[0].first, f.data_cells[0].second);
    for (auto [k, l] : f.data_cells) CHECK(fr0.x(k, l) == first);
    CHECK(std::abs(first - std::sqrt(E_d / 195.0) * qam4(0, 0)) < 1e-15);

    const auto bits = random_bits(2 * 195, 3);
    const auto fr = map_frame(f, bits, E_d, 2.5);
    CHECK(std::abs(fr.x.energy() - (E_d + 2.5)) < 1e-12);
    CHECK(fr.x(f.k_p, f.l_p) == cplx{std::sqrt(2.5)});
    for (int k = 0; k < f.M; ++k)
        for (int l = 0; l < f.N; ++l)
            if (f.at(k, l) != Region::data && !(k == f.k_p && l == f.l_p)) CHECK(fr.x(k, l) == cplx{});
    const double s = std::sqrt(195.0 / E_d);
    std::vector<std::uint8_t> back;
    for (auto [k, l] : f.data_cells) {
        const auto [b0, b1] = qam4_demap(s * fr.x(k, l));
        back.push_back(b0);
        back.push_back(b1);
    }
    CHECK(back == bits);
    CHECK_THROWS_AS(map_frame(f, std::vector<std::uint8_t>(10), E_d, E_d), std::invalid_argument);
}

TEST_CASE("noiseless pilot-only estimates") {
    const auto& u = kSc.user(1);
    const auto fq = FactorizedDDFilter::for_user(u, PulseKind::sinc);
    const auto f = build_layout(u, kVehATauMax);
    const double E_p = 3.0;
    DDGridSignal pilot(u.M, u.N);
    pilot(f.k_p, f.l_p) = std::sqrt(E_p);

    SUBCASE("ideal channel gives a delta") {
        const auto y = LatticeLink(u, fq, u, fq, ideal_channel()).apply(pilot);
        const auto h = estimate_taps(y, f, E_p);
        double err = 0;
        for (int k = h.k_min(); k <= h.k_max(); ++k)
            for (int l = h.l_min(); l <= h.l_max(); ++l) err = std::max(err, std::abs(h.at(k, l) - cplx{k == 0 && l == 0 ? 1.0 : 0.0}));
        CHECK(err < 1e-12);
    }
    SUBCASE("Veh-A estimate equals the true taps on the pilot strip") {
        const auto ch = draw_veh_a(substream_seed(1, 1, 0, StreamPurpose::channel), 815.0);
        const EffectiveChannel e(fq, fq, ch);
        const auto truth = discrete_self_channel(e, u, default_tap_box(u, kVehATauMax, 815.0));
        const auto y = twisted_conv_discrete(truth, pilot);
        const auto h = estimate_taps(y, f, E_p);
        double err = 0;
        for (int k = h.k_min(); k <= h.k_max(); ++k)
            for (int l = h.l_min(); l <= h.l_max(); ++l) err = std::max(err, std::abs(h.at(k, l) - truth.at(k, l)));
        CHECK(err < 1e-9);
        // Cancelling the pilot through its own estimate clears the pilot strip.
        const auto r = cancel_pilot(y, h, f, E_p);
        for (int k = 0; k < u.M; ++k)
            for (int l = 0; l < u.N; ++l)
                if (f.at(k, l) == Region::pilot) CHECK(std::abs(r(k, l)) < 1e-12);
    }
}

TEST_CASE("estimator is unbiased in white lattice noise") {
    const auto& u = kSc.user(1);
    const auto fq = FactorizedDDFilter::for_user(u, PulseKind::sinc);
    const auto f = build_layout(u, kVehATauMax);
    const double E_p = 1.0, N0 = 0.05;
    const auto ch = draw_veh_a(99, 815.0);
    const auto truth = discrete_self_channel(EffectiveChannel(fq, fq, ch), u, default_tap_box(u, kVehATauMax, 815.0));
    DDGridSignal pilot(u.M, u.N);
    pilot(f.k_p, f.l_p) = std::sqrt(E_p);
    const auto clean = twisted_conv_discrete(truth, pilot);
    const int trials = 2000;
    DDTapSet mean = estimate_taps(clean, f, E_p);
    for (int k = mean.k_min(); k <= mean.k_max(); ++k)
        for (int l = mean.l_min(); l <= mean.l_max(); ++l) mean.ref(k, l) = 0;
    for (int t = 0; t < trials; ++t) {
        Rng g(substream_seed(7, 1, static_cast<std::uint64_t>(t), StreamPurpose::noise));
        auto y = clean;
        for (auto& v : y.values()) v += complex_normal(g, N0);
        const auto h = estimate_taps(y, f, E_p);
        for (int k = h.k_min(); k <= h.k_max(); ++k)
            for (int l = h.l_min(); l <= h.l_max(); ++l) mean.ref(k, l) += h.at(k, l) / static_cast<double>(trials);
    }
    // Per-tap estimate noise has variance N0/E_p; the mean's per-component std is sqrt(N0/(2 E_p trials)).
    const double sigma = std::sqrt(N0 / (2.0 * E_p * trials));
    int outliers = 0, total = 0;
    for (int k = mean.k_min(); k <= mean.k_max(); ++k)
        for (int l = mean.l_min(); l <= mean.l_max(); ++l) {
            const cplx b = mean.at(k, l) - truth.at(k, l);
            outliers += std::abs(b.real()) > 3 * sigma;
            outliers += std::abs(b.imag()) > 3 * sigma;
            total += 2;
        }
    // 3-sigma exceedances occur with probability 0.0027 each.
    CHECK(outliers <= 3);
    CHECK(total == 150);
}
