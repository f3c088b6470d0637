#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "zakmul/channel.hpp"
#include "zakmul/eff_channel.hpp"
#include "zakmul/metrics.hpp"
#include "zakmul/rng.hpp"
#include "zakmul/waveform_oracle.hpp"

using namespace zakmul;

namespace {

const Scenario kSc = table1_scenario();

// 8 x 4 users at 120 kHz. `a` occupies [0, T) x [-60, 60) kHz; `band` sits directly above it,
// `later` directly after it, `far` one slot above `band`.
constexpr double kNuP = 15e3, kT = 4.0 / kNuP, kB = 120e3;
UserAllocation small(int id, double tau_shift, double nu_shift) {
    return UserAllocation::make(id, kB, kT, kNuP, tau_shift, nu_shift);
}
const UserAllocation kA = small(1, 0.5 * kT, 0.0);
const UserAllocation kBand = small(2, 0.5 * kT, kB);
const UserAllocation kLater = small(3, 1.5 * kT, 0.0);
const UserAllocation kFar = small(4, 0.5 * kT, 2 * kB);

FactorizedDDFilter filt(const UserAllocation& u, PulseKind k = PulseKind::sinc, int lobes = 20) {
    return FactorizedDDFilter::for_user(u, k, 0.1, lobes);
}

double db(double x) { return 10.0 * std::log10(x); }

}  // namespace

TEST_CASE("ber and nmse definitions") {
    const std::vector<std::uint8_t> a{0, 1, 1, 0, 1, 0, 0, 1};
    std::vector<std::uint8_t> flipped(a.size());
    std::transform(a.begin(), a.end(), flipped.begin(), [](auto b) { return static_cast<std::uint8_t>(1 - b); });
    CHECK(ber(a, a) == 0.0);
    CHECK(ber(a, flipped) == 1.0);
    auto one = a;
    one[3] ^= 1;
    CHECK(ber(a, one) == 0.125);
    CHECK_THROWS_AS(ber(a, std::vector<std::uint8_t>(3)), std::invalid_argument);
    CHECK_THROWS_AS(ber(std::vector<std::uint8_t>{}, std::vector<std::uint8_t>{}), std::invalid_argument);

    DDTapSet h(-1, 2, -2, 2);
    h.ref(0, 0) = {0.8, 0.1};
    h.ref(1, -1) = {-0.3, 0.4};
    h.ref(2, 2) = 1e-9;  // below the 1e-7 support floor
    const DDTapSet zero(-1, 2, -2, 2);
    CHECK(nmse_terms(zero, h).value() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(nmse_terms(h, h).err == 0.0);
    CHECK(nmse_terms(h, h).ref == doctest::Approx(0.64 + 0.01 + 0.09 + 0.16).epsilon(1e-15));
    // Estimate taps off the support never count.
    DDTapSet est = h;
    est.ref(-1, 0) = 5.0;
    CHECK(nmse_terms(est, h).err == 0.0);
    // An estimate on a smaller box reads as zero outside it.
    DDTapSet narrow(0, 0, 0, 0);
    narrow.ref(0, 0) = h.at(0, 0);
    CHECK(nmse_terms(narrow, h).value() == doctest::Approx(0.25 / 0.9).epsilon(1e-12));
}

TEST_CASE("Wilson score interval") {
    // 0/10 at 95%: upper bound z^2 / (n + z^2).
    const double z = 1.959963984540054;
    const auto e = wilson_interval(0, 10);
    CHECK(e.lo == 0.0);
    CHECK(e.hi == doctest::Approx(z * z / (10 + z * z)).epsilon(1e-12));
    CHECK(e.hi == doctest::Approx(0.2775).epsilon(1e-3));
    const auto m = wilson_interval(50, 100);
    CHECK(0.5 * (m.lo + m.hi) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(m.half_width() == doctest::Approx(0.0961).epsilon(1e-3));
    const auto f = wilson_interval(10, 10);
    CHECK(f.hi == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(f.lo == doctest::Approx(1.0 - z * z / (10 + z * z)).epsilon(1e-12));
    CHECK_THROWS_AS(wilson_interval(3, 2), std::invalid_argument);
    CHECK_THROWS_AS(wilson_interval(0, 0), std::invalid_argument);
}

TEST_CASE("per-carrier energies sum to the total") {
    const auto ch = draw_veh_a(substream_seed(11, 1, 0, StreamPurpose::channel), 2000.0);
    for (const auto* q : {&kA, &kBand, &kLater}) {
        const auto e = carrier_energies(*q, filt(*q), kA, filt(kA), ch, 4, true);
        const double sum = std::accumulate(e.per_carrier.begin(), e.per_carrier.end(), 0.0);
        CHECK(std::abs(sum - e.total) <= 1e-10 * e.total);
        CHECK(carrier_energies(*q, filt(*q), kA, filt(kA), ch, 4).total == doctest::Approx(e.total).epsilon(1e-12));
    }
}

TEST_CASE("ideal-channel energies: unit useful energy, zero across disjoint bands") {
    const auto self = carrier_energies(kA, filt(kA), kA, filt(kA), ideal_channel(), 4, true);
    // Each carrier carries 1/K. The gate opens on pulse 0, so column 0 loses half of one of its N
    // pulses; columns next to either gate edge also lose nearby sinc tails.
    CHECK(self.total == doctest::Approx(1.0).epsilon(0.02));
    CHECK(self.total <= 1.0);
    const double K = kA.M * kA.N;
    for (int k = 0; k < kA.M; ++k)
        for (int l = 0; l < kA.N; ++l) {
            if (k == 0)
                CHECK(self.at(k, l) * K == doctest::Approx(1.0 - 0.5 / kA.N).epsilon(0.03));
            else if (k == 1 || k == kA.M - 1)
                CHECK(self.at(k, l) * K > 0.93);
            else
                CHECK(self.at(k, l) * K == doctest::Approx(1.0).epsilon(0.02));
        }

    // Rect spectra that only touch at an edge do not overlap at all.
    const auto adj = leakage_ratio(kBand, filt(kBand), kA, filt(kA), ideal_channel());
    CHECK(adj.I == 0.0);
    CHECK(adj.ratio() <= 1e-6);
    const auto far = leakage_ratio(kFar, filt(kFar), kA, filt(kA), ideal_channel());
    CHECK(far.ratio_db() < -120.0);
    CHECK(far.refinement_ok);
    // Time-adjacent sinc tails do leak.
    const auto later = leakage_ratio(kLater, filt(kLater), kA, filt(kA), ideal_channel());
    CHECK(later.ratio_db() > -40.0);
    CHECK(later.ratio_db() < -15.0);
}

TEST_CASE("quadrature refinement stays within tolerance for a Doppler channel") {
    const auto ch = draw_veh_a(substream_seed(12, 1, 0, StreamPurpose::channel), 3000.0);
    for (const auto* q : {&kBand, &kLater}) {
        const auto r = leakage_ratio(*q, filt(*q), kA, filt(kA), ch);
        CHECK(r.refinement_ok);
        CHECK(r.refinement_delta_db <= 0.5);
        CHECK(r.S > 0);
    }
    LeakageOptions o;
    o.refinement_tol_db = -1.0;  // forces the warning path
    CHECK_FALSE(leakage_ratio(kBand, filt(kBand), kA, filt(kA), ch, o).refinement_ok);
}

TEST_CASE("energy identity: per-carrier energies match the waveform oracle") {
    // 200-lobe filters so truncation sits well below the leakage being compared.
    constexpr int lobes = 200;
    const double fs_sys = 2 * kB;
    OracleConfig cfg;
    cfg.oversampling = 8;
    cfg.truncation_lobes = lobes;
    const double fs = cfg.oversampling * fs_sys;
    cfg.time_pad = std::ceil((lobes + 4) / kB * fs) / fs;
    const WaveformOracle o(fs_sys, 2 * kT, cfg);
    const auto ch = draw_veh_a(substream_seed(13, 1, 0, StreamPurpose::channel), 3000.0);
    const auto fa = filt(kA, PulseKind::sinc, lobes);
    for (const auto* q : {&kA, &kBand, &kLater}) {
        const auto fq = filt(*q, PulseKind::sinc, lobes);
        const auto e = carrier_energies(*q, fq, kA, fa, ch, 8, true);
        for (auto [k, l] : {std::pair{0, 0}, {3, 1}, {5, 2}, {7, 3}}) {
            const auto y = apply_channel(o.synth_carrier(kA, fa, k, l), ch, cfg);
            const double td = o.matched_output(y, fq).energy();
            INFO("rx user " << q->user_id << " carrier " << k << "," << l);
            CHECK(std::abs(db(td) - db(e.at(k, l))) < 0.5);
        }
    }
}

TEST_CASE("lattice output energy equals the per-carrier response sum") {
    const auto ch = draw_veh_a(substream_seed(14, 1, 0, StreamPurpose::channel), 2000.0);
    for (const auto* q : {&kA, &kLater}) {
        const LatticeLink link(*q, filt(*q), kA, filt(kA), ch);
        const auto map = link.output_energy();
        std::vector<double> brute(map.size(), 0.0);
        for (int k = 0; k < kA.M; ++k)
            for (int l = 0; l < kA.N; ++l) {
                const auto y = link.response(k, l);
                for (int kk = 0; kk < q->M; ++kk)
                    for (int ll = 0; ll < q->N; ++ll) brute[static_cast<std::size_t>(kk * q->N + ll)] += std::norm(y(kk, ll));
            }
        const double peak = *std::max_element(brute.begin(), brute.end());
        for (std::size_t i = 0; i < map.size(); ++i) CHECK(std::abs(map[i] - brute[i]) <= 1e-10 * peak);
    }
}

TEST_CASE("MUI heatmap accumulation") {
    const auto& u1 = kSc.user(1);
    CarrierEnergies self{u1.M, u1.N, 0, std::vector<double>(static_cast<std::size_t>(u1.M * u1.N), 2.0)};
    SUBCASE("single user has no interference") {
        MuiHeatmap h(u1);
        h.add_useful(self);
        for (double v : h.ratio_db()) CHECK(std::isinf(v));
        for (double v : h.ratio_db()) CHECK(v < 0);
    }
    SUBCASE("constant interferer maps to a constant scaled by the bandwidth ratio") {
        MuiHeatmap h(u1);
        h.add_useful(self);
        for (int id : {2, 3, 4}) {
            const auto& s = kSc.user(id);
            h.add_interferer(s, {s.M, s.N, 0, std::vector<double>(static_cast<std::size_t>(s.M * s.N), 1.0)});
        }
        // UT-2 and UT-3 at 360 kHz scale by 1, UT-4 at 720 kHz by 1/2.
        for (double v : h.ratio()) CHECK(v == doctest::Approx(2.5 / 2.0).epsilon(1e-14));
    }
    SUBCASE("resampling preserves the grid mean") {
        const auto& s3 = kSc.user(3);  // 12 x 30 onto 24 x 15
        CarrierEnergies e{s3.M, s3.N, 0, {}};
        for (int k = 0; k < s3.M; ++k)
            for (int l = 0; l < s3.N; ++l) e.per_carrier.push_back(1.0 + k + 0.01 * l);
        MuiHeatmap h(u1);
        h.add_useful(self);
        h.add_interferer(s3, e);
        const auto r = h.ratio();
        const double mean_q = 2.0 * std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
        const double mean_s = std::accumulate(e.per_carrier.begin(), e.per_carrier.end(), 0.0) / static_cast<double>(e.per_carrier.size());
        CHECK(mean_q == doctest::Approx(mean_s).epsilon(1e-13));
        // Receiver cell (k, l) covers interferer row k/2 and columns 2l, 2l+1.
        CHECK(2.0 * r[5 * 15 + 7] == doctest::Approx(1.0 + 2 + 0.01 * 14.5).epsilon(1e-13));
    }
    CHECK_THROWS_AS(MuiHeatmap(u1).add_useful(CarrierEnergies{u1.M, u1.N, 1.0, {}}), std::invalid_argument);
}

TEST_CASE("band-adjacent leakage grows with Doppler spread") {
    const auto& u1 = kSc.user(1);
    const auto& u2 = kSc.user(2);
    const auto f1 = filt(u1), f2 = filt(u2);
    double prev = -1e300;
    for (double nu = 500.0; nu <= 7000.0; nu += 500.0) {
        std::vector<LeakageReport> draws;
        for (int d = 0; d < 4; ++d) {
            const auto ch = draw_veh_a(substream_seed(15, 1, static_cast<std::uint64_t>(d), StreamPurpose::channel), nu);
            LeakageOptions o;
            o.check_refinement = false;
            draws.push_back(leakage_ratio(u2, f2, u1, f1, ch, o));
        }
        const double r = average_leakage(draws).ratio_db();
        INFO("nu_max " << nu);
        CHECK(r >= prev);
        prev = r;
    }
}
