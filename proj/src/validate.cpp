#include <algorithm>
#include <cmath>
#include <random>

#include "zakmul/channel.hpp"
#include "zakmul/dd_core.hpp"
#include "zakmul/eff_channel.hpp"
#include "zakmul/equalizer.hpp"
#include "zakmul/metrics.hpp"
#include "zakmul/quadrature_oracle.hpp"
#include "zakmul/sim.hpp"
#include "zakmul/waveform_oracle.hpp"

namespace zakmul {

namespace {

DDGridSignal random_grid(int M, int N, std::mt19937_64& g) {
    std::normal_distribution<double> d;
    DDGridSignal x(M, N);
    for (auto& v : x.values()) v = {d(g), d(g)};
    return x;
}

DDTapSet random_taps(int k0, int k1, int l0, int l1, std::mt19937_64& g) {
    std::normal_distribution<double> d;
    DDTapSet h(k0, k1, l0, l1);
    for (int k = k0; k <= k1; ++k)
        for (int l = l0; l <= l1; ++l) h.ref(k, l) = {d(g), d(g)};
    return h;
}

double max_diff(const DDGridSignal& a, const DDGridSignal& b) {
    double e = 0;
    for (std::size_t i = 0; i < a.values().size(); ++i) e = std::max(e, std::abs(a.values()[i] - b.values()[i]));
    return e;
}

double max_abs(const DDGridSignal& a) {
    double m = 0;
    for (auto v : a.values()) m = std::max(m, std::abs(v));
    return m;
}

ValidationCheck check(std::string name, double value, double tol) { return {std::move(name), value, tol, value <= tol}; }

// 8 x 4 user at 120 kHz over [0, T).
UserAllocation small_user(int id = 1, double tau_shift_periods = 0.5, double nu_shift = 0.0) {
    const double nu_p = 15e3, T = 4.0 / nu_p;
    return UserAllocation::make(id, 120e3, T, nu_p, tau_shift_periods * T, nu_shift);
}

double pad_for(double seconds, double fs) { return std::ceil(seconds * fs) / fs; }

}  // namespace

std::vector<ValidationCheck> run_validation(const ExperimentConfig& cfg) {
    std::vector<ValidationCheck> out;
    std::mt19937_64 g(cfg.master_seed);
    const auto sc = table1_scenario();

    {  // Zak round trip over several lattice sizes.
        double err = 0;
        for (int M : {4, 8, 16})
            for (int N : {3, 4, 15}) {
                const auto u = UserAllocation::make(1, M * 1e3, N * 1e-3, 1e3);
                const auto x = random_grid(M, N, g);
                const auto td = inverse_zak(x, u, 2 * u.B, 2 * N * u.tau_p);
                for (int k = 0; k < M; ++k)
                    for (int l = 0; l < N; ++l) err = std::max(err, std::abs(zak_transform(td, u, k, l) - x(k, l)));
            }
        out.push_back(check("zak_round_trip", err, 1e-10));
    }
    {  // Twisted convolution: associativity and quasi-periodic output.
        double err = 0;
        for (int M : {3, 4})
            for (int N : {2, 4}) {
                const auto x = random_grid(M, N, g);
                const auto h1 = random_taps(-1, 1, 0, 2, g), h2 = random_taps(0, 2, -1, 1, g);
                err = std::max(err, max_diff(twisted_conv_discrete(twisted_conv_taps(h1, h2, M, N), x),
                                             twisted_conv_discrete(h1, twisted_conv_discrete(h2, x))));
                const auto y = twisted_conv_discrete(h1, x);
                for (int k = 0; k < M; ++k)
                    for (int l = 0; l < N; ++l)
                        err = std::max(err, std::abs(qp_access(y, k + M, l + N) - cis(kTwoPi * l / N) * y(k, l)));
            }
        out.push_back(check("twisted_conv_algebra", err, 1e-10));
    }
    {  // Closed-form effective channel against nested quadrature, two random paths.
        for (auto kind : {PulseKind::sinc, PulseKind::rrc}) {
            const auto& u = sc.user(1);
            const auto f = FactorizedDDFilter::for_user(u, kind, cfg.rrc_beta);
            std::uniform_real_distribution<double> dl(0.0, 3e-6), dv(-3e3, 3e3), ut(-20 / u.B, 20 / u.B), un(-20 / u.T, 20 / u.T);
            std::normal_distribution<double> n(0.0, std::sqrt(0.5));
            ChannelRealization ch;
            for (int i = 0; i < 2; ++i) ch.paths.push_back({{n(g), n(g)}, dl(g), dv(g)});
            const EffectiveChannel e(f, f, ch);
            double num = 0, den = 0;
            for (int i = 0; i < 6; ++i) {
                const double tau = ut(g), nu = un(g);
                const cplx b = oracle::composed_kernel_channel(f, f, ch, tau, nu);
                num = std::max(num, std::abs(e(tau, nu) - b));
                den = std::max(den, std::abs(b));
            }
            out.push_back(check(std::string("heff_vs_quadrature_") + to_string(kind), num / den, kind == PulseKind::sinc ? 1e-5 : 1e-4));
        }
    }
    {  // Ideal channel: lattice delta.
        const auto& u = sc.user(1);
        const auto f = FactorizedDDFilter::for_user(u, PulseKind::sinc);
        const auto h = discrete_self_channel(EffectiveChannel(f, f, ideal_channel()), u, {-4, 4, -5, 5});
        double err = 0;
        for (int k = -4; k <= 4; ++k)
            for (int l = -5; l <= 5; ++l) err = std::max(err, std::abs(h.at(k, l) - (k == 0 && l == 0 ? 1.0 : 0.0)));
        out.push_back(check("ideal_channel_delta", err, 1e-9));
    }
    {  // Tap model against the pulse-level lattice link away from the window edge (integer delays).
        const auto& u1 = sc.user(1);
        const auto f = FactorizedDDFilter::for_user(u1, PulseKind::sinc);
        const ChannelRealization ch{{Path{cplx{0.8, 0.1}, 0.0, 0.0}, Path{cplx{-0.2, 0.5}, 2.0 * u1.delay_bin(), 0.0}}};
        auto h = discrete_self_channel(EffectiveChannel(f, f, ch), u1, {-1, 3, -100 * u1.N, 100 * u1.N});
        if (cfg.inject_fault == FaultInjection::corrupt_tap) h.ref(1, 0) += 0.05;
        const auto x = random_grid(u1.M, u1.N, g);
        const auto y1 = LatticeLink(u1, f, u1, f, ch).apply(x), y2 = twisted_conv_discrete(h, x);
        const int edge = static_cast<int>(pos_mod(std::lround(u1.B * (u1.tau_shift - 0.5 * u1.T)), u1.M));
        double num = 0, den = 0;
        for (int k = 0; k < u1.M; ++k) {
            if (std::abs(k - edge) < 6) continue;
            for (int l = 0; l < u1.N; ++l) {
                num = std::max(num, std::abs(y1(k, l) - y2(k, l)));
                den = std::max(den, std::abs(y1(k, l)));
            }
        }
        out.push_back(check("tap_model_vs_lattice_link", num / den, 2e-3));
    }
    {  // Pulse-level lattice engine against the oversampled waveform oracle, Veh-A.
        const auto u = small_user();
        const auto f = FactorizedDDFilter::for_user(u, PulseKind::sinc);
        OracleConfig oc;
        oc.truncation_lobes = 2000;
        oc.time_pad = pad_for(oc.truncation_lobes / u.B + 5e-6, oc.oversampling * u.B);
        const WaveformOracle o(u.B, u.T, oc);
        const auto ch = draw_veh_a(substream_seed(cfg.master_seed, 1, 0, StreamPurpose::channel), 815.0);
        const auto x = random_grid(u.M, u.N, g);
        const auto y_td = o.rx_sample(apply_channel(o.synth_frame(u, f, x), ch, oc), u, f);
        const auto y_dd = LatticeLink(u, f, u, f, ch).apply(x);
        out.push_back(check("lattice_link_vs_waveform_oracle", max_diff(y_td, y_dd) / max_abs(y_dd), 1e-3));
    }
    {  // Energy identity: quadrature of carrier energies against oracle matched-filter energy.
        constexpr int lobes = 200;
        const auto a = small_user(1), later = small_user(3, 1.5);
        OracleConfig oc;
        oc.truncation_lobes = lobes;
        const double fs = oc.oversampling * 2 * a.B;
        oc.time_pad = pad_for((lobes + 4) / a.B, fs);
        const WaveformOracle o(2 * a.B, 2 * a.T, oc);
        const auto ch = draw_veh_a(substream_seed(cfg.master_seed, 1, 1, StreamPurpose::channel), 3000.0);
        const auto fa = FactorizedDDFilter::for_user(a, PulseKind::sinc, 0.1, lobes);
        double worst = 0;
        for (const auto* q : {&a, &later}) {
            const auto fq = FactorizedDDFilter::for_user(*q, PulseKind::sinc, 0.1, lobes);
            const auto e = carrier_energies(*q, fq, a, fa, ch, 8, true);
            for (auto [k, l] : {std::pair{0, 0}, {5, 2}}) {
                const double td = o.matched_output(apply_channel(o.synth_carrier(a, fa, k, l), ch, oc), fq).energy();
                worst = std::max(worst, std::abs(10 * std::log10(td / e.at(k, l))));
            }
        }
        out.push_back(check("energy_identity_db", worst, 0.5));
    }
    {  // Noiseless perfect-CSI loopback on the tap model recovers every bit.
        const double tau_max = veh_a_profile().delays.back();
        double errors = 0;
        for (const auto& u : sc.users) {
            const auto f = FactorizedDDFilter::for_user(u, PulseKind::sinc);
            const auto layout = build_layout(u, tau_max);
            const auto ch = draw_veh_a(substream_seed(cfg.master_seed, u.user_id, 0, StreamPurpose::channel), 815.0);
            const auto taps = discrete_self_channel(EffectiveChannel(f, f, ch), u, default_tap_box(u, tau_max, 815.0));
            std::vector<std::uint8_t> bits(2 * static_cast<std::size_t>(layout.data_count()));
            for (auto& b : bits) b = static_cast<std::uint8_t>(g() & 1u);
            const auto fr = map_frame(layout, bits, 1.0, 1.0);
            const auto y = twisted_conv_discrete(taps, fr.x);
            const auto sol = lsmr_solve(build_system(taps, layout, cancel_pilot(y, taps, layout, 1.0)), cfg.solver);
            const auto bh = demap(sol.x, 1.0, layout.data_count());
            for (std::size_t i = 0; i < bits.size(); ++i) errors += bits[i] != bh[i];
        }
        out.push_back(check("perfect_csi_loopback_bit_errors", errors, 0.0));
    }
    return out;
}

}  // namespace zakmul
