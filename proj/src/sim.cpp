#include "zakmul/sim.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>

#include "zakmul/channel.hpp"
#include "zakmul/eff_channel.hpp"
#include "zakmul/equalizer.hpp"
#include "zakmul/frame_pilot.hpp"
#include "zakmul/metrics.hpp"
#include "zakmul/rng.hpp"
#include "zakmul/waveform_oracle.hpp"

namespace zakmul {

std::string CsvTable::str() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw std::out_of_range("no column " + name);
}

std::string format_double(double v) {
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw std::runtime_error("format_double failed");
    return std::string(buf, p);
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f) {
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    if (workers == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < std::min(workers, n); ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        f(i);
                    } catch (...) {
                        std::lock_guard lk(err_mu);
                        if (!err) err = std::current_exception();
                        next = n;
                    }
                }
            });
    }
    if (err) std::rethrow_exception(err);
}

double profile_tau_max(const ExperimentConfig& cfg) {
    return cfg.profile == ChannelProfile::veh_a ? veh_a_profile().delays.back() : 0.0;
}

namespace {

FactorizedDDFilter filter_for(const ExperimentConfig& cfg, const UserAllocation& u, PulseKind kind) {
    return FactorizedDDFilter::for_user(u, kind, cfg.rrc_beta, cfg.truncation_lobes);
}

ChannelRealization channel_for(const ExperimentConfig& cfg, int user, std::uint64_t draw, double nu_max) {
    if (cfg.profile == ChannelProfile::ideal) return ideal_channel();
    return draw_veh_a(substream_seed(cfg.master_seed, user, draw, StreamPurpose::channel), nu_max);
}

std::vector<double> nu_points(const ExperimentConfig& cfg) {
    return cfg.axis == SweepAxis::nu_max_hz ? cfg.values : std::vector<double>{cfg.nu_max_hz};
}

// ---------------------------------------------------------------- link sweep

struct PointOutcome {
    std::uint64_t errors = 0, bits = 0;
    double nmse_err = 0, nmse_ref = 0;
};

struct UnitOutcome {
    std::vector<PointOutcome> single, multi;  // per sweep point
};

// Frame split into its data part and a unit-amplitude pilot, so any PDR is a linear combination.
struct FrameParts {
    DDGridSignal data, pilot;
    std::vector<std::uint8_t> bits;
};

class LinkContext {
public:
    explicit LinkContext(const ExperimentConfig& cfg) : cfg_(cfg), sc_(table1_scenario()), tau_max_(profile_tau_max(cfg)) {
        for (const auto& u : sc_.users) {
            filters_.push_back(filter_for(cfg, u, cfg.filter));
            layouts_.push_back(build_layout(u, tau_max_, cfg.margins));
        }
        if (cfg.engine == Engine::oracle) {
            OracleConfig oc;
            oc.oversampling = cfg.oracle_oversampling;
            oc.truncation_lobes = cfg.truncation_lobes;
            const double fs = oc.oversampling * sc_.system_B;
            double b_min = sc_.system_B;
            for (const auto& u : sc_.users) b_min = std::min(b_min, u.B);
            oc.time_pad = std::ceil((cfg.truncation_lobes + 2) / b_min * fs) / fs;
            ocfg_ = oc;
            oracle_ = std::make_unique<WaveformOracle>(sc_.system_B, sc_.system_T, oc);
        }
    }

    bool want_single() const { return cfg_.mode != LinkMode::multiuser; }
    bool want_multi() const { return cfg_.mode != LinkMode::single_user; }

    UnitOutcome run(int user, std::uint64_t trial) const {
        const std::size_t ui = index_of(user);
        const auto& U = sc_.users[ui];
        const auto& f = filters_[ui];
        const auto& layout = layouts_[ui];
        const auto own = frame(ui, trial, 1.0);

        Rng g(substream_seed(cfg_.master_seed, user, trial, StreamPurpose::noise));
        DDGridSignal w(U.M, U.N);
        for (auto& v : w.values()) v = complex_normal(g, 1.0);

        // Interferers' frames keep equal average power: E_d,s = E_d T_s / T_q.
        std::vector<FrameParts> others(sc_.users.size());
        if (want_multi())
            for (std::size_t si = 0; si < sc_.users.size(); ++si)
                if (si != ui) others[si] = frame(si, trial, sc_.users[si].T / U.T);

        UnitOutcome out;
        const std::size_t P = cfg_.values.size();
        if (want_single()) out.single.resize(P);
        if (want_multi()) out.multi.resize(P);

        std::optional<double> cached_nu;
        DDTapSet truth;
        DDGridSignal yd, yp, id, ip;
        for (std::size_t p = 0; p < P; ++p) {
            const double nu = cfg_.axis == SweepAxis::nu_max_hz ? cfg_.values[p] : cfg_.nu_max_hz;
            const double snr = cfg_.axis == SweepAxis::snr_db ? cfg_.values[p] : cfg_.snr_db;
            const double pdr = cfg_.axis == SweepAxis::pdr_db ? cfg_.values[p] : cfg_.pdr_db;
            if (cached_nu != nu) {
                cached_nu = nu;
                const auto ch = channel_for(cfg_, user, trial, nu);
                truth = discrete_self_channel(EffectiveChannel(f, f, ch), U, default_tap_box(U, tau_max_, nu, cfg_.margins.a1, cfg_.margins.a2));
                if (oracle_) {
                    yd = oracle_link(ui, ui, ch, own.data);
                    yp = oracle_link(ui, ui, ch, own.pilot);
                } else {
                    yd = twisted_conv_discrete(truth, own.data);
                    yp = twisted_conv_discrete(truth, own.pilot);
                }
                if (want_multi()) {
                    id = DDGridSignal(U.M, U.N);
                    ip = DDGridSignal(U.M, U.N);
                    for (std::size_t si = 0; si < sc_.users.size(); ++si) {
                        if (si == ui) continue;
                        const auto ch_s = channel_for(cfg_, sc_.users[si].user_id, trial, nu);
                        if (oracle_) {
                            accumulate(id, oracle_link(ui, si, ch_s, others[si].data));
                            accumulate(ip, oracle_link(ui, si, ch_s, others[si].pilot));
                        } else {
                            const LatticeLink link(U, f, sc_.users[si], filters_[si], ch_s);
                            accumulate(id, link.apply(others[si].data));
                            accumulate(ip, link.apply(others[si].pilot));
                        }
                    }
                }
            }
            const double E_p = std::pow(10.0, pdr / 10.0);
            const double N0 = 1.0 / (std::pow(10.0, snr / 10.0) * U.M * U.N);
            DDGridSignal y(U.M, U.N);
            for (std::size_t i = 0; i < y.values().size(); ++i)
                y.values()[i] = yd.values()[i] + std::sqrt(E_p) * yp.values()[i] + std::sqrt(N0) * w.values()[i];
            if (want_single()) out.single[p] = detect(layout, y, E_p, own.bits, truth);
            if (want_multi()) {
                for (std::size_t i = 0; i < y.values().size(); ++i) y.values()[i] += id.values()[i] + std::sqrt(E_p) * ip.values()[i];
                out.multi[p] = detect(layout, y, E_p, own.bits, truth);
            }
        }
        return out;
    }

private:
    const ExperimentConfig& cfg_;
    Scenario sc_;
    double tau_max_;
    std::vector<FactorizedDDFilter> filters_;
    std::vector<FrameLayout> layouts_;
    OracleConfig ocfg_;
    std::unique_ptr<WaveformOracle> oracle_;

    std::size_t index_of(int user) const {
        for (std::size_t i = 0; i < sc_.users.size(); ++i)
            if (sc_.users[i].user_id == user) return i;
        throw std::invalid_argument("unknown user");
    }

    FrameParts frame(std::size_t si, std::uint64_t trial, double E_d) const {
        const auto& layout = layouts_[si];
        Rng g(substream_seed(cfg_.master_seed, sc_.users[si].user_id, trial, StreamPurpose::bits));
        std::vector<std::uint8_t> bits(2 * static_cast<std::size_t>(layout.data_count()));
        for (auto& b : bits) b = static_cast<std::uint8_t>(g() & 1u);
        FrameParts fp{map_frame(layout, bits, E_d, 0.0).x, DDGridSignal(layout.M, layout.N), std::move(bits)};
        fp.pilot(layout.k_p, layout.l_p) = std::sqrt(E_d);
        return fp;
    }

    DDGridSignal oracle_link(std::size_t qi, std::size_t si, const ChannelRealization& ch, const DDGridSignal& x) const {
        const auto tx = oracle_->synth_frame(sc_.users[si], filters_[si], x);
        return oracle_->rx_sample(apply_channel(tx, ch, ocfg_), sc_.users[qi], filters_[qi]);
    }

    static void accumulate(DDGridSignal& acc, const DDGridSignal& v) {
        for (std::size_t i = 0; i < acc.values().size(); ++i) acc.values()[i] += v.values()[i];
    }

    PointOutcome detect(const FrameLayout& layout, const DDGridSignal& y, double E_p, const std::vector<std::uint8_t>& bits,
                        const DDTapSet& truth) const {
        const auto h = estimate_taps(y, layout, E_p);
        const auto sol = lsmr_solve(build_system(h, layout, cancel_pilot(y, h, layout, E_p)), cfg_.solver);
        const auto bh = demap(sol.x, 1.0, layout.data_count());
        PointOutcome o;
        for (std::size_t i = 0; i < bits.size(); ++i) o.errors += bits[i] != bh[i];
        o.bits = bits.size();
        const auto t = nmse_terms(h, truth);
        o.nmse_err = t.err;
        o.nmse_ref = t.ref;
        return o;
    }
};

}  // namespace

std::vector<LinkSweepPoint> run_link_sweep(const ExperimentConfig& cfg, int threads) {
    const LinkContext ctx(cfg);
    const std::size_t T = static_cast<std::size_t>(cfg.trials), U = cfg.users.size(), P = cfg.values.size();
    std::vector<UnitOutcome> units(U * T);
    parallel_for(U * T, threads, [&](std::size_t i) { units[i] = ctx.run(cfg.users[i / T], i % T); });

    std::vector<LinkSweepPoint> pts;
    for (std::size_t u = 0; u < U; ++u)
        for (LinkMode m : {LinkMode::single_user, LinkMode::multiuser}) {
            if ((m == LinkMode::single_user && !ctx.want_single()) || (m == LinkMode::multiuser && !ctx.want_multi())) continue;
            for (std::size_t p = 0; p < P; ++p) {
                LinkSweepPoint s;
                s.user = cfg.users[u];
                s.value = cfg.values[p];
                s.mode = m;
                s.trials = cfg.trials;
                for (std::size_t t = 0; t < T; ++t) {
                    const auto& o = (m == LinkMode::single_user ? units[u * T + t].single : units[u * T + t].multi)[p];
                    s.bit_errors += o.errors;
                    s.bits += o.bits;
                    s.nmse_err += o.nmse_err;
                    s.nmse_ref += o.nmse_ref;
                }
                pts.push_back(s);
            }
        }
    return pts;
}

CsvTable ber_table(const ExperimentConfig& cfg, const std::vector<LinkSweepPoint>& pts) {
    CsvTable t{{"user", "sweep_name", "sweep_value", "ber", "trials", "mode", "bit_errors", "bits", "ci95_half_width"}, {}};
    for (const auto& p : pts) {
        const double ber = static_cast<double>(p.bit_errors) / static_cast<double>(p.bits);
        t.rows.push_back({std::to_string(p.user), to_string(cfg.axis), format_double(p.value), format_double(ber), std::to_string(p.trials),
                          to_string(p.mode), std::to_string(p.bit_errors), std::to_string(p.bits),
                          format_double(wilson_interval(p.bit_errors, p.bits).half_width())});
    }
    return t;
}

CsvTable nmse_table(const ExperimentConfig& cfg, const std::vector<LinkSweepPoint>& pts) {
    CsvTable t{{"user", "sweep_name", "sweep_value", "nmse", "nmse_db", "trials", "mode"}, {}};
    for (const auto& p : pts) {
        const double v = p.nmse_err / p.nmse_ref;
        t.rows.push_back({std::to_string(p.user), to_string(cfg.axis), format_double(p.value), format_double(v),
                          format_double(10.0 * std::log10(v)), std::to_string(p.trials), to_string(p.mode)});
    }
    return t;
}

CsvTable run_ber_sweep(const ExperimentConfig& cfg, int threads) { return ber_table(cfg, run_link_sweep(cfg, threads)); }
CsvTable run_nmse_sweep(const ExperimentConfig& cfg, int threads) { return nmse_table(cfg, run_link_sweep(cfg, threads)); }

// ---------------------------------------------------------------- leakage

CsvTable run_leakage(const ExperimentConfig& cfg, int threads, RunLog* log) {
    const auto sc = table1_scenario();
    const auto& tx = sc.user(cfg.leak_tx_user);
    for (int q : cfg.leak_rx_users)
        if (q == cfg.leak_tx_user) throw std::invalid_argument("run_leakage: rx user equals tx user");
    const auto nus = nu_points(cfg);
    const std::size_t F = cfg.leak_filters.size(), V = nus.size(), D = static_cast<std::size_t>(cfg.leak_draws),
                      Q = cfg.leak_rx_users.size();
    struct Unit {
        double S = 0, S_fine = 0;
        std::vector<double> I, I_fine;
    };
    std::vector<Unit> units(F * V * D);
    parallel_for(units.size(), threads, [&](std::size_t i) {
        const auto kind = cfg.leak_filters[i / (V * D)];
        const double nu = nus[(i / D) % V];
        const auto d = static_cast<std::uint64_t>(i % D);
        const auto ch = channel_for(cfg, tx.user_id, d, nu);
        const auto fs = filter_for(cfg, tx, kind);
        Unit& u = units[i];
        // The first draw of every point also runs at twice the quadrature density.
        const bool refine = d == 0;
        u.S = carrier_energies(tx, fs, tx, fs, ch, cfg.quad_oversample).total;
        if (refine) u.S_fine = carrier_energies(tx, fs, tx, fs, ch, 2 * cfg.quad_oversample).total;
        for (int qid : cfg.leak_rx_users) {
            const auto& q = sc.user(qid);
            const auto fq = filter_for(cfg, q, kind);
            u.I.push_back(carrier_energies(q, fq, tx, fs, ch, cfg.quad_oversample).total);
            if (refine) u.I_fine.push_back(carrier_energies(q, fq, tx, fs, ch, 2 * cfg.quad_oversample).total);
        }
    });

    CsvTable t{{"tx_user", "rx_user", "nu_max_hz", "filter", "ratio_db"}, {}};
    for (std::size_t f = 0; f < F; ++f)
        for (std::size_t v = 0; v < V; ++v)
            for (std::size_t q = 0; q < Q; ++q) {
                double I = 0, S = 0;
                for (std::size_t d = 0; d < D; ++d) {
                    const auto& u = units[(f * V + v) * D + d];
                    I += u.I[q];
                    S += u.S;
                }
                const auto& first = units[(f * V + v) * D];
                const double coarse = 10 * std::log10(first.I[q] / first.S), fine = 10 * std::log10(first.I_fine[q] / first.S_fine);
                const double delta = (std::isinf(coarse) && std::isinf(fine)) ? 0.0 : std::abs(coarse - fine);
                if (log && !(delta <= 0.5))
                    log->warnings.push_back("leakage UT-" + std::to_string(tx.user_id) + " -> UT-" + std::to_string(cfg.leak_rx_users[q]) + " " +
                                            to_string(cfg.leak_filters[f]) + " at " + format_double(nus[v]) + " Hz moved " +
                                            format_double(delta) + " dB under quadrature refinement");
                t.rows.push_back({std::to_string(tx.user_id), std::to_string(cfg.leak_rx_users[q]), format_double(nus[v]),
                                  to_string(cfg.leak_filters[f]), format_double(10.0 * std::log10(I / S))});
            }
    return t;
}

// ---------------------------------------------------------------- heatmap

CsvTable run_heatmap(const ExperimentConfig& cfg, int threads) {
    const auto sc = table1_scenario();
    const auto& q = sc.user(cfg.heat_rx_user);
    const auto fq = filter_for(cfg, q, cfg.filter);
    const std::size_t D = static_cast<std::size_t>(cfg.heat_draws), S = sc.users.size();
    std::vector<CarrierEnergies> units(D * S);
    parallel_for(units.size(), threads, [&](std::size_t i) {
        const auto& s = sc.users[i % S];
        const auto ch = channel_for(cfg, s.user_id, i / S, cfg.nu_max_hz);
        units[i] = carrier_energies(q, fq, s, filter_for(cfg, s, cfg.filter), ch, cfg.quad_oversample, true);
    });
    MuiHeatmap map(q);
    for (std::size_t i = 0; i < units.size(); ++i) {
        const auto& s = sc.users[i % S];
        if (s.user_id == q.user_id)
            map.add_useful(units[i]);
        else
            map.add_interferer(s, units[i]);
    }
    const auto r = map.ratio_db();
    CsvTable t{{"k", "l", "ratio_db"}, {}};
    for (int k = 0; k < q.M; ++k)
        for (int l = 0; l < q.N; ++l) t.rows.push_back({std::to_string(k), std::to_string(l), format_double(r[static_cast<std::size_t>(k * q.N + l)])});
    return t;
}

CsvTable validation_table(const std::vector<ValidationCheck>& checks) {
    CsvTable t{{"check", "value", "tolerance", "status"}, {}};
    for (const auto& c : checks) t.rows.push_back({c.name, format_double(c.value), format_double(c.tolerance), c.pass ? "PASS" : "FAIL"});
    return t;
}

}  // namespace zakmul
