#include "zakmul/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "zakmul/eff_channel.hpp"

namespace zakmul {

namespace {

long whole_hertz(double B) {
    const long r = std::lround(B);
    if (std::abs(B - static_cast<double>(r)) > 1e-6 || r <= 0) throw std::invalid_argument("bandwidths must be whole hertz");
    return r;
}

// Weights w[a][b] = |[a/A, (a+1)/A) ∩ [b/Bn, (b+1)/Bn)| * A, so each row sums to 1.
std::vector<std::vector<std::pair<int, double>>> overlap_weights(int A, int Bn) {
    std::vector<std::vector<std::pair<int, double>>> w(static_cast<std::size_t>(A));
    for (int a = 0; a < A; ++a) {
        const long lo = static_cast<long>(a) * Bn, hi = lo + Bn;  // in units of 1/(A Bn)
        for (int b = static_cast<int>(lo / A); b < Bn && static_cast<long>(b) * A < hi; ++b) {
            const long ov = std::min(hi, static_cast<long>(b + 1) * A) - std::max(lo, static_cast<long>(b) * A);
            if (ov > 0) w[static_cast<std::size_t>(a)].emplace_back(b, static_cast<double>(ov) / Bn);
        }
    }
    return w;
}

}  // namespace

CarrierEnergies carrier_energies(const UserAllocation& q, const FactorizedDDFilter& fq, const UserAllocation& s,
                                 const FactorizedDDFilter& fs, const ChannelRealization& ch, int oversample,
                                 bool per_carrier) {
    if (oversample < 1) throw std::invalid_argument("carrier_energies: oversample must be >= 1");
    const long Bs = whole_hertz(s.B);
    const long R = std::lcm(whole_hertz(q.B), Bs) * oversample;
    const long as = R / Bs;
    const PulseWindow gate = pulse_window(fq, static_cast<double>(R));
    const PulseWindow tx = pulse_window(fs, s.B);
    const long Jg = static_cast<long>(gate.weights.size()), Jt = static_cast<long>(tx.weights.size());
    CarrierEnergies out;
    out.M = s.M;
    out.N = s.N;
    if (per_carrier) out.per_carrier.assign(static_cast<std::size_t>(s.M * s.N), 0.0);
    if (Jg == 0 || Jt == 0) return out;

    const long d_min = gate.first - (tx.first + Jt - 1) * as;
    const long d_max = gate.first + Jg - 1 - tx.first * as;
    const CouplingTable tab(fq, fs, ch, R, d_min, d_max);
    const std::size_t P = tab.paths();

    // Pulses sharing (k, n mod N) carry the same phase for every carrier l, so they add before |.|^2.
    std::vector<int> bucket(static_cast<std::size_t>(Jt));
    for (long c = 0; c < Jt; ++c) {
        const long j = tx.first + c;
        bucket[static_cast<std::size_t>(c)] = static_cast<int>(pos_mod(j, s.M) * s.N + pos_mod(floor_div(j, s.M), s.N));
    }
    std::vector<cplx> twiddle(static_cast<std::size_t>(s.N));
    for (int m = 0; m < s.N; ++m) twiddle[static_cast<std::size_t>(m)] = cis(kTwoPi * m / s.N);

    std::vector<cplx> a(static_cast<std::size_t>(s.M * s.N)), rot(P);
    double total = 0;
    for (long g = 0; g < Jg; ++g) {
        const long i = gate.first + g;
        const double t = static_cast<double>(i) / static_cast<double>(R);
        for (std::size_t p = 0; p < P; ++p) rot[p] = cis(kTwoPi * ch.paths[p].doppler * t);
        std::fill(a.begin(), a.end(), cplx{});
        for (long c = 0; c < Jt; ++c) {
            const long d = i - (tx.first + c) * as;
            cplx z{};
            for (std::size_t p = 0; p < P; ++p) z += rot[p] * tab.term(p, d);
            a[static_cast<std::size_t>(bucket[static_cast<std::size_t>(c)])] += tx.weights[static_cast<std::size_t>(c)] * z;
        }
        const double w2 = gate.weights[static_cast<std::size_t>(g)] * gate.weights[static_cast<std::size_t>(g)];
        double e = 0;
        for (const auto& v : a) e += std::norm(v);
        total += w2 * e;
        if (!per_carrier) continue;
        for (int k = 0; k < s.M; ++k) {
            const cplx* row = &a[static_cast<std::size_t>(k * s.N)];
            for (int l = 0; l < s.N; ++l) {
                cplx acc{};
                for (int r = 0; r < s.N; ++r) acc += row[r] * twiddle[static_cast<std::size_t>((r * l) % s.N)];
                out.per_carrier[static_cast<std::size_t>(k * s.N + l)] += w2 * std::norm(acc);
            }
        }
    }
    // Sum over l of |DFT|^2 is N times the bucket energy (Parseval).
    out.total = total * s.tau_p * s.N / static_cast<double>(R);
    for (auto& v : out.per_carrier) v *= s.tau_p / static_cast<double>(R);
    return out;
}

double LeakageReport::ratio_db() const { return 10.0 * std::log10(I / S); }

LeakageReport leakage_ratio(const UserAllocation& q, const FactorizedDDFilter& fq, const UserAllocation& s,
                            const FactorizedDDFilter& fs, const ChannelRealization& ch, const LeakageOptions& o) {
    LeakageReport r;
    r.rx_user = q.user_id;
    r.tx_user = s.user_id;
    r.I = carrier_energies(q, fq, s, fs, ch, o.oversample).total;
    r.S = carrier_energies(s, fs, s, fs, ch, o.oversample).total;
    if (!(r.S > 0)) throw std::invalid_argument("leakage_ratio: useful energy is not positive");
    if (o.check_refinement) {
        LeakageReport fine = r;
        fine.I = carrier_energies(q, fq, s, fs, ch, 2 * o.oversample).total;
        fine.S = carrier_energies(s, fs, s, fs, ch, 2 * o.oversample).total;
        const double a = r.ratio_db(), b = fine.ratio_db();
        // Both -inf means the pair is exactly disjoint; nothing to refine.
        r.refinement_delta_db = (std::isinf(a) && std::isinf(b)) ? 0.0 : std::abs(a - b);
        r.refinement_ok = r.refinement_delta_db <= o.refinement_tol_db;
        if (!r.refinement_ok)
            std::cerr << "warning: leakage UT-" << s.user_id << " -> UT-" << q.user_id << " moved by " << r.refinement_delta_db
                      << " dB when the quadrature was refined\n";
    }
    return r;
}

LeakageReport average_leakage(std::span<const LeakageReport> draws) {
    if (draws.empty()) throw std::invalid_argument("average_leakage: no draws");
    LeakageReport r;
    r.rx_user = draws.front().rx_user;
    r.tx_user = draws.front().tx_user;
    for (const auto& d : draws) {
        if (d.rx_user != r.rx_user || d.tx_user != r.tx_user) throw std::invalid_argument("average_leakage: mixed pairs");
        r.I += d.I;
        r.S += d.S;
        r.refinement_ok = r.refinement_ok && d.refinement_ok;
        r.refinement_delta_db = std::max(r.refinement_delta_db, d.refinement_delta_db);
    }
    return r;
}

void MuiHeatmap::add_useful(const CarrierEnergies& self) {
    if (self.M != q_.M || self.N != q_.N || self.per_carrier.size() != cells())
        throw std::invalid_argument("MuiHeatmap: useful energies must be per-carrier on the receiver grid");
    for (std::size_t i = 0; i < cells(); ++i) useful_[i] += self.per_carrier[i];
}

void MuiHeatmap::add_interferer(const UserAllocation& s, const CarrierEnergies& e) {
    if (e.M != s.M || e.N != s.N || e.per_carrier.size() != static_cast<std::size_t>(s.M * s.N))
        throw std::invalid_argument("MuiHeatmap: interferer energies must be per-carrier");
    const double scale = q_.B / s.B;
    const auto wk = overlap_weights(q_.M, s.M), wl = overlap_weights(q_.N, s.N);
    for (int k = 0; k < q_.M; ++k)
        for (int l = 0; l < q_.N; ++l) {
            double v = 0;
            for (const auto& [ks, a] : wk[static_cast<std::size_t>(k)])
                for (const auto& [ls, b] : wl[static_cast<std::size_t>(l)]) v += a * b * e.at(ks, ls);
            mui_[static_cast<std::size_t>(k * q_.N + l)] += scale * v;
        }
}

std::vector<double> MuiHeatmap::ratio() const {
    std::vector<double> r(cells());
    for (std::size_t i = 0; i < cells(); ++i) r[i] = mui_[i] / useful_[i];
    return r;
}

std::vector<double> MuiHeatmap::ratio_db() const {
    auto r = ratio();
    for (auto& v : r) v = 10.0 * std::log10(v);
    return r;
}

double ber(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx) {
    if (tx.size() != rx.size() || tx.empty()) throw std::invalid_argument("ber: bit vectors must be equal-length and non-empty");
    std::size_t diff = 0;
    for (std::size_t i = 0; i < tx.size(); ++i) diff += (tx[i] != 0) != (rx[i] != 0);
    return static_cast<double>(diff) / static_cast<double>(tx.size());
}

NmseTerms nmse_terms(const DDTapSet& estimate, const DDTapSet& truth, double rel_floor) {
    double peak = 0;
    for (int k = truth.k_min(); k <= truth.k_max(); ++k)
        for (int l = truth.l_min(); l <= truth.l_max(); ++l) peak = std::max(peak, std::abs(truth.at(k, l)));
    NmseTerms t;
    const double cut = rel_floor * peak;
    for (int k = truth.k_min(); k <= truth.k_max(); ++k)
        for (int l = truth.l_min(); l <= truth.l_max(); ++l) {
            const cplx h = truth.at(k, l);
            if (std::abs(h) < cut || h == cplx{}) continue;
            t.err += std::norm(estimate.at(k, l) - h);
            t.ref += std::norm(h);
        }
    return t;
}

Interval wilson_interval(std::uint64_t k, std::uint64_t n, double z) {
    if (n == 0 || k > n) throw std::invalid_argument("wilson_interval: need 0 <= k <= n, n > 0");
    const double nn = static_cast<double>(n), p = static_cast<double>(k) / nn, z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

}  // namespace zakmul
