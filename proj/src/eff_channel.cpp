#include "zakmul/eff_channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace zakmul {

DelayKernel::DelayKernel(const FactorizedDDFilter& q, const FactorizedDDFilter& s, double path_doppler) {
    const double delta = q.nu_shift - s.nu_shift - path_doppler;
    const auto wq = PiecewiseExp::srrc_shape(q.bt(), delta, q.B, 1.0 / std::sqrt(q.B));
    const auto ws = PiecewiseExp::srrc_shape(s.bt(), 0.0, s.B, 1.0 / std::sqrt(s.B));
    prod_ = wq * ws;
}

cplx zeta(const FactorizedDDFilter& q, const FactorizedDDFilter& s, const Path& p, double tau) {
    return DelayKernel(q, s, p.doppler)(tau - p.delay);
}

namespace {

cplx eta_with(const PiecewiseExp& wq0, const FactorizedDDFilter& q, const FactorizedDDFilter& s,
              const Path& p, double tau, double nu) {
    const double c = tau - q.tau_shift + s.tau_shift;
    const auto ws = PiecewiseExp::srrc_shape(s.bn(), c, s.T, 1.0 / std::sqrt(s.T));
    const auto prod = wq0 * ws;
    if (prod.empty()) return {};
    const double dnu = nu - p.doppler;
    return prod.integrate(-kTwoPi * dnu) * cis(kTwoPi * dnu * c);
}

}  // namespace

cplx eta(const FactorizedDDFilter& q, const FactorizedDDFilter& s, const Path& p, double tau, double nu) {
    const auto wq0 = PiecewiseExp::srrc_shape(q.bn(), 0.0, q.T, 1.0 / std::sqrt(q.T));
    return eta_with(wq0, q, s, p, tau, nu);
}

EffectiveChannel::EffectiveChannel(FactorizedDDFilter q, FactorizedDDFilter s, ChannelRealization ch)
    : q_(q), s_(s), ch_(std::move(ch)) {
    for (const auto& p : ch_.paths) zk_.emplace_back(q_, s_, p.doppler);
    wq0_ = PiecewiseExp::srrc_shape(q_.bn(), 0.0, q_.T, 1.0 / std::sqrt(q_.T));
}

cplx EffectiveChannel::operator()(double tau, double nu) const {
    cplx acc{};
    for (std::size_t i = 0; i < ch_.paths.size(); ++i) {
        const Path& p = ch_.paths[i];
        if (zk_[i].identically_zero()) continue;
        const cplx et = eta_with(wq0_, q_, s_, p, tau, nu);
        if (et == cplx{}) continue;
        const cplx ze = zk_[i](tau - p.delay);
        const double ph = s_.nu_shift * (tau - p.delay) + p.doppler * (tau + s_.tau_shift - p.delay) -
                          nu * s_.tau_shift;
        acc += p.gain * cis(kTwoPi * ph) * ze * et;
    }
    return acc;
}

DDTapSet discrete_self_channel(const EffectiveChannel& e, const UserAllocation& q, const TapBox& box) {
    DDTapSet h(box.k_min, box.k_max, box.l_min, box.l_max);
    for (int k = box.k_min; k <= box.k_max; ++k)
        for (int l = box.l_min; l <= box.l_max; ++l) h.ref(k, l) = e(k * q.delay_bin(), l * q.doppler_bin());
    return h;
}

TapBox default_tap_box(const UserAllocation& q, double tau_max, double nu_max, int a1, int a2) {
    const int kmax = static_cast<int>(std::ceil(q.B * tau_max - 1e-9));
    // Doppler spread of h_eff is 2 nu_max + 1/T, so each side needs nu_max + 1/(2T).
    const int lspan = static_cast<int>(std::ceil(q.N * (nu_max + 0.5 / q.T) / q.nu_p - 1e-9));
    return {-a1, kmax + a2 + 2, -lspan, lspan};
}

double boundary_to_peak(const DDTapSet& h) {
    double peak = 0, edge = 0;
    for (int k = h.k_min(); k <= h.k_max(); ++k)
        for (int l = h.l_min(); l <= h.l_max(); ++l) {
            const double a = std::abs(h.at(k, l));
            peak = std::max(peak, a);
            if (k == h.k_min() || k == h.k_max() || l == h.l_min() || l == h.l_max()) edge = std::max(edge, a);
        }
    return peak > 0 ? edge / peak : 0.0;
}

void drop_below_floor(DDTapSet& h, double rel_floor) {
    double peak = 0;
    for (int k = h.k_min(); k <= h.k_max(); ++k)
        for (int l = h.l_min(); l <= h.l_max(); ++l) peak = std::max(peak, std::abs(h.at(k, l)));
    for (int k = h.k_min(); k <= h.k_max(); ++k)
        for (int l = h.l_min(); l <= h.l_max(); ++l)
            if (std::abs(h.at(k, l)) < rel_floor * peak) h.ref(k, l) = 0;
}

DDTapSet sample_taps_cross(const EffectiveChannel& e, const UserAllocation& q, const UserAllocation& s,
                           int k, int l, const TapBox& box, int n_rep, int m_rep) {
    DDTapSet out(box.k_min, box.k_max, box.l_min, box.l_max);
    for (int kp = box.k_min; kp <= box.k_max; ++kp)
        for (int lp = box.l_min; lp <= box.l_max; ++lp) {
            const double tau = kp * q.delay_bin(), nu = lp * q.doppler_bin();
            cplx acc{};
            for (int n = -n_rep; n <= n_rep; ++n) {
                const double tn = (k + static_cast<double>(n) * s.M) * s.delay_bin();
                const cplx qp = cis(kTwoPi * static_cast<double>(pos_mod(static_cast<long>(n) * l, s.N)) / s.N);
                for (int m = -m_rep; m <= m_rep; ++m) {
                    const double vm = (l + static_cast<double>(m) * s.N) * s.doppler_bin();
                    acc += qp * e(tau - tn, nu - vm) * cis(kTwoPi * (nu - vm) * tn);
                }
            }
            out.ref(kp, lp) = acc;
        }
    return out;
}

PulseWindow pulse_window(const FactorizedDDFilter& f, double rate) {
    PulseWindow w{0, {}};
    const double centre = rate * f.tau_shift;  // in samples
    const double half = 0.5 * rate * f.T;
    if (f.bn() == 0.0) {
        // Half-open [centre - half, centre + half) with a tolerance for rounding of the edges.
        const long lo = static_cast<long>(std::ceil(centre - half - 1e-7));
        const long hi = static_cast<long>(std::ceil(centre + half - 1e-7));
        w.first = lo;
        w.weights.assign(static_cast<std::size_t>(hi - lo), 1.0 / std::sqrt(f.T));
        return w;
    }
    const double ext = (1.0 + f.bn()) * half;
    const long lo = static_cast<long>(std::floor(centre - ext));
    const long hi = static_cast<long>(std::ceil(centre + ext));
    long first = hi + 1, last = lo - 1;
    std::vector<double> all;
    for (long j = lo; j <= hi; ++j) {
        const double v = f.WT0(static_cast<double>(j) / rate - f.tau_shift);
        all.push_back(v);
        if (v != 0.0) {
            first = std::min(first, j);
            last = std::max(last, j);
        }
    }
    if (first > last) return w;
    w.first = first;
    w.weights.assign(all.begin() + (first - lo), all.begin() + (last - lo + 1));
    return w;
}

CouplingTable::CouplingTable(const FactorizedDDFilter& fq, const FactorizedDDFilter& fs,
                             const ChannelRealization& ch, long rate, long d_min, long d_max)
    : d_min_(d_min) {
    const double dt = 1.0 / static_cast<double>(rate);
    for (const auto& p : ch.paths) {
        const DelayKernel C(fq, fs, p.doppler);
        std::vector<cplx> t(static_cast<std::size_t>(d_max - d_min + 1));
        if (!C.identically_zero()) {
            const cplx pre = p.gain * cis(-kTwoPi * p.doppler * p.delay);
            for (long d = d_min; d <= d_max; ++d) {
                const double D = static_cast<double>(d) * dt - p.delay;
                t[static_cast<std::size_t>(d - d_min)] = pre * cis(kTwoPi * fs.nu_shift * D) * C(D);
            }
        }
        tab_.push_back(std::move(t));
    }
}

namespace {

long integer_rate(double B) {
    const long r = std::lround(B);
    if (std::abs(B - static_cast<double>(r)) > 1e-6 || r <= 0)
        throw std::invalid_argument("bandwidths must be whole hertz");
    return r;
}

}  // namespace

LatticeLink::LatticeLink(const UserAllocation& q, const FactorizedDDFilter& fq, const UserAllocation& s,
                         const FactorizedDDFilter& fs, const ChannelRealization& ch)
    : q_(q), s_(s) {
    const long Bq = integer_rate(q.B), Bs = integer_rate(s.B);
    const long L = std::lcm(Bq, Bs);
    const long aq = L / Bq, as = L / Bs;
    const PulseWindow pt = pulse_window(fs, s.B), pr = pulse_window(fq, q.B);
    jt_lo_ = pt.first;
    jr_lo_ = pr.first;
    wt_ = pt.weights;
    wr_ = pr.weights;
    const long Jt = static_cast<long>(wt_.size()), Jr = static_cast<long>(wr_.size());
    if (Jt == 0 || Jr == 0) throw std::invalid_argument("empty pulse window");
    const long d_min = jr_lo_ * aq - (jt_lo_ + Jt - 1) * as;
    const long d_max = (jr_lo_ + Jr - 1) * aq - jt_lo_ * as;
    const CouplingTable tab(fq, fs, ch, L, d_min, d_max);
    A_.assign(static_cast<std::size_t>(Jr * Jt), cplx{});
    for (std::size_t i = 0; i < tab.paths(); ++i) {
        const double nu = ch.paths[i].doppler;
        for (long r = 0; r < Jr; ++r) {
            const double t = static_cast<double>(jr_lo_ + r) / q.B;
            const cplx rot = cis(kTwoPi * nu * t);
            cplx* row = &A_[static_cast<std::size_t>(r * Jt)];
            const long base = (jr_lo_ + r) * aq - jt_lo_ * as;
            for (long c = 0; c < Jt; ++c) row[c] += rot * tab.term(i, base - c * as);
        }
    }
}

std::vector<cplx> LatticeLink::tx_amplitudes(const DDGridSignal& x) const {
    const long Jt = static_cast<long>(wt_.size());
    std::vector<cplx> c(static_cast<std::size_t>(Jt));
    // Per-k Doppler synthesis, one entry per residue of n mod N.
    std::vector<cplx> syn(static_cast<std::size_t>(s_.N));
    const double amp = std::sqrt(s_.tau_p);
    for (int k = 0; k < s_.M; ++k) {
        for (int r = 0; r < s_.N; ++r) {
            cplx acc{};
            for (int l = 0; l < s_.N; ++l)
                acc += x(k, l) * cis(kTwoPi * static_cast<double>((static_cast<long>(r) * l) % s_.N) / s_.N);
            syn[static_cast<std::size_t>(r)] = acc;
        }
        for (long idx = 0; idx < Jt; ++idx) {
            const long j = jt_lo_ + idx;
            if (pos_mod(j, s_.M) != k) continue;
            const long n = floor_div(j, s_.M);
            c[static_cast<std::size_t>(idx)] = amp * wt_[static_cast<std::size_t>(idx)] *
                                               syn[static_cast<std::size_t>(pos_mod(n, s_.N))];
        }
    }
    return c;
}

std::vector<cplx> LatticeLink::filtered_samples(const DDGridSignal& x_s) const {
    const auto c = tx_amplitudes(x_s);
    const std::size_t Jt = wt_.size(), Jr = wr_.size();
    std::vector<cplx> z(Jr);
    for (std::size_t r = 0; r < Jr; ++r) {
        const cplx* row = &A_[r * Jt];
        cplx acc{};
        for (std::size_t j = 0; j < Jt; ++j) acc += row[j] * c[j];
        z[r] = acc;
    }
    return z;
}

DDGridSignal LatticeLink::rx_samples(const std::vector<cplx>& z) const {
    DDGridSignal y(q_.M, q_.N);
    const double amp = std::sqrt(q_.tau_p);
    std::vector<cplx> ph(static_cast<std::size_t>(q_.N));
    for (int r = 0; r < q_.N; ++r) ph[static_cast<std::size_t>(r)] = cis(-kTwoPi * r / q_.N);
    for (std::size_t idx = 0; idx < z.size(); ++idx) {
        const long j = jr_lo_ + static_cast<long>(idx);
        const int k = static_cast<int>(pos_mod(j, q_.M));
        const long n = floor_div(j, q_.M);
        const cplx v = amp * wr_[idx] * z[idx];
        for (int l = 0; l < q_.N; ++l) y(k, l) += v * ph[static_cast<std::size_t>(pos_mod(n * l, q_.N))];
    }
    return y;
}

DDGridSignal LatticeLink::apply(const DDGridSignal& x_s) const { return rx_samples(filtered_samples(x_s)); }

std::vector<double> LatticeLink::output_energy() const {
    // y[k', l'] = sum_j u_j(k', l') c_j with c_j = sqrt(tau_p,s) wt_j e^{j2 pi n_j l / N_s}; summing
    // |.|^2 over the s-carriers (k, l) is Parseval over l within each (k, n mod N_s) bucket.
    const long Jt = static_cast<long>(wt_.size()), Jr = static_cast<long>(wr_.size());
    std::vector<double> out(static_cast<std::size_t>(q_.M * q_.N), 0.0);
    std::vector<int> bucket(static_cast<std::size_t>(Jt));
    for (long c = 0; c < Jt; ++c) {
        const long j = jt_lo_ + c;
        bucket[static_cast<std::size_t>(c)] = static_cast<int>(pos_mod(j, s_.M) * s_.N + pos_mod(floor_div(j, s_.M), s_.N));
    }
    std::vector<cplx> u(static_cast<std::size_t>(Jt)), acc(static_cast<std::size_t>(s_.M * s_.N));
    const double aq = std::sqrt(q_.tau_p), scale = s_.tau_p * s_.N;
    for (int kq = 0; kq < q_.M; ++kq)
        for (int lq = 0; lq < q_.N; ++lq) {
            std::fill(u.begin(), u.end(), cplx{});
            for (long r = 0; r < Jr; ++r) {
                const long jr = jr_lo_ + r;
                if (pos_mod(jr, q_.M) != kq) continue;
                const long n = floor_div(jr, q_.M);
                const cplx a = aq * wr_[static_cast<std::size_t>(r)] *
                               cis(-kTwoPi * static_cast<double>(pos_mod(n * lq, q_.N)) / q_.N);
                const cplx* row = &A_[static_cast<std::size_t>(r * Jt)];
                for (long c = 0; c < Jt; ++c) u[static_cast<std::size_t>(c)] += a * row[c];
            }
            std::fill(acc.begin(), acc.end(), cplx{});
            for (long c = 0; c < Jt; ++c)
                acc[static_cast<std::size_t>(bucket[static_cast<std::size_t>(c)])] += wt_[static_cast<std::size_t>(c)] * u[static_cast<std::size_t>(c)];
            double e = 0;
            for (const auto& v : acc) e += std::norm(v);
            out[static_cast<std::size_t>(kq * q_.N + lq)] = scale * e;
        }
    return out;
}

DDGridSignal LatticeLink::response(int k, int l) const {
    DDGridSignal x(s_.M, s_.N);
    x(k, l) = 1.0;
    return apply(x);
}

}  // namespace zakmul
