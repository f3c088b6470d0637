#pragma once

// Brute-force quadrature references, independent of the closed forms in eff_channel.

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <vector>

#include "zakmul/channel.hpp"
#include "zakmul/filters.hpp"

namespace zakmul::oracle {

using GL = boost::math::quadrature::gauss<double, 30>;

// Breakpoints of S_beta((x - c) / W).
inline std::vector<double> shape_breaks(double beta, double c, double W) {
    if (beta <= 0) return {c - 0.5 * W, c + 0.5 * W};
    return {c - 0.5 * (1 + beta) * W, c - 0.5 * (1 - beta) * W, c + 0.5 * (1 - beta) * W,
            c + 0.5 * (1 + beta) * W};
}

// Integral of f over [lo, hi], split at breaks and into at least `chunks` equal parts per
// panel; `rate` (rad per unit x) adds chunks so each spans at most ~3 rad of oscillation.
template <class F>
cplx integrate_split(F f, double lo, double hi, std::vector<double> breaks, int chunks, double rate = 0.0) {
    if (!(hi > lo)) return {};
    breaks.push_back(lo);
    breaks.push_back(hi);
    std::sort(breaks.begin(), breaks.end());
    cplx acc{};
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = std::max(lo, breaks[i]), b = std::min(hi, breaks[i + 1]);
        if (!(b > a)) continue;
        const int n = std::max(chunks, static_cast<int>(std::ceil(rate * (b - a) / 3.0)));
        const double h = (b - a) / n;
        for (int c = 0; c < n; ++c) acc += GL::integrate(f, a + c * h, a + (c + 1) * h);
    }
    return acc;
}

// Effective channel of receive(q) o channel o transmit(s) from the composed operator kernel:
//   K(t, s) = W_Tq(t - tau_q) W_Ts(s - tau_s) sum_i h_i I_i(t, s),
//   I_i(t, s) = e^{-j2 pi nu_i tau_i} int W_Bq(f - nu_q) W_Bs(f - nu_i - nu_s) e^{j2 pi f t}
//               e^{-j2 pi (f - nu_i)(tau_i + s)} df,
//   h(tau, nu) = int K(s + tau, s) e^{-j2 pi nu s} ds.
// Every integral is evaluated by brute-force Gauss-Legendre quadrature.
inline cplx composed_kernel_channel(const FactorizedDDFilter& q, const FactorizedDDFilter& s,
                                    const ChannelRealization& ch, double tau, double nu, int chunks = 8) {
    auto inner = [&](const Path& p, double t, double sv) {
        auto integrand = [&](double f) {
            return q.eval_WB(f) * s.eval_WB(f - p.doppler) * cis(kTwoPi * f * t) *
                   cis(-kTwoPi * (f - p.doppler) * (p.delay + sv));
        };
        const auto b1 = shape_breaks(q.bt(), q.nu_shift, q.B);
        const auto b2 = shape_breaks(s.bt(), s.nu_shift + p.doppler, s.B);
        const double lo = std::max(b1.front(), b2.front()), hi = std::min(b1.back(), b2.back());
        auto br = b1;
        br.insert(br.end(), b2.begin(), b2.end());
        return cis(-kTwoPi * p.doppler * p.delay) * integrate_split(integrand, lo, hi, br, chunks,
                                                                           kTwoPi * std::abs(tau - p.delay));
    };
    auto outer = [&](double sv) {
        const cplx win = q.eval_WT(sv + tau) * s.eval_WT(sv);
        if (win == cplx{}) return cplx{};
        cplx acc{};
        for (const auto& p : ch.paths) acc += p.gain * inner(p, sv + tau, sv);
        return win * acc * cis(-kTwoPi * nu * sv);
    };
    auto br = shape_breaks(s.bn(), s.tau_shift, s.T);
    for (double b : shape_breaks(q.bn(), q.tau_shift, q.T)) br.push_back(b - tau);
    const double lo = std::max(s.window_lo(), q.window_lo() - tau);
    const double hi = std::min(s.window_hi(), q.window_hi() - tau);
    double nu_span = std::abs(nu);
    for (const auto& p : ch.paths) nu_span = std::max(nu_span, std::abs(nu - p.doppler));
    return integrate_split(outer, lo, hi, br, chunks, kTwoPi * nu_span);
}

}  // namespace zakmul::oracle
