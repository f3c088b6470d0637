#include "zakmul/dd_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace zakmul {

double DDGridSignal::energy() const {
    double e = 0;
    for (const auto& z : v_) e += std::norm(z);
    return e;
}

cplx qp_access(const DDGridSignal& x, long k, long l) {
    const long M = x.M(), N = x.N();
    const long n = floor_div(k, M);
    const long kk = k - n * M;
    const long ll = pos_mod(l, N);
    // The phase depends on l only through l mod N.
    const long ph = pos_mod(n * ll, N);
    return cis(kTwoPi * static_cast<double>(ph) / static_cast<double>(N)) *
           x(static_cast<int>(kk), static_cast<int>(ll));
}

DDTapSet::DDTapSet(int k_min, int k_max, int l_min, int l_max)
    : k_min_(k_min), k_max_(k_max), l_min_(l_min), l_max_(l_max) {
    if (k_max < k_min || l_max < l_min) throw std::invalid_argument("empty tap box");
    v_.assign(static_cast<std::size_t>(k_max - k_min + 1) * (l_max - l_min + 1), cplx{});
}

cplx DDTapSet::at(int k, int l) const {
    if (!in_box(k, l)) return {};
    return v_[static_cast<std::size_t>(k - k_min_) * (l_max_ - l_min_ + 1) + (l - l_min_)];
}

cplx& DDTapSet::ref(int k, int l) {
    if (!in_box(k, l)) throw std::out_of_range("tap outside box");
    return v_[static_cast<std::size_t>(k - k_min_) * (l_max_ - l_min_ + 1) + (l - l_min_)];
}

double DDTapSet::energy() const {
    double e = 0;
    for (const auto& z : v_) e += std::norm(z);
    return e;
}

void DDTapSet::prune(double rel_floor) {
    double peak = 0;
    for (const auto& z : v_) peak = std::max(peak, std::abs(z));
    const double cut = rel_floor * peak;
    for (auto& z : v_)
        if (std::abs(z) < cut) z = {};
}

double TDSignal::energy() const {
    double e = 0;
    for (const auto& z : samples) e += std::norm(z);
    return e / sample_rate;
}

DDGridSignal twisted_conv_discrete(const DDTapSet& h, const DDGridSignal& x) {
    const int M = x.M(), N = x.N();
    const double MN = static_cast<double>(M) * N;
    DDGridSignal y(M, N);
    for (int k = h.k_min(); k <= h.k_max(); ++k)
        for (int l = h.l_min(); l <= h.l_max(); ++l) {
            const cplx hk = h.at(k, l);
            if (hk == cplx{}) continue;
            for (int kp = 0; kp < M; ++kp) {
                // l (k'-k) only matters mod MN.
                const long ph = pos_mod(static_cast<long>(l) * (kp - k), static_cast<long>(MN));
                const cplx w = hk * cis(kTwoPi * static_cast<double>(ph) / MN);
                for (int lp = 0; lp < N; ++lp) y(kp, lp) += w * qp_access(x, kp - k, lp - l);
            }
        }
    return y;
}

DDTapSet twisted_conv_taps(const DDTapSet& h1, const DDTapSet& h2, int M, int N) {
    const double MN = static_cast<double>(M) * N;
    DDTapSet g(h1.k_min() + h2.k_min(), h1.k_max() + h2.k_max(), h1.l_min() + h2.l_min(),
               h1.l_max() + h2.l_max());
    for (int a = h1.k_min(); a <= h1.k_max(); ++a)
        for (int b = h1.l_min(); b <= h1.l_max(); ++b) {
            const cplx c1 = h1.at(a, b);
            if (c1 == cplx{}) continue;
            for (int c = h2.k_min(); c <= h2.k_max(); ++c)
                for (int d = h2.l_min(); d <= h2.l_max(); ++d) {
                    const long ph = pos_mod(static_cast<long>(b) * c, static_cast<long>(MN));
                    g.ref(a + c, b + d) += c1 * h2.at(c, d) * cis(kTwoPi * ph / MN);
                }
        }
    return g;
}

namespace {

// Samples per delay bin; throws unless sample_rate = O * B for integer O >= 1.
long samples_per_bin(const UserAllocation& u, double sample_rate) {
    const double o = sample_rate / u.B;
    const long oi = std::lround(o);
    if (oi < 1 || std::abs(o - oi) > 1e-9) throw std::invalid_argument("sample_rate must be O*B");
    return oi;
}

}  // namespace

TDSignal inverse_zak(const DDGridSignal& x_dd, const UserAllocation& u, double sample_rate,
                     double span) {
    const long O = samples_per_bin(u, sample_rate);
    const long periods = static_cast<long>(std::floor(span / u.tau_p + 1e-9));
    const long per = O * u.M;  // samples per delay period
    TDSignal out{sample_rate, 0.0, std::vector<cplx>(static_cast<std::size_t>(periods * per))};
    const double amp = std::sqrt(u.tau_p) * sample_rate;
    for (long n = 0; n < periods; ++n)
        for (int k = 0; k < u.M; ++k) {
            cplx acc{};
            for (int l = 0; l < u.N; ++l)
                acc += x_dd(k, l) * cis(kTwoPi * static_cast<double>(pos_mod(n * l, u.N)) / u.N);
            out.samples[static_cast<std::size_t>(n * per + k * O)] = amp * acc;
        }
    return out;
}

cplx zak_transform(const TDSignal& x, const UserAllocation& u, int k_sub, int l_sub) {
    const long O = samples_per_bin(u, x.sample_rate);
    const double t0s = x.t0 * x.sample_rate;
    const long off = std::lround(t0s);
    if (std::abs(t0s - off) > 1e-6) throw std::invalid_argument("zak_transform: t0 off grid");
    const long per = O * u.M;
    const long len = static_cast<long>(x.samples.size());
    // Absolute sample index k_sub*O + n*per; n counts periods from t = 0 as in inverse_zak.
    const long a0 = static_cast<long>(k_sub) * O;
    const long n_lo = -floor_div(a0 - off, per);
    const long n_hi = floor_div(len - 1 - (a0 - off), per);
    cplx acc{};
    long count = 0;
    for (long n = n_lo; n <= n_hi; ++n, ++count)
        acc += x.samples[static_cast<std::size_t>(a0 - off + n * per)] *
               cis(-kTwoPi * static_cast<double>(pos_mod(n * l_sub, u.N)) / u.N);
    if (count == 0) return {};
    return acc / (std::sqrt(u.tau_p) * x.sample_rate * static_cast<double>(count));
}

cplx zak_continuous(const TDSignal& x, const UserAllocation& u, double tau, double nu) {
    const double step = u.tau_p * x.sample_rate;
    const long per = std::lround(step);
    if (std::abs(step - per) > 1e-6) throw std::invalid_argument("tau_p not on sample grid");
    const double pos = (tau - x.t0) * x.sample_rate;
    const long i0 = std::lround(pos);
    if (std::abs(pos - i0) > 1e-6) throw std::invalid_argument("zak_continuous: tau off grid");
    const long len = static_cast<long>(x.samples.size());
    cplx acc{};
    const long n_lo = -floor_div(i0, per);
    const long n_hi = floor_div(len - 1 - i0, per);
    for (long n = n_lo; n <= n_hi; ++n)
        acc += x.samples[static_cast<std::size_t>(i0 + n * per)] *
               cis(-kTwoPi * static_cast<double>(n) * nu * u.tau_p);
    return std::sqrt(u.tau_p) * acc;
}

}  // namespace zakmul
