#pragma once

#include <span>
#include <vector>

#include "zakmul/lattice.hpp"
#include "zakmul/types.hpp"

namespace zakmul {

// M x N lattice signal on the fundamental period, stored row-major as [k*N + l].
class DDGridSignal {
public:
    DDGridSignal() = default;
    DDGridSignal(int M, int N) : M_(M), N_(N), v_(static_cast<std::size_t>(M) * N) {}

    int M() const { return M_; }
    int N() const { return N_; }
    cplx& operator()(int k, int l) { return v_[static_cast<std::size_t>(k) * N_ + l]; }
    const cplx& operator()(int k, int l) const { return v_[static_cast<std::size_t>(k) * N_ + l]; }
    std::span<cplx> values() { return v_; }
    std::span<const cplx> values() const { return v_; }
    double energy() const;

private:
    int M_ = 0, N_ = 0;
    std::vector<cplx> v_;
};

// Quasi-periodic extension: x(k + nM, l + mN) = e^{j2 pi n l / N} x(k, l).
cplx qp_access(const DDGridSignal& x, long k, long l);

// Finite DD filter on the integer grid, dense over [k_min, k_max] x [l_min, l_max].
class DDTapSet {
public:
    DDTapSet() = default;
    DDTapSet(int k_min, int k_max, int l_min, int l_max);

    int k_min() const { return k_min_; }
    int k_max() const { return k_max_; }
    int l_min() const { return l_min_; }
    int l_max() const { return l_max_; }
    bool in_box(int k, int l) const {
        return k >= k_min_ && k <= k_max_ && l >= l_min_ && l <= l_max_;
    }
    // Zero outside the box.
    cplx at(int k, int l) const;
    cplx& ref(int k, int l);
    double energy() const;
    // Drops taps below floor * max|tap|.
    void prune(double rel_floor);

private:
    int k_min_ = 0, k_max_ = -1, l_min_ = 0, l_max_ = -1;
    std::vector<cplx> v_;
};

// Sampled time-domain waveform; sample i sits at t0 + i / sample_rate.
struct TDSignal {
    double sample_rate = 0;
    double t0 = 0;
    std::vector<cplx> samples;

    double time_of(std::size_t i) const { return t0 + static_cast<double>(i) / sample_rate; }
    double energy() const;  // sum |x|^2 / sample_rate
};

// y[k', l'] = sum h[k, l] x(k'-k, l'-l) e^{j2 pi l (k'-k) / (MN)}.
DDGridSignal twisted_conv_discrete(const DDTapSet& h, const DDGridSignal& x);

// Composition of two discrete DD filters: (h1 *s h2)[k, l] = sum h1[a, b] h2[k-a, l-b] e^{j2 pi b (k-a)/(MN)}.
DDTapSet twisted_conv_taps(const DDTapSet& h1, const DDTapSet& h2, int M, int N);

// Pulsone realization of a lattice signal: impulses of area sqrt(tau_p) sum_l x[k,l] e^{j2 pi n l/N}
// at t = n tau_p + k tau_p / M for n in [0, floor(span / tau_p)). One impulse is one sample of
// height area * sample_rate. sample_rate must be an integer multiple of u.B.
TDSignal inverse_zak(const DDGridSignal& x_dd, const UserAllocation& u, double sample_rate,
                     double span);

// Inverse of inverse_zak at lattice point (k_sub, l_sub): averages the pulsone train over the
// periods present in x. Throws std::invalid_argument when the delay is off the sample grid.
cplx zak_transform(const TDSignal& x, const UserAllocation& u, int k_sub, int l_sub);

// Zak transform of a sampled continuous signal, sqrt(tau_p) sum_n x(tau + n tau_p) e^{-j2 pi n nu tau_p},
// for tau on the sample grid.
cplx zak_continuous(const TDSignal& x, const UserAllocation& u, double tau, double nu);

}  // namespace zakmul
