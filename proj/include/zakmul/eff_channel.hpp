#pragma once

#include <vector>

#include "zakmul/channel.hpp"
#include "zakmul/dd_core.hpp"
#include "zakmul/filters.hpp"
#include "zakmul/lattice.hpp"
#include "zakmul/piecewise.hpp"

namespace zakmul {

// Delay-factor cross-ambiguity of one path as a function of D = tau - tau_i:
//   C(D) = int W_Bq(f - Delta) W_Bs(f) e^{j2 pi f D} df,  Delta = nu_q - nu_s - nu_i,
// with the unshifted band shapes. Closed form for sinc and rrc.
class DelayKernel {
public:
    DelayKernel(const FactorizedDDFilter& q, const FactorizedDDFilter& s, double path_doppler);
    cplx operator()(double D) const { return prod_.integrate(kTwoPi * D); }
    bool identically_zero() const { return prod_.empty(); }

private:
    PiecewiseExp prod_;
};

cplx zeta(const FactorizedDDFilter& q, const FactorizedDDFilter& s, const Path& p, double tau);
cplx eta(const FactorizedDDFilter& q, const FactorizedDDFilter& s, const Path& p, double tau, double nu);

// h_eff,q,s(tau, nu) = sum_i h_i e^{j2 pi nu_s (tau - tau_i)} e^{j2 pi nu_i (tau + tau_s - tau_i)}
//                      e^{-j2 pi nu tau_s} zeta_i(tau) eta_i(tau, nu).
class EffectiveChannel {
public:
    EffectiveChannel(FactorizedDDFilter q, FactorizedDDFilter s, ChannelRealization ch);
    cplx operator()(double tau, double nu) const;
    const FactorizedDDFilter& q_filter() const { return q_; }
    const FactorizedDDFilter& s_filter() const { return s_; }
    const ChannelRealization& channel() const { return ch_; }

private:
    FactorizedDDFilter q_, s_;
    ChannelRealization ch_;
    std::vector<DelayKernel> zk_;
    PiecewiseExp wq0_;
};

// Integer box of DD tap indices.
struct TapBox {
    int k_min, k_max, l_min, l_max;
};

// Lattice samples h_eff(k tau_p/M, l nu_p/N) of a self channel (q = s) over the box.
DDTapSet discrete_self_channel(const EffectiveChannel& e, const UserAllocation& q, const TapBox& box);

// Default self-channel box: delay [-a1, k_max + a2 + 2], Doppler +-ceil(N (nu_max + 1/(2T)) / nu_p).
// The Doppler side exceeds floor(N/2) exactly when crystallization fails.
TapBox default_tap_box(const UserAllocation& q, double tau_max, double nu_max, int a1 = 2, int a2 = 1);

// Largest |tap| on the box boundary relative to the largest |tap| (0 for an all-zero set).
// Sinc filters decay slowly, so this sits well above any useful floor for compact boxes.
double boundary_to_peak(const DDTapSet& h);

// Zeroes taps with |tap| < rel_floor * max |tap|.
void drop_below_floor(DDTapSet& h, double rel_floor);

// Response on the q-lattice to the s-user's carrier (k, l): the h_eff *s phi^{k,l} samples,
// summing delay replicas n in [-n_rep, n_rep] and Doppler replicas m in [-m_rep, m_rep].
DDTapSet sample_taps_cross(const EffectiveChannel& e, const UserAllocation& q, const UserAllocation& s,
                           int k, int l, const TapBox& box, int n_rep, int m_rep);

// Exact pulse-level link from user s's lattice to user q's matched-filter lattice samples.
// The transmit frame is a gated pulse train through w_B; the receiver filters, gates and
// takes the Zak samples. All filter integrals are closed form, so the map is exact up to
// rounding for any channel and either pulse family.
class LatticeLink {
public:
    LatticeLink(const UserAllocation& q, const FactorizedDDFilter& fq, const UserAllocation& s,
                const FactorizedDDFilter& fs, const ChannelRealization& ch);

    // Noiseless receiver samples y_q[k', l'] on the fundamental domain.
    DDGridSignal apply(const DDGridSignal& x_s) const;
    // y_q for the unit carrier (k, l) of user s.
    DDGridSignal response(int k, int l) const;
    // Sum over all unit carriers of user s of |y_q[k', l']|^2, indexed k' * N_q + l'.
    std::vector<double> output_energy() const;

    // Matched-filter output (before gating) at the receive sample instants j'/B_q.
    std::vector<cplx> filtered_samples(const DDGridSignal& x_s) const;
    long rx_first() const { return jr_lo_; }
    long tx_first() const { return jt_lo_; }
    const std::vector<double>& rx_window() const { return wr_; }
    const std::vector<double>& tx_window() const { return wt_; }

private:
    UserAllocation q_, s_;
    long jt_lo_ = 0, jr_lo_ = 0;
    std::vector<double> wt_, wr_;  // window weights per pulse
    std::vector<cplx> A_;          // [j' - jr_lo][j - jt_lo]
    std::vector<cplx> tx_amplitudes(const DDGridSignal& x) const;
    DDGridSignal rx_samples(const std::vector<cplx>& z) const;
};

// Pulse indices j with nonzero W_T(j/B - tau_s), as [first, weights).
struct PulseWindow {
    long first;
    std::vector<double> weights;
};
PulseWindow pulse_window(const FactorizedDDFilter& f, double rate);

// Continuous coupling kernels g_j(t) of transmit pulse j at the receiver filter output,
// tabulated on a grid of step 1/rate (rate a common multiple of both bandwidths):
//   g_j(t) = sum_i h_i e^{j2 pi nu_i (t - tau_i)} e^{j2 pi nu_s (t - tau_i - t_j)} C_i(t - tau_i - t_j).
class CouplingTable {
public:
    CouplingTable(const FactorizedDDFilter& fq, const FactorizedDDFilter& fs, const ChannelRealization& ch,
                  long rate, long d_min, long d_max);
    // Path-i term at grid offset d = (t - t_j) * rate, without the e^{j2 pi nu_i t} factor.
    cplx term(std::size_t path, long d) const { return tab_[path][static_cast<std::size_t>(d - d_min_)]; }
    std::size_t paths() const { return tab_.size(); }

private:
    long d_min_;
    std::vector<std::vector<cplx>> tab_;
};

}  // namespace zakmul
