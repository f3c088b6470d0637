#pragma once

#include "zakmul/lattice.hpp"
#include "zakmul/piecewise.hpp"
#include "zakmul/types.hpp"

namespace zakmul {

enum class PulseKind { sinc, rrc };

// Root-raised-cosine pulse normalized so that its spectrum is the unit-height
// square-root raised-cosine shape; rrc(0) = 1 - beta + 4 beta / pi. beta = 0 gives sinc.
double rrc_pulse(double x, double beta);

// Square-root raised-cosine spectrum shape on u: 1 for |u| < (1-beta)/2, zero for
// |u| >= (1+beta)/2. Half-open at the edges for beta = 0 (includes -1/2, excludes +1/2).
double srrc_spectrum(double u, double beta);

// w(tau, nu) = w_B(tau) w_T(nu) e^{j2 pi (nu_s tau - nu tau_s)} with real even factors.
struct FactorizedDDFilter {
    PulseKind kind = PulseKind::sinc;
    double B = 0;
    double T = 0;
    double beta_tau = 0;
    double beta_nu = 0;
    double tau_shift = 0;
    double nu_shift = 0;
    int truncation_lobes = 20;

    // Filter shaping user u's slot. beta applies to both factors for rrc.
    static FactorizedDDFilter for_user(const UserAllocation& u, PulseKind kind, double beta = 0.1,
                                       int truncation_lobes = 20);

    double bt() const { return kind == PulseKind::sinc ? 0.0 : beta_tau; }
    double bn() const { return kind == PulseKind::sinc ? 0.0 : beta_nu; }

    // Unshifted real factors.
    double wB0(double tau) const;
    double wT0(double nu) const;
    double WT0(double t) const;  // time window, centred at 0
    double WB0(double f) const;  // band shape, centred at 0

    cplx eval_wB(double tau) const;
    cplx eval_wT(double nu) const;
    cplx eval_WT(double t) const;
    cplx eval_WB(double freq) const;

    // Closed-form piecewise representations of the shifted window and band shape.
    PiecewiseExp time_window() const;
    PiecewiseExp band_shape() const;

    // Time support of the window, [tau_s - (1+b)T/2, tau_s + (1+b)T/2).
    double window_lo() const { return tau_shift - 0.5 * (1.0 + bn()) * T; }
    double window_hi() const { return tau_shift + 0.5 * (1.0 + bn()) * T; }
};

// Receive filter matched to f: w_rx(tau, nu) = w_B*(-tau) w_T*(-nu) e^{j2 pi (nu_q tau - nu tau_q)} e^{j2 pi nu tau}.
class MatchedFilter {
public:
    explicit MatchedFilter(FactorizedDDFilter f) : f_(f) {}
    cplx eval(double tau, double nu) const;
    const FactorizedDDFilter& base() const { return f_; }

private:
    FactorizedDDFilter f_;
};

// Transmit filter value w_tx(tau, nu) including both TF-shift phases.
cplx tx_filter_eval(const FactorizedDDFilter& f, double tau, double nu);

}  // namespace zakmul
