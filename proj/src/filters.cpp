#include "zakmul/filters.hpp"

#include <cmath>

namespace zakmul {

double rrc_pulse(double x, double beta) {
    if (beta <= 0) return sinc(x);
    if (std::abs(x) < 1e-8) return 1.0 - beta + 4.0 * beta / kPi;
    if (std::abs(std::abs(4.0 * beta * x) - 1.0) < 1e-8) {
        const double a = kPi / (4.0 * beta);
        return beta / std::sqrt(2.0) *
               ((1.0 + 2.0 / kPi) * std::sin(a) + (1.0 - 2.0 / kPi) * std::cos(a));
    }
    const double num = std::sin(kPi * x * (1.0 - beta)) + 4.0 * beta * x * std::cos(kPi * x * (1.0 + beta));
    const double den = kPi * x * (1.0 - 16.0 * beta * beta * x * x);
    return num / den;
}

double srrc_spectrum(double u, double beta) {
    if (beta <= 0) return (u >= -0.5 && u < 0.5) ? 1.0 : 0.0;
    const double a = std::abs(u);
    if (a <= 0.5 * (1.0 - beta)) return 1.0;
    if (a >= 0.5 * (1.0 + beta)) return 0.0;
    return std::cos(kPi / (2.0 * beta) * (a - 0.5 * (1.0 - beta)));
}

FactorizedDDFilter FactorizedDDFilter::for_user(const UserAllocation& u, PulseKind kind, double beta,
                                                int truncation_lobes) {
    FactorizedDDFilter f;
    f.kind = kind;
    f.B = u.B;
    f.T = u.T;
    f.beta_tau = kind == PulseKind::rrc ? beta : 0.0;
    f.beta_nu = kind == PulseKind::rrc ? beta : 0.0;
    f.tau_shift = u.tau_shift;
    f.nu_shift = u.nu_shift;
    f.truncation_lobes = truncation_lobes;
    return f;
}

double FactorizedDDFilter::wB0(double tau) const { return std::sqrt(B) * rrc_pulse(B * tau, bt()); }
double FactorizedDDFilter::wT0(double nu) const { return std::sqrt(T) * rrc_pulse(T * nu, bn()); }
double FactorizedDDFilter::WT0(double t) const { return srrc_spectrum(t / T, bn()) / std::sqrt(T); }
double FactorizedDDFilter::WB0(double f) const { return srrc_spectrum(f / B, bt()) / std::sqrt(B); }

cplx FactorizedDDFilter::eval_wB(double tau) const { return wB0(tau) * cis(kTwoPi * nu_shift * tau); }
cplx FactorizedDDFilter::eval_wT(double nu) const { return wT0(nu) * cis(-kTwoPi * nu * tau_shift); }
cplx FactorizedDDFilter::eval_WT(double t) const { return WT0(t - tau_shift); }
cplx FactorizedDDFilter::eval_WB(double freq) const { return WB0(freq - nu_shift); }

PiecewiseExp FactorizedDDFilter::time_window() const {
    return PiecewiseExp::srrc_shape(bn(), tau_shift, T, 1.0 / std::sqrt(T));
}

PiecewiseExp FactorizedDDFilter::band_shape() const {
    return PiecewiseExp::srrc_shape(bt(), nu_shift, B, 1.0 / std::sqrt(B));
}

cplx tx_filter_eval(const FactorizedDDFilter& f, double tau, double nu) {
    return f.wB0(tau) * f.wT0(nu) * cis(kTwoPi * (f.nu_shift * tau - nu * f.tau_shift));
}

cplx MatchedFilter::eval(double tau, double nu) const {
    // Conjugate-flip of real even factors is the identity.
    const double wb = f_.wB0(-tau), wt = f_.wT0(-nu);
    return wb * wt * cis(kTwoPi * (f_.nu_shift * tau - nu * f_.tau_shift)) * cis(kTwoPi * nu * tau);
}

}  // namespace zakmul
