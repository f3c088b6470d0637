#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "zakmul/channel.hpp"
#include "zakmul/dd_core.hpp"
#include "zakmul/filters.hpp"
#include "zakmul/lattice.hpp"

namespace zakmul {

// Period integrals of |h~^{k,l}_{q,s}|^2 for every transmit carrier (k, l) of user s, evaluated as
// the time-domain energy of the receiver-q gated matched-filter output (the Zak energy identity).
// The integral over time is a Riemann sum at rate oversample * lcm(B_q, B_s).
struct CarrierEnergies {
    int M = 0, N = 0;              // transmitter grid
    double total = 0;              // sum over all carriers
    std::vector<double> per_carrier;  // k * N + l; empty unless requested

    double at(int k, int l) const { return per_carrier[static_cast<std::size_t>(k * N + l)]; }
};

CarrierEnergies carrier_energies(const UserAllocation& q, const FactorizedDDFilter& fq, const UserAllocation& s,
                                 const FactorizedDDFilter& fs, const ChannelRealization& ch, int oversample = 4,
                                 bool per_carrier = false);

struct LeakageReport {
    int rx_user = 0, tx_user = 0;
    double I = 0;  // interference energy at receiver q from all carriers of s
    double S = 0;  // useful energy of s at its own receiver
    bool refinement_ok = true;  // doubling the oversampling moved ratio_db by at most 0.5 dB
    double refinement_delta_db = 0;

    double ratio() const { return I / S; }
    double ratio_db() const;
};

struct LeakageOptions {
    int oversample = 4;
    bool check_refinement = true;
    double refinement_tol_db = 0.5;
};

// I_{q,s} / S_{s,s} for one channel draw; logs a warning to stderr when refinement fails.
// Throws std::invalid_argument if S_{s,s} is not positive.
LeakageReport leakage_ratio(const UserAllocation& q, const FactorizedDDFilter& fq, const UserAllocation& s,
                            const FactorizedDDFilter& fs, const ChannelRealization& ch, const LeakageOptions& o = {});

// Ratio of sums over draws; the draws' reports must share the (q, s) pair.
LeakageReport average_leakage(std::span<const LeakageReport> draws);

// Per-carrier MUI-to-useful ratio on receiver q's grid, accumulated over channel draws.
// Interferer s's carriers are resampled onto q's grid by normalized DD area overlap and scaled
// by B_q / B_s, i.e. every user transmits the same average power.
class MuiHeatmap {
public:
    explicit MuiHeatmap(const UserAllocation& q) : q_(q), mui_(cells(), 0.0), useful_(cells(), 0.0) {}

    void add_useful(const CarrierEnergies& self);
    void add_interferer(const UserAllocation& s, const CarrierEnergies& e);

    const UserAllocation& user() const { return q_; }
    // Linear ratio per cell, k * N_q + l. Zero where no interference was added.
    std::vector<double> ratio() const;
    std::vector<double> ratio_db() const;

private:
    std::size_t cells() const { return static_cast<std::size_t>(q_.M * q_.N); }
    UserAllocation q_;
    std::vector<double> mui_, useful_;
};

// Fraction of differing bits. Throws std::invalid_argument on a size mismatch or empty input.
double ber(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx);

// Squared-error and energy sums over the support of `truth` (taps with |h| >= rel_floor * max |h|,
// the same floor as DDTapSet::prune). Kept separate so NMSE averages as a ratio of sums.
struct NmseTerms {
    double err = 0, ref = 0;
    double value() const { return err / ref; }
};
NmseTerms nmse_terms(const DDTapSet& estimate, const DDTapSet& truth, double rel_floor = 1e-7);

struct Interval {
    double lo = 0, hi = 0;
    double half_width() const { return 0.5 * (hi - lo); }
};
// Wilson score interval for k successes in n trials at normal quantile z.
Interval wilson_interval(std::uint64_t k, std::uint64_t n, double z = 1.959963984540054);

}  // namespace zakmul
