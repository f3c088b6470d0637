#pragma once

#include <filesystem>

#include "zakmul/channel.hpp"
#include "zakmul/dd_core.hpp"
#include "zakmul/filters.hpp"
#include "zakmul/lattice.hpp"
#include "zakmul/rng.hpp"

namespace zakmul {

struct OracleConfig {
    int oversampling = 8;       // samples per 1/B_sys
    double time_pad = 0;        // simulated span beyond [0, system_T] on each side, seconds
    int truncation_lobes = 20;  // w_B truncated to |tau| <= lobes / B
    int interp_half_width = 32; // fractional-delay interpolator half-width, samples
    double kaiser_beta = 12.0;
};

// Oversampled time-domain engine over [-pad, system_T + pad) at rate O_f * B_sys.
// Transmit: gated pulsone train, then w_B(t) e^{j2 pi nu_s t}. Receive: w_B(t) e^{j2 pi nu_q t},
// then gated Zak sampling on the user's lattice.
class WaveformOracle {
public:
    // Throws std::invalid_argument for O_f < 1, negative pad, or pad not on the sample grid.
    WaveformOracle(double system_B, double system_T, OracleConfig cfg);

    double sample_rate() const { return fs_; }
    const OracleConfig& config() const { return cfg_; }
    TDSignal blank() const;

    TDSignal synth_carrier(const UserAllocation& u, const FactorizedDDFilter& f, int k, int l) const;
    TDSignal synth_frame(const UserAllocation& u, const FactorizedDDFilter& f, const DDGridSignal& x) const;
    // Matched-filter lattice samples on the fundamental domain; quasi-periodic extension via qp_access.
    DDGridSignal rx_sample(const TDSignal& y, const UserAllocation& u, const FactorizedDDFilter& f) const;

    // Gated matched-filter output b(t) = W_T(t - tau_q) (w_B * y)(t) at every oracle sample. Its
    // energy equals the period integral of the received DD signal's squared magnitude.
    TDSignal matched_output(const TDSignal& y, const FactorizedDDFilter& f) const;

    // Filter one pulse-weight train (one nonzero per pulse instant) through w_B with the nu shift.
    TDSignal shape(const std::vector<std::pair<double, cplx>>& pulses, const FactorizedDDFilter& f) const;

private:
    double fs_, t0_;
    std::size_t len_;
    OracleConfig cfg_;
    long samples_per_pulse(double B) const;
};

// Sum_i h_i x(t - tau_i) e^{j2 pi nu_i (t - tau_i)}; fractional delays by Kaiser-windowed sinc.
TDSignal apply_channel(const TDSignal& x, const ChannelRealization& c, const OracleConfig& cfg);

// i.i.d. CN(0, N0 * sample_rate) per sample.
TDSignal add_awgn(TDSignal x, double N0, Rng& g);

struct TFFractions {
    double in_time = 0;
    double in_band = 0;
};

// Energy fractions of carrier (k, l) inside [tau_s - T/2 + dt, tau_s + T/2 + dt) and
// [nu_s - B/2 + df, nu_s + B/2 + df). The offsets translate the measurement windows.
TFFractions tf_energy_fractions(const FactorizedDDFilter& f, const UserAllocation& u, const WaveformOracle& o,
                                int k, int l, double dt = 0, double df = 0);

// Binary dump: "ZKTD", u32 version 1, f64 sample_rate, f64 t0, u64 count, count x (f32 re, f32 im),
// all little-endian.
void write_td_dump(const TDSignal& x, const std::filesystem::path& path);
TDSignal read_td_dump(const std::filesystem::path& path);

}  // namespace zakmul
