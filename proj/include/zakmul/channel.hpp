#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "zakmul/types.hpp"

namespace zakmul {

struct PathProfile {
    std::vector<double> delays;              // s, ascending
    std::vector<double> relative_powers_db;  // first entry 0 dB
};

struct Path {
    cplx gain;
    double delay;
    double doppler;
};

struct ChannelRealization {
    std::vector<Path> paths;
};

PathProfile veh_a_profile();
// Per-path power weights normalized to unit sum.
std::vector<double> normalized_powers(const PathProfile& p);
void validate_profile(const PathProfile& p);

// Rayleigh gains with the profile's powers, Doppler nu_max cos(theta), theta ~ U[0, 2 pi).
// theta is drawn independently of nu_max, so one seed gives common random numbers across a
// Doppler sweep.
ChannelRealization draw_channel(const PathProfile& p, std::uint64_t seed, double nu_max);
ChannelRealization draw_veh_a(std::uint64_t seed, double nu_max);

ChannelRealization ideal_channel();

// (max delay, max |doppler|)
std::pair<double, double> spread_bounds(const ChannelRealization& c);

}  // namespace zakmul
