#include "zakmul/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "zakmul/rng.hpp"

namespace zakmul {

PathProfile veh_a_profile() {
    return {{0.0, 0.31e-6, 0.71e-6, 1.09e-6, 1.73e-6, 2.51e-6}, {0.0, -1.0, -9.0, -10.0, -15.0, -20.0}};
}

void validate_profile(const PathProfile& p) {
    if (p.delays.empty() || p.delays.size() != p.relative_powers_db.size())
        throw std::invalid_argument("profile needs matching non-empty delay/power lists");
    if (p.delays.front() < 0 || !std::is_sorted(p.delays.begin(), p.delays.end()))
        throw std::invalid_argument("profile delays must be non-negative and ascending");
    if (p.relative_powers_db.front() != 0.0)
        throw std::invalid_argument("first relative power must be 0 dB");
}

std::vector<double> normalized_powers(const PathProfile& p) {
    std::vector<double> w;
    double sum = 0;
    for (double db : p.relative_powers_db) {
        w.push_back(std::pow(10.0, db / 10.0));
        sum += w.back();
    }
    for (auto& x : w) x /= sum;
    return w;
}

ChannelRealization draw_channel(const PathProfile& p, std::uint64_t seed, double nu_max) {
    validate_profile(p);
    if (nu_max < 0) throw std::invalid_argument("nu_max must be non-negative");
    const auto w = normalized_powers(p);
    Rng g(seed);
    std::uniform_real_distribution<double> theta(0.0, kTwoPi);
    ChannelRealization c;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const cplx gain = std::sqrt(w[i]) * complex_normal(g);
        const double th = theta(g);
        c.paths.push_back({gain, p.delays[i], nu_max * std::cos(th)});
    }
    return c;
}

ChannelRealization draw_veh_a(std::uint64_t seed, double nu_max) {
    return draw_channel(veh_a_profile(), seed, nu_max);
}

ChannelRealization ideal_channel() { return {{Path{cplx{1.0, 0.0}, 0.0, 0.0}}}; }

std::pair<double, double> spread_bounds(const ChannelRealization& c) {
    double tm = 0, nm = 0;
    for (const auto& p : c.paths) {
        tm = std::max(tm, p.delay);
        nm = std::max(nm, std::abs(p.doppler));
    }
    return {tm, nm};
}

}  // namespace zakmul
