#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "zakmul/dd_core.hpp"
#include "zakmul/lattice.hpp"

namespace zakmul {

enum class Region : std::uint8_t { data, pilot, guard1, guard2 };

struct FrameMargins {
    int a1 = 2;
    int a2 = 1;
    int g1 = 3;
    int g2 = 2;
};

// Delay-column strips (full Doppler extent), wrapping mod M:
//   P  = [k_p - a1, k_p + k_max + a2]
//   G1 = [k_p - a1 - k_max - g1, k_p - a1 - 1]      (k_max + g1 columns)
//   G2 = [k_p + k_max + a2 + 1, k_p + k_max + a2 + g2]
//   D  = remaining columns.
struct FrameLayout {
    int M = 0, N = 0;
    int k_p = 0, l_p = 0;
    int k_max = 0;
    FrameMargins margins;
    std::vector<Region> column;                  // region of each delay column
    std::vector<std::pair<int, int>> data_cells; // (k, l), column-major in k then l

    Region at(int k, int l) const;
    int data_count() const { return static_cast<int>(data_cells.size()); }
    int pilot_lo() const { return k_p - margins.a1; }          // first pilot-strip delay offset, absolute
    int pilot_hi() const { return k_p + k_max + margins.a2; }  // last, absolute (may exceed M - 1)
};

// k_max = ceil(B tau_max). Pilot defaults to (e + ceil(M/2) mod M, ceil(N/2)), e being the delay
// column of the window's first pulse.
// Throws std::invalid_argument if the pilot and guard strips cover M or more columns.
FrameLayout build_layout(const UserAllocation& u, double tau_max, const FrameMargins& m = {},
                         std::optional<std::pair<int, int>> pilot = std::nullopt);

// Gray 4-QAM, unit energy: ((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2).
cplx qam4(std::uint8_t b0, std::uint8_t b1);
// Nearest point; a component exactly on the boundary decides bit 0.
std::pair<std::uint8_t, std::uint8_t> qam4_demap(cplx z);

struct FrameSymbols {
    DDGridSignal x;
    double E_d = 0, E_p = 0;
    std::vector<std::uint8_t> bits;  // 2 per data cell, in data_cells order
};

// sqrt(E_d/|D|) x_d on D, sqrt(E_p) at the pilot, zero on guards and the rest of P.
// Throws std::invalid_argument unless bits.size() == 2 |D|.
FrameSymbols map_frame(const FrameLayout& layout, std::span<const std::uint8_t> bits, double E_d, double E_p);

// Read-off estimate over the pilot strip:
//   h[kappa, lambda] = y(k_p + kappa, l_p + lambda) e^{-j2 pi k_p lambda/(MN)} / sqrt(E_p),
// kappa in [-a1, k_max + a2], lambda in [-floor(N/2), N - 1 - floor(N/2)].
DDTapSet estimate_taps(const DDGridSignal& y, const FrameLayout& layout, double E_p);

// Received samples minus the pilot as seen through taps h.
DDGridSignal cancel_pilot(const DDGridSignal& y, const DDTapSet& h, const FrameLayout& layout, double E_p);

}  // namespace zakmul
