#include "zakmul/frame_pilot.hpp"

#include <cmath>
#include <stdexcept>

namespace zakmul {

Region FrameLayout::at(int k, int /*l*/) const { return column[static_cast<std::size_t>(pos_mod(k, M))]; }

FrameLayout build_layout(const UserAllocation& u, double tau_max, const FrameMargins& m,
                         std::optional<std::pair<int, int>> pilot) {
    if (m.a1 < 0 || m.a2 < 0 || m.g1 < 0 || m.g2 < 0 || tau_max < 0)
        throw std::invalid_argument("build_layout: negative margin or delay spread");
    FrameLayout f;
    f.M = u.M;
    f.N = u.N;
    f.k_max = static_cast<int>(std::ceil(u.B * tau_max - 1e-9));
    f.margins = m;
    // Default delay index counts from the window's first pulse column, so the pilot strip never
    // straddles the window edge.
    const int edge = static_cast<int>(pos_mod(std::lround(u.B * (u.tau_shift - 0.5 * u.T)), u.M));
    const auto [kp, lp] = pilot.value_or(std::pair{static_cast<int>(pos_mod(edge + (u.M + 1) / 2, u.M)), (u.N + 1) / 2});
    if (kp < 0 || kp >= u.M || lp < 0 || lp >= u.N) throw std::invalid_argument("build_layout: pilot outside grid");
    f.k_p = kp;
    f.l_p = lp;
    const int p_w = m.a1 + f.k_max + m.a2 + 1, g1_w = f.k_max + m.g1, g2_w = m.g2;
    if (p_w + g1_w + g2_w >= u.M) throw std::invalid_argument("build_layout: pilot and guard strips leave no data column");
    f.column.assign(static_cast<std::size_t>(u.M), Region::data);
    auto mark = [&](int first, int width, Region r) {
        for (int i = 0; i < width; ++i) f.column[static_cast<std::size_t>(pos_mod(first + i, u.M))] = r;
    };
    mark(kp - m.a1, p_w, Region::pilot);
    mark(kp - m.a1 - g1_w, g1_w, Region::guard1);
    mark(kp + f.k_max + m.a2 + 1, g2_w, Region::guard2);
    for (int k = 0; k < u.M; ++k)
        if (f.column[static_cast<std::size_t>(k)] == Region::data)
            for (int l = 0; l < u.N; ++l) f.data_cells.emplace_back(k, l);
    return f;
}

cplx qam4(std::uint8_t b0, std::uint8_t b1) {
    constexpr double s = 0.70710678118654752440;
    return {s * (1.0 - 2.0 * b0), s * (1.0 - 2.0 * b1)};
}

std::pair<std::uint8_t, std::uint8_t> qam4_demap(cplx z) {
    return {static_cast<std::uint8_t>(z.real() < 0.0), static_cast<std::uint8_t>(z.imag() < 0.0)};
}

FrameSymbols map_frame(const FrameLayout& layout, std::span<const std::uint8_t> bits, double E_d, double E_p) {
    if (bits.size() != 2 * layout.data_cells.size()) throw std::invalid_argument("map_frame: need 2 bits per data cell");
    if (E_d < 0 || E_p < 0) throw std::invalid_argument("map_frame: negative energy");
    FrameSymbols fs{DDGridSignal(layout.M, layout.N), E_d, E_p, {bits.begin(), bits.end()}};
    const double a = std::sqrt(E_d / static_cast<double>(layout.data_count()));
    for (std::size_t i = 0; i < layout.data_cells.size(); ++i) {
        const auto [k, l] = layout.data_cells[i];
        fs.x(k, l) = a * qam4(bits[2 * i], bits[2 * i + 1]);
    }
    fs.x(layout.k_p, layout.l_p) = std::sqrt(E_p);
    return fs;
}

DDTapSet estimate_taps(const DDGridSignal& y, const FrameLayout& layout, double E_p) {
    if (E_p <= 0) throw std::invalid_argument("estimate_taps: pilot energy must be positive");
    const int lam_lo = -(layout.N / 2), lam_hi = layout.N - 1 - layout.N / 2;
    DDTapSet h(-layout.margins.a1, layout.k_max + layout.margins.a2, lam_lo, lam_hi);
    const double MN = static_cast<double>(layout.M) * layout.N, scale = 1.0 / std::sqrt(E_p);
    for (int kappa = h.k_min(); kappa <= h.k_max(); ++kappa)
        for (int lam = lam_lo; lam <= lam_hi; ++lam) {
            const long ph = pos_mod(static_cast<long>(layout.k_p) * lam, static_cast<long>(MN));
            h.ref(kappa, lam) = scale * qp_access(y, layout.k_p + kappa, layout.l_p + lam) *
                                cis(-kTwoPi * static_cast<double>(ph) / MN);
        }
    return h;
}

DDGridSignal cancel_pilot(const DDGridSignal& y, const DDTapSet& h, const FrameLayout& layout, double E_p) {
    DDGridSignal pilot(layout.M, layout.N);
    pilot(layout.k_p, layout.l_p) = std::sqrt(E_p);
    const auto yp = twisted_conv_discrete(h, pilot);
    DDGridSignal out = y;
    for (std::size_t i = 0; i < out.values().size(); ++i) out.values()[i] -= yp.values()[i];
    return out;
}

}  // namespace zakmul
