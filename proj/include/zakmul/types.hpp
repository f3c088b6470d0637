#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace zakmul {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// e^{j*phase}
inline cplx cis(double phase) { return {std::cos(phase), std::sin(phase)}; }

// sin(pi x)/(pi x) with sinc(0) = 1.
inline double sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    const double px = kPi * x;
    return std::sin(px) / px;
}

// Integer floor division and non-negative modulo.
inline long floor_div(long a, long b) {
    long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}
inline long pos_mod(long a, long b) { return a - b * floor_div(a, b); }

}  // namespace zakmul
