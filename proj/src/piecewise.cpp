#include "zakmul/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace zakmul {

PiecewiseExp PiecewiseExp::srrc_shape(double beta, double center, double width, double amp) {
    if (beta < 0 || beta > 1 || !(width > 0)) throw std::invalid_argument("bad srrc shape");
    PiecewiseExp f;
    const double inner = 0.5 * (1.0 - beta) * width;
    const double outer = 0.5 * (1.0 + beta) * width;
    if (inner > 0) f.pieces_.push_back({center - inner, center + inner, {{cplx{amp, 0.0}, 0.0}}});
    if (beta > 0) {
        // Right flank: cos(a x + b); left flank: cos(-a x + b').
        const double a = kPi / (2.0 * beta * width);
        const double b_r = -kPi / (2.0 * beta) * (center / width + 0.5 * (1.0 - beta));
        const double b_l = kPi / (2.0 * beta) * (center / width - 0.5 * (1.0 - beta));
        f.pieces_.insert(f.pieces_.begin(),
                         Piece{center - outer, center - inner,
                               {{0.5 * amp * cis(b_l), -a}, {0.5 * amp * cis(-b_l), a}}});
        f.pieces_.push_back(
            {center + inner, center + outer, {{0.5 * amp * cis(b_r), a}, {0.5 * amp * cis(-b_r), -a}}});
    }
    return f;
}

PiecewiseExp PiecewiseExp::modulated(double w0) const {
    PiecewiseExp g = *this;
    for (auto& p : g.pieces_)
        for (auto& t : p.terms) t.w += w0;
    return g;
}

PiecewiseExp PiecewiseExp::conj() const {
    PiecewiseExp g = *this;
    for (auto& p : g.pieces_)
        for (auto& t : p.terms) {
            t.c = std::conj(t.c);
            t.w = -t.w;
        }
    return g;
}

PiecewiseExp operator*(const PiecewiseExp& a, const PiecewiseExp& b) {
    PiecewiseExp g;
    for (const auto& pa : a.pieces_)
        for (const auto& pb : b.pieces_) {
            const double lo = std::max(pa.lo, pb.lo), hi = std::min(pa.hi, pb.hi);
            if (!(hi > lo)) continue;
            PiecewiseExp::Piece p{lo, hi, {}};
            p.terms.reserve(pa.terms.size() * pb.terms.size());
            for (const auto& ta : pa.terms)
                for (const auto& tb : pb.terms) p.terms.push_back({ta.c * tb.c, ta.w + tb.w});
            g.pieces_.push_back(std::move(p));
        }
    return g;
}

namespace {

// sin(z)/z with a series near 0.
double sinc_rad(double z) {
    if (std::abs(z) < 1e-4) return 1.0 - z * z / 6.0;
    return std::sin(z) / z;
}

}  // namespace

cplx PiecewiseExp::integrate(double kappa) const {
    cplx acc{};
    for (const auto& p : pieces_) {
        const double len = p.hi - p.lo, mid = 0.5 * (p.hi + p.lo);
        for (const auto& t : p.terms) {
            const double w = t.w + kappa;
            acc += t.c * len * cis(w * mid) * sinc_rad(0.5 * w * len);
        }
    }
    return acc;
}

cplx PiecewiseExp::eval(double x) const {
    for (const auto& p : pieces_)
        if (x >= p.lo && x < p.hi) {
            cplx v{};
            for (const auto& t : p.terms) v += t.c * cis(t.w * x);
            return v;
        }
    return {};
}

}  // namespace zakmul
