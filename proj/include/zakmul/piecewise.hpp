#pragma once

#include <vector>

#include "zakmul/types.hpp"

namespace zakmul {

// Compactly supported function that is a finite sum of complex exponentials c e^{j w x}
// on each of a few disjoint intervals. Closed under products, shifts and modulation, and
// integrable in closed form. Used for exact filter cross-ambiguity integrals.
class PiecewiseExp {
public:
    struct Term {
        cplx c;
        double w;
    };
    struct Piece {
        double lo, hi;
        std::vector<Term> terms;
    };

    PiecewiseExp() = default;

    // amp * S_beta((x - center) / width), S_beta the square-root raised-cosine spectrum
    // (unit on |u| <= (1-beta)/2, zero beyond (1+beta)/2). beta = 0 gives a rect.
    static PiecewiseExp srrc_shape(double beta, double center, double width, double amp);

    const std::vector<Piece>& pieces() const { return pieces_; }
    bool empty() const { return pieces_.empty(); }

    // f(x) e^{j w0 x}
    PiecewiseExp modulated(double w0) const;
    PiecewiseExp conj() const;
    // Pointwise product; support is the intersection.
    friend PiecewiseExp operator*(const PiecewiseExp& a, const PiecewiseExp& b);

    // Integral of f(x) e^{j kappa x} over the real line.
    cplx integrate(double kappa = 0.0) const;
    cplx eval(double x) const;

private:
    std::vector<Piece> pieces_;
};

}  // namespace zakmul
