#include "zakmul/equalizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace zakmul {

void LinearIO::apply(std::span<const cplx> x, std::span<cplx> out) const {
    std::fill(out.begin(), out.end(), cplx{});
    for (std::size_t c = 0; c + 1 < col_ptr.size(); ++c) {
        const cplx xc = x[c];
        if (xc == cplx{}) continue;
        for (std::size_t i = col_ptr[c]; i < col_ptr[c + 1]; ++i) out[static_cast<std::size_t>(row_idx[i])] += vals[i] * xc;
    }
}

void LinearIO::apply_adjoint(std::span<const cplx> r, std::span<cplx> out) const {
    for (std::size_t c = 0; c + 1 < col_ptr.size(); ++c) {
        cplx acc{};
        for (std::size_t i = col_ptr[c]; i < col_ptr[c + 1]; ++i) acc += std::conj(vals[i]) * r[static_cast<std::size_t>(row_idx[i])];
        out[c] = acc;
    }
}

LinearIO build_system(const DDTapSet& taps, const FrameLayout& layout, const DDGridSignal& y, ObservationRows rows) {
    const int M = layout.M, N = layout.N;
    if (y.M() != M || y.N() != N) throw std::invalid_argument("build_system: grid size mismatch");
    LinearIO s;
    s.M = M;
    s.N = N;
    std::vector<int> row_of(static_cast<std::size_t>(M * N), -1);
    for (int k = 0; k < M; ++k)
        for (int l = 0; l < N; ++l) {
            if (rows == ObservationRows::data_and_guard && layout.at(k, l) == Region::pilot) continue;
            row_of[static_cast<std::size_t>(k * N + l)] = static_cast<int>(s.row_cells.size());
            s.row_cells.push_back(k * N + l);
            s.y_obs.push_back(y(k, l));
        }
    s.col_cells = layout.data_cells;
    const long MN = static_cast<long>(M) * N;
    s.col_ptr.push_back(0);
    std::map<int, cplx> col;  // row -> value; ordered for a deterministic layout
    for (const auto& [k, l] : s.col_cells) {
        col.clear();
        for (int kappa = taps.k_min(); kappa <= taps.k_max(); ++kappa)
            for (int lam = taps.l_min(); lam <= taps.l_max(); ++lam) {
                const cplx h = taps.at(kappa, lam);
                if (h == cplx{}) continue;
                const long K = k + kappa;
                const long n = floor_div(K, M);
                const int kr = static_cast<int>(K - n * M), lr = static_cast<int>(pos_mod(l + lam, N));
                const int r = row_of[static_cast<std::size_t>(kr * N + lr)];
                if (r < 0) continue;
                const long ph1 = pos_mod(-n * l, N);
                const long ph2 = pos_mod(static_cast<long>(lam) * (k - n * M), MN);
                col[r] += h * cis(kTwoPi * (static_cast<double>(ph1) / N + static_cast<double>(ph2) / static_cast<double>(MN)));
            }
        for (const auto& [r, v] : col) {
            s.row_idx.push_back(r);
            s.vals.push_back(v);
        }
        s.col_ptr.push_back(s.row_idx.size());
    }
    return s;
}

namespace {

double norm2(std::span<const cplx> v) {
    double s = 0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

// Stable Givens rotation: returns (c, s, r) with [c s; -s c] [a; b] = [r; 0].
struct Rot {
    double c, s, r;
};
Rot sym_ortho(double a, double b) {
    if (b == 0.0) return {a == 0.0 ? 1.0 : std::copysign(1.0, a), 0.0, std::abs(a)};
    if (a == 0.0) return {0.0, std::copysign(1.0, b), std::abs(b)};
    if (std::abs(b) > std::abs(a)) {
        const double tau = a / b;
        const double s = std::copysign(1.0, b) / std::sqrt(1.0 + tau * tau);
        return {s * tau, s, b / s};
    }
    const double tau = b / a;
    const double c = std::copysign(1.0, a) / std::sqrt(1.0 + tau * tau);
    return {c, c * tau, a / c};
}

}  // namespace

SolverResult lsmr_solve(int rows, int cols, const LinearMap& forward, const LinearMap& adjoint,
                        std::span<const cplx> b, const SolverParams& p) {
    if (p.max_iters < 1) throw std::invalid_argument("lsmr: max_iters must be >= 1");
    if (static_cast<int>(b.size()) != rows) throw std::invalid_argument("lsmr: rhs size mismatch");
    const auto m = static_cast<std::size_t>(rows), n = static_cast<std::size_t>(cols);
    SolverResult res;
    res.x.assign(n, cplx{});
    std::vector<cplx> u(b.begin(), b.end()), v(n), h(n), hbar(n, cplx{}), tmp_m(m), tmp_n(n);

    double beta = norm2(u);
    const double normb = beta;
    if (beta > 0)
        for (auto& z : u) z /= beta;
    adjoint(u, v);
    double alpha = beta > 0 ? norm2(v) : 0.0;
    if (alpha > 0)
        for (auto& z : v) z /= alpha;

    double zetabar = alpha * beta, alphabar = alpha, rho = 1, rhobar = 1, cbar = 1, sbar = 0;
    h = v;
    double betadd = beta, betad = 0, rhodold = 1, tautildeold = 0, thetatilde = 0, zeta = 0, d = 0;
    double normA2 = alpha * alpha, maxrbar = 0, minrbar = 1e100;
    if (alpha * beta == 0.0) {
        res.converged = true;
        return res;
    }
    const double ctol = p.conlim > 0 ? 1.0 / p.conlim : 0.0;

    while (res.iterations < p.max_iters) {
        ++res.iterations;
        forward(v, tmp_m);
        for (std::size_t i = 0; i < m; ++i) u[i] = tmp_m[i] - alpha * u[i];
        beta = norm2(u);
        if (beta > 0) {
            for (auto& z : u) z /= beta;
            adjoint(u, tmp_n);
            for (std::size_t i = 0; i < n; ++i) v[i] = tmp_n[i] - beta * v[i];
            alpha = norm2(v);
            if (alpha > 0)
                for (auto& z : v) z /= alpha;
        }

        const Rot qhat = sym_ortho(alphabar, p.damping);
        const double rhoold = rho;
        const Rot q = sym_ortho(qhat.r, beta);
        rho = q.r;
        const double thetanew = q.s * alpha;
        alphabar = q.c * alpha;

        const double rhobarold = rhobar, zetaold = zeta;
        const double thetabar = sbar * rho;
        const double rhotemp = cbar * rho;
        const Rot qbar = sym_ortho(cbar * rho, thetanew);
        cbar = qbar.c;
        sbar = qbar.s;
        rhobar = qbar.r;
        zeta = cbar * zetabar;
        zetabar = -sbar * zetabar;

        const double f1 = thetabar * rho / (rhoold * rhobarold), f2 = zeta / (rho * rhobar), f3 = thetanew / rho;
        for (std::size_t i = 0; i < n; ++i) {
            hbar[i] = h[i] - f1 * hbar[i];
            res.x[i] += f2 * hbar[i];
            h[i] = v[i] - f3 * h[i];
        }

        // ||r|| estimate.
        const double betaacute = qhat.c * betadd, betacheck = -qhat.s * betadd;
        const double betahat = q.c * betaacute;
        betadd = -q.s * betaacute;
        const double thetatildeold = thetatilde;
        const Rot qt = sym_ortho(rhodold, thetabar);
        thetatilde = qt.s * rhobar;
        rhodold = qt.c * rhobar;
        betad = -qt.s * betad + qt.c * betahat;
        tautildeold = (zetaold - thetatildeold * tautildeold) / qt.r;
        const double taud = (zeta - thetatilde * tautildeold) / rhodold;
        d += betacheck * betacheck;
        const double normr = std::sqrt(d + (betad - taud) * (betad - taud) + betadd * betadd);
        res.residual_norms.push_back(normr);

        normA2 += beta * beta;
        const double normA = std::sqrt(normA2);
        normA2 += alpha * alpha;
        maxrbar = std::max(maxrbar, rhobarold);
        if (res.iterations > 1) minrbar = std::min(minrbar, rhobarold);
        const double condA = std::max(maxrbar, rhotemp) / std::min(minrbar, rhotemp);

        const double normar = std::abs(zetabar);
        const double normx = norm2(res.x);
        const double test1 = normr / normb;
        const double test2 = normA * normr != 0.0 ? normar / (normA * normr) : std::numeric_limits<double>::infinity();
        const double test3 = 1.0 / condA;
        const double t1 = test1 / (1.0 + normA * normx / normb);
        const double rtol = p.btol + p.atol * normA * normx / normb;
        if (test1 <= rtol || test2 <= p.atol || 1.0 + t1 <= 1.0 || 1.0 + test2 <= 1.0) {
            res.converged = true;
            break;
        }
        if (test3 <= ctol || 1.0 + test3 <= 1.0) break;  // ill-conditioned: stop, not converged
    }
    return res;
}

SolverResult lsmr_solve(const LinearIO& sys, const SolverParams& p) {
    return lsmr_solve(
        sys.rows(), sys.cols(), [&](std::span<const cplx> x, std::span<cplx> out) { sys.apply(x, out); },
        [&](std::span<const cplx> r, std::span<cplx> out) { sys.apply_adjoint(r, out); }, sys.y_obs, p);
}

std::vector<std::uint8_t> demap(std::span<const cplx> xhat, double E_d, int data_count) {
    if (E_d <= 0 || data_count <= 0) throw std::invalid_argument("demap: energy and count must be positive");
    const double s = std::sqrt(static_cast<double>(data_count) / E_d);
    std::vector<std::uint8_t> bits;
    bits.reserve(2 * xhat.size());
    for (const auto& z : xhat) {
        const auto [b0, b1] = qam4_demap(s * z);
        bits.push_back(b0);
        bits.push_back(b1);
    }
    return bits;
}

}  // namespace zakmul
