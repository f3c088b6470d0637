#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "zakmul/dd_core.hpp"
#include "zakmul/frame_pilot.hpp"

namespace zakmul {

enum class ObservationRows { all, data_and_guard };

// y_obs ~ H x_d with H sparse, stored by column. Rows index grid cells k*N + l.
struct LinearIO {
    int M = 0, N = 0;
    std::vector<int> row_cells;                  // grid cell of each observation row
    std::vector<std::pair<int, int>> col_cells;  // (k, l) of each data column
    std::vector<std::size_t> col_ptr;            // CSC layout
    std::vector<int> row_idx;
    std::vector<cplx> vals;
    std::vector<cplx> y_obs;

    int rows() const { return static_cast<int>(row_cells.size()); }
    int cols() const { return static_cast<int>(col_cells.size()); }
    void apply(std::span<const cplx> x, std::span<cplx> out) const;          // out = H x
    void apply_adjoint(std::span<const cplx> r, std::span<cplx> out) const;  // out = H^H r
};

// Column (k, l) of D collects h[kappa, lambda] at cell (k + kappa, l + lambda) folded into the
// fundamental grid: with n = floor((k + kappa)/M), the coefficient is
//   h[kappa, lambda] e^{-j2 pi n l/N} e^{j2 pi lambda (k - nM)/(MN)}.
LinearIO build_system(const DDTapSet& taps, const FrameLayout& layout, const DDGridSignal& y,
                      ObservationRows rows = ObservationRows::all);

struct SolverParams {
    int max_iters = 200;
    double atol = 1e-6;
    double btol = 1e-6;
    double damping = 0.0;
    double conlim = 1e8;
};

struct SolverResult {
    std::vector<cplx> x;
    int iterations = 0;
    bool converged = false;
    std::vector<double> residual_norms;  // ||b - A x_k|| estimate after each iteration
};

using LinearMap = std::function<void(std::span<const cplx>, std::span<cplx>)>;

// LSMR (Fong and Saunders) for min ||b - A x||^2 + damping^2 ||x||^2 with complex A given
// through forward and adjoint products.
SolverResult lsmr_solve(int rows, int cols, const LinearMap& forward, const LinearMap& adjoint,
                        std::span<const cplx> b, const SolverParams& p = {});
SolverResult lsmr_solve(const LinearIO& sys, const SolverParams& p = {});

// Scale by sqrt(|D|/E_d) and slice to Gray 4-QAM bits.
std::vector<std::uint8_t> demap(std::span<const cplx> xhat, double E_d, int data_count);

}  // namespace zakmul
