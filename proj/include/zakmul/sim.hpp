#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "zakmul/config.hpp"
#include "zakmul/lattice.hpp"

namespace zakmul {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Comma-separated, header first, '\n' line ends.
    std::string str() const;
    // Index of a header column; throws std::out_of_range if absent.
    std::size_t column(const std::string& name) const;
};

// Shortest decimal that round-trips to the same double ("inf", "-inf", "nan" for non-finite).
std::string format_double(double v);

// Runs f(0..n-1) on up to `threads` workers. Callers write into per-index slots and reduce
// afterwards in index order, so results do not depend on the thread count.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f);

struct RunLog {
    std::vector<std::string> warnings;
};

// Leakage ratio I_{q,s}/S_{s,s} averaged over channel draws as a ratio of sums.
// Columns: tx_user, rx_user, nu_max_hz, filter, ratio_db. Sweeps nu_max when the axis is
// nu_max_hz, otherwise uses the fixed channel.nu_max_hz.
CsvTable run_leakage(const ExperimentConfig& cfg, int threads, RunLog* log = nullptr);

// Monte-Carlo link sweep shared by the BER and NMSE tables. Per (user, trial) the channel,
// bits and noise come from dedicated substreams, so every sweep point and both modes see
// common random numbers.
struct LinkSweepPoint {
    int user = 0;
    double value = 0;
    LinkMode mode = LinkMode::single_user;
    std::uint64_t bit_errors = 0, bits = 0;
    double nmse_err = 0, nmse_ref = 0;
    int trials = 0;
};
std::vector<LinkSweepPoint> run_link_sweep(const ExperimentConfig& cfg, int threads);

// Columns: user, sweep_name, sweep_value, ber, trials, mode, bit_errors, bits, ci95_half_width.
CsvTable ber_table(const ExperimentConfig& cfg, const std::vector<LinkSweepPoint>& pts);
// Columns: user, sweep_name, sweep_value, nmse, nmse_db, trials, mode.
CsvTable nmse_table(const ExperimentConfig& cfg, const std::vector<LinkSweepPoint>& pts);
CsvTable run_ber_sweep(const ExperimentConfig& cfg, int threads);
CsvTable run_nmse_sweep(const ExperimentConfig& cfg, int threads);

// Per-carrier MUI-to-useful ratio on the receiver's grid with every user active.
// Columns: k, l, ratio_db.
CsvTable run_heatmap(const ExperimentConfig& cfg, int threads);

struct ValidationCheck {
    std::string name;
    double value = 0;      // measured error or deviation
    double tolerance = 0;  // pass when value <= tolerance
    bool pass = false;
};
// Cross-engine and invariant suite; honours cfg.inject_fault. Columns of the table form:
// check, value, tolerance, status.
std::vector<ValidationCheck> run_validation(const ExperimentConfig& cfg);
CsvTable validation_table(const std::vector<ValidationCheck>& checks);

// Veh-A delay spread, or zero for the ideal profile.
double profile_tau_max(const ExperimentConfig& cfg);

}  // namespace zakmul
