#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "zakmul/equalizer.hpp"
#include "zakmul/filters.hpp"
#include "zakmul/frame_pilot.hpp"

namespace zakmul {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SweepAxis { snr_db, pdr_db, nu_max_hz };
enum class Engine { discrete_dd, oracle };
enum class LinkMode { single_user, multiuser, both };
enum class ChannelProfile { veh_a, ideal };
enum class FaultInjection { none, corrupt_tap };

struct ExperimentConfig {
    int schema = 1;

    // [run]
    std::uint64_t master_seed = 1;
    int trials = 2000;
    Engine engine = Engine::discrete_dd;

    // [scenario] Four-user layout over the 1.08 MHz x 2.5 ms box; filter shared by every user.
    PulseKind filter = PulseKind::sinc;
    double rrc_beta = 0.1;
    int truncation_lobes = 20;
    FrameMargins margins;

    // [channel]
    ChannelProfile profile = ChannelProfile::veh_a;
    double nu_max_hz = 815.0;

    // [link] Fixed operating point; the sweep axis overrides one of these.
    double snr_db = 20.0;
    double pdr_db = 0.0;
    std::vector<int> users{1};
    LinkMode mode = LinkMode::single_user;
    int oracle_oversampling = 8;

    // [sweep]
    SweepAxis axis = SweepAxis::snr_db;
    std::vector<double> values{0, 5, 10, 15, 20, 25, 30};

    // [solver]
    SolverParams solver;

    // [leakage]
    int leak_tx_user = 1;
    std::vector<int> leak_rx_users{2, 3, 4};
    std::vector<PulseKind> leak_filters{PulseKind::sinc, PulseKind::rrc};
    int leak_draws = 100;
    int quad_oversample = 4;

    // [heatmap]
    int heat_rx_user = 1;
    int heat_draws = 20;

    // [validate]
    FaultInjection inject_fault = FaultInjection::none;
};

// Parses the key-value format documented in the README: `key = value` lines grouped by
// `[section]` headers, `#` comments, and a mandatory `schema = 1` before any section.
// Throws ConfigError naming the offending line for unknown keys, bad values, or a broken invariant.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

const char* to_string(SweepAxis a);
const char* to_string(LinkMode m);
const char* to_string(PulseKind k);

}  // namespace zakmul
