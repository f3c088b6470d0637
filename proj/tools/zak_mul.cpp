// zak-mul: batch driver for the multiuser simulator.
//   zak-mul leakage|ber|nmse|heatmap|validate --config <file> --out <dir> [--seed N] [--threads K]
// Writes <out>/<command>.csv and <out>/<command>.manifest.json.

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "zakmul/config.hpp"
#include "zakmul/eff_channel.hpp"
#include "zakmul/sim.hpp"

#ifndef ZAKMUL_GIT_REVISION
#define ZAKMUL_GIT_REVISION "unknown"
#endif

namespace fs = std::filesystem;
using namespace zakmul;

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw ConfigError("cannot open config " + p.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 failed");
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return hex.str();
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << s;
}

// Largest tap-box boundary magnitude relative to the peak, for the UT-1 self channel.
double truncation_ratio(const ExperimentConfig& cfg) {
    const auto sc = table1_scenario();
    const auto& u = sc.user(1);
    const auto f = FactorizedDDFilter::for_user(u, cfg.filter, cfg.rrc_beta, cfg.truncation_lobes);
    const double nu = cfg.axis == SweepAxis::nu_max_hz ? cfg.values.back() : cfg.nu_max_hz;
    const auto ch = cfg.profile == ChannelProfile::ideal ? ideal_channel() : draw_veh_a(cfg.master_seed, nu);
    const auto taps = discrete_self_channel(EffectiveChannel(f, f, ch), u,
                                            default_tap_box(u, profile_tau_max(cfg), nu, cfg.margins.a1, cfg.margins.a2));
    return boundary_to_peak(taps);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Zak-OTFS multiuser uplink simulator"};
    app.require_subcommand(1);
    fs::path config_path, out_dir;
    std::optional<std::uint64_t> seed;
    int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    for (const char* name : {"leakage", "ber", "nmse", "heatmap", "validate"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "experiment config (schema = 1)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory")->required();
        sub->add_option("--seed", seed, "override run.master_seed");
        sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    }
    CLI11_PARSE(app, argc, argv);
    const std::string cmd = app.get_subcommands().front()->get_name();

    try {
        const std::string text = read_file(config_path);
        auto cfg = parse_config(text);
        if (seed) cfg.master_seed = *seed;
        fs::create_directories(out_dir);

        const auto t0 = std::chrono::steady_clock::now();
        const std::string started = utc_now();
        RunLog log;
        CsvTable table;
        int exit_code = 0;
        if (cmd == "leakage") {
            table = run_leakage(cfg, threads, &log);
        } else if (cmd == "ber" || cmd == "nmse") {
            const double ratio = truncation_ratio(cfg);
            if (ratio > 1e-7)
                log.warnings.push_back("tap box boundary reaches " + format_double(ratio) + " of the peak tap (floor 1e-7)");
            table = cmd == "ber" ? run_ber_sweep(cfg, threads) : run_nmse_sweep(cfg, threads);
        } else if (cmd == "heatmap") {
            table = run_heatmap(cfg, threads);
        } else {
            const auto checks = run_validation(cfg);
            for (const auto& c : checks)
                std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " value=" << format_double(c.value)
                          << " tolerance=" << format_double(c.tolerance) << '\n';
            table = validation_table(checks);
            for (const auto& c : checks) exit_code |= c.pass ? 0 : 1;
        }
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        const fs::path csv = out_dir / (cmd + ".csv");
        write_text(csv, table.str());
        for (const auto& w : log.warnings) std::cerr << "warning: " << w << '\n';

        nlohmann::ordered_json m;
        m["command"] = cmd;
        m["schema"] = cfg.schema;
        m["config_path"] = fs::absolute(config_path).string();
        m["config_sha256"] = sha256_hex(text);
        m["seed"] = cfg.master_seed;
        m["threads"] = threads;
        m["git_revision"] = ZAKMUL_GIT_REVISION;
        m["started_utc"] = started;
        m["wall_time_s"] = wall;
        m["outputs"] = {csv.filename().string()};
        m["warnings"] = log.warnings;
        m["exit_code"] = exit_code;
        write_text(out_dir / (cmd + ".manifest.json"), m.dump(2) + "\n");
        return exit_code;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
