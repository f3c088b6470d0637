#include "zakmul/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace zakmul {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto t = trim(item);
        if (!t.empty()) out.push_back(std::move(t));
    }
    return out;
}

template <class T>
T parse_number(const std::string& s) {
    T v{};
    const auto* end = s.data() + s.size();
    const auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || p != end) throw std::invalid_argument("not a number: '" + s + "'");
    if constexpr (std::is_floating_point_v<T>)
        if (!std::isfinite(v)) throw std::invalid_argument("not finite: '" + s + "'");
    return v;
}

template <class E>
E parse_enum(const std::string& s, std::initializer_list<std::pair<const char*, E>> names) {
    for (const auto& [n, e] : names)
        if (s == n) return e;
    std::string opts;
    for (const auto& [n, e] : names) opts += (opts.empty() ? "" : "|") + std::string(n);
    throw std::invalid_argument("expected " + opts + ", got '" + s + "'");
}

PulseKind parse_kind(const std::string& s) { return parse_enum<PulseKind>(s, {{"sinc", PulseKind::sinc}, {"rrc", PulseKind::rrc}}); }

std::vector<int> parse_users(const std::string& v) {
    std::vector<int> out;
    for (const auto& s : split_list(v)) {
        const int id = parse_number<int>(s);
        if (id < 1 || id > 4) throw std::invalid_argument("user ids are 1..4");
        out.push_back(id);
    }
    if (out.empty()) throw std::invalid_argument("empty user list");
    return out;
}

int positive(int v) {
    if (v < 1) throw std::invalid_argument("must be >= 1");
    return v;
}

int non_negative(int v) {
    if (v < 0) throw std::invalid_argument("must be >= 0");
    return v;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> m = {
        {"run.master_seed", [](auto& c, auto& v) { c.master_seed = parse_number<std::uint64_t>(v); }},
        {"run.trials", [](auto& c, auto& v) { c.trials = positive(parse_number<int>(v)); }},
        {"run.engine", [](auto& c, auto& v) { c.engine = parse_enum<Engine>(v, {{"discrete_dd", Engine::discrete_dd}, {"oracle", Engine::oracle}}); }},
        {"scenario.filter", [](auto& c, auto& v) { c.filter = parse_kind(v); }},
        {"scenario.rrc_beta",
         [](auto& c, auto& v) {
             c.rrc_beta = parse_number<double>(v);
             if (c.rrc_beta < 0 || c.rrc_beta > 1) throw std::invalid_argument("must lie in [0, 1]");
         }},
        {"scenario.truncation_lobes", [](auto& c, auto& v) { c.truncation_lobes = positive(parse_number<int>(v)); }},
        {"scenario.a1", [](auto& c, auto& v) { c.margins.a1 = non_negative(parse_number<int>(v)); }},
        {"scenario.a2", [](auto& c, auto& v) { c.margins.a2 = non_negative(parse_number<int>(v)); }},
        {"scenario.g1", [](auto& c, auto& v) { c.margins.g1 = non_negative(parse_number<int>(v)); }},
        {"scenario.g2", [](auto& c, auto& v) { c.margins.g2 = non_negative(parse_number<int>(v)); }},
        {"channel.profile", [](auto& c, auto& v) { c.profile = parse_enum<ChannelProfile>(v, {{"veh_a", ChannelProfile::veh_a}, {"ideal", ChannelProfile::ideal}}); }},
        {"channel.nu_max_hz",
         [](auto& c, auto& v) {
             c.nu_max_hz = parse_number<double>(v);
             if (c.nu_max_hz < 0) throw std::invalid_argument("must be >= 0");
         }},
        {"link.snr_db", [](auto& c, auto& v) { c.snr_db = parse_number<double>(v); }},
        {"link.pdr_db", [](auto& c, auto& v) { c.pdr_db = parse_number<double>(v); }},
        {"link.users", [](auto& c, auto& v) { c.users = parse_users(v); }},
        {"link.mode",
         [](auto& c, auto& v) {
             c.mode = parse_enum<LinkMode>(v, {{"single_user", LinkMode::single_user}, {"multiuser", LinkMode::multiuser}, {"both", LinkMode::both}});
         }},
        {"link.oracle_oversampling", [](auto& c, auto& v) { c.oracle_oversampling = positive(parse_number<int>(v)); }},
        {"sweep.axis",
         [](auto& c, auto& v) {
             c.axis = parse_enum<SweepAxis>(v, {{"snr_db", SweepAxis::snr_db}, {"pdr_db", SweepAxis::pdr_db}, {"nu_max_hz", SweepAxis::nu_max_hz}});
         }},
        {"sweep.values",
         [](auto& c, auto& v) {
             c.values.clear();
             for (const auto& s : split_list(v)) c.values.push_back(parse_number<double>(s));
             if (c.values.empty()) throw std::invalid_argument("empty sweep");
             if (!std::is_sorted(c.values.begin(), c.values.end()) || std::adjacent_find(c.values.begin(), c.values.end()) != c.values.end())
                 throw std::invalid_argument("sweep values must be strictly increasing");
         }},
        {"solver.max_iters", [](auto& c, auto& v) { c.solver.max_iters = positive(parse_number<int>(v)); }},
        {"solver.atol", [](auto& c, auto& v) { c.solver.atol = parse_number<double>(v); }},
        {"solver.btol", [](auto& c, auto& v) { c.solver.btol = parse_number<double>(v); }},
        {"solver.damping", [](auto& c, auto& v) { c.solver.damping = parse_number<double>(v); }},
        {"solver.conlim", [](auto& c, auto& v) { c.solver.conlim = parse_number<double>(v); }},
        {"leakage.tx_user", [](auto& c, auto& v) { c.leak_tx_user = parse_users(v).at(0); }},
        {"leakage.rx_users", [](auto& c, auto& v) { c.leak_rx_users = parse_users(v); }},
        {"leakage.filters",
         [](auto& c, auto& v) {
             c.leak_filters.clear();
             for (const auto& s : split_list(v)) c.leak_filters.push_back(parse_kind(s));
             if (c.leak_filters.empty()) throw std::invalid_argument("empty filter list");
         }},
        {"leakage.draws", [](auto& c, auto& v) { c.leak_draws = positive(parse_number<int>(v)); }},
        {"leakage.quad_oversample", [](auto& c, auto& v) { c.quad_oversample = positive(parse_number<int>(v)); }},
        {"heatmap.rx_user", [](auto& c, auto& v) { c.heat_rx_user = parse_users(v).at(0); }},
        {"heatmap.draws", [](auto& c, auto& v) { c.heat_draws = positive(parse_number<int>(v)); }},
        {"validate.inject_fault",
         [](auto& c, auto& v) {
             c.inject_fault = parse_enum<FaultInjection>(v, {{"none", FaultInjection::none}, {"corrupt_tap", FaultInjection::corrupt_tap}});
         }},
    };
    return m;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig c;
    std::istringstream in(text);
    std::string line, section;
    bool have_schema = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        const auto body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) continue;
        const auto where = "line " + std::to_string(lineno) + ": ";
        if (body.front() == '[') {
            if (body.back() != ']') throw ConfigError(where + "unterminated section header");
            if (!have_schema) throw ConfigError(where + "`schema = 1` must precede the first section");
            section = trim(std::string_view(body).substr(1, body.size() - 2));
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError(where + "expected `key = value`");
        const auto key = trim(std::string_view(body).substr(0, eq));
        const auto value = trim(std::string_view(body).substr(eq + 1));
        if (section.empty() && key == "schema") {
            if (value != "1") throw ConfigError(where + "unsupported schema '" + value + "'");
            have_schema = true;
            continue;
        }
        const auto full = section + "." + key;
        const auto it = setters().find(full);
        if (it == setters().end()) throw ConfigError(where + "unknown key '" + full + "'");
        try {
            it->second(c, value);
        } catch (const std::exception& e) {
            throw ConfigError(where + full + ": " + e.what());
        }
    }
    if (!have_schema) throw ConfigError("missing `schema = 1`");
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open config " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

const char* to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::snr_db: return "snr_db";
        case SweepAxis::pdr_db: return "pdr_db";
        case SweepAxis::nu_max_hz: return "nu_max_hz";
    }
    return "?";
}

const char* to_string(LinkMode m) {
    switch (m) {
        case LinkMode::single_user: return "single_user";
        case LinkMode::multiuser: return "multiuser";
        case LinkMode::both: return "both";
    }
    return "?";
}

const char* to_string(PulseKind k) { return k == PulseKind::sinc ? "sinc" : "rrc"; }

}  // namespace zakmul
