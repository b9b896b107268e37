#include "negcall/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>

#include "negcall/economy.hpp"

namespace negcall {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

template <class T>
T parse_number(std::string_view key, std::string_view value) {
    T out{};
    const char* begin = value.data();
    const char* end = begin + value.size();
    const auto res = std::from_chars(begin, end, out);
    if (res.ec != std::errc{} || res.ptr != end)
        throw ConfigError("config: cannot parse value '" + std::string(value) + "' for key '" +
                          std::string(key) + "'");
    return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "on") return true;
    if (value == "false" || value == "0" || value == "off") return false;
    throw ConfigError("config: cannot parse boolean '" + std::string(value) + "' for key '" +
                      std::string(key) + "'");
}

template <class T>
std::vector<T> parse_list(std::string_view key, std::string_view value) {
    std::vector<T> out;
    std::size_t start = 0;
    while (start <= value.size()) {
        std::size_t comma = value.find(',', start);
        if (comma == std::string_view::npos) comma = value.size();
        const std::string_view item = trim(value.substr(start, comma - start));
        if (item.empty())
            throw ConfigError("config: empty list element for key '" + std::string(key) + "'");
        out.push_back(parse_number<T>(key, item));
        start = comma + 1;
        if (comma == value.size()) break;
    }
    if (out.empty()) throw ConfigError("config: empty list for key '" + std::string(key) + "'");
    return out;
}

}  // namespace

std::string backend_name(Backend b) {
    switch (b) {
        case Backend::euler_qv:
            return "euler_qv";
        case Backend::euler_uniform_t:
            return "euler_uniform_t";
        default:
            return "exact_law";
    }
}

Backend parse_backend(std::string_view name) {
    if (name == "euler_qv") return Backend::euler_qv;
    if (name == "euler_uniform_t") return Backend::euler_uniform_t;
    if (name == "exact_law") return Backend::exact_law;
    throw ConfigError("config: unknown backend '" + std::string(name) +
                      "' (expected euler_qv, euler_uniform_t, or exact_law)");
}

std::string format_name(OutFormat f) {
    switch (f) {
        case OutFormat::csv:
            return "csv";
        case OutFormat::json:
            return "json";
        default:
            return "both";
    }
}

OutFormat parse_format(std::string_view name) {
    if (name == "csv") return OutFormat::csv;
    if (name == "json") return OutFormat::json;
    if (name == "both") return OutFormat::both;
    throw ConfigError("config: unknown format '" + std::string(name) +
                      "' (expected csv, json, or both)");
}

void ScenarioConfig::validate() const {
    if (n_steps < 2) throw ConfigError("config: n_steps must be >= 2");
    if (!(tau_max > 0.0)) throw ConfigError("config: tau_max must be > 0");
    if (n_paths < 1) throw ConfigError("config: n_paths must be >= 1");
    if (!(alpha > 0.0 && alpha < 0.5)) throw ConfigError("config: alpha must lie in (0, 0.5)");
    if (ruin_levels.empty()) throw ConfigError("config: ruin_levels must be nonempty");
    for (double level : ruin_levels)
        if (!(level > 0.0)) throw ConfigError("config: ruin levels must be > 0");
    if (n_list.empty()) throw ConfigError("config: n_list must be nonempty");
    for (std::size_t n : n_list)
        if (n < 2) throw ConfigError("config: n_list entries must be >= 2");
    if (converge_paths < 2) throw ConfigError("config: converge_paths must be >= 2");
    if (output_dir.empty()) throw ConfigError("config: output_dir must be nonempty");
    try {
        builtin_claim(claim);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

GridSpec ScenarioConfig::grid_spec() const {
    switch (backend) {
        case Backend::euler_qv:
            return GridSpec{GridKind::uniform_qv, n_steps, tau_max};
        case Backend::euler_uniform_t:
            return GridSpec{GridKind::uniform_t, n_steps, tau_max};
        default:
            throw ConfigError("config: the exact_law backend has no grid");
    }
}

void apply_key_value(ScenarioConfig& cfg, std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    if (key == "claim") {
        cfg.claim = std::string(value);
    } else if (key == "backend") {
        cfg.backend = parse_backend(value);
    } else if (key == "n_steps") {
        cfg.n_steps = parse_number<std::size_t>(key, value);
    } else if (key == "tau_max") {
        cfg.tau_max = parse_number<double>(key, value);
    } else if (key == "n_paths") {
        cfg.n_paths = parse_number<std::size_t>(key, value);
    } else if (key == "seed") {
        cfg.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "alpha") {
        cfg.alpha = parse_number<double>(key, value);
    } else if (key == "ruin_levels") {
        cfg.ruin_levels = parse_list<double>(key, value);
    } else if (key == "output_dir") {
        cfg.output_dir = std::string(value);
    } else if (key == "format") {
        cfg.format = parse_format(value);
    } else if (key == "bridge_correction") {
        cfg.bridge_correction = parse_bool(key, value);
    } else if (key == "threads") {
        cfg.threads = parse_number<unsigned>(key, value);
    } else if (key == "n_list") {
        cfg.n_list = parse_list<std::size_t>(key, value);
        std::sort(cfg.n_list.begin(), cfg.n_list.end());
        cfg.n_list.erase(std::unique(cfg.n_list.begin(), cfg.n_list.end()), cfg.n_list.end());
    } else if (key == "converge_paths") {
        cfg.converge_paths = parse_number<std::size_t>(key, value);
    } else {
        throw ConfigError("config: unknown key '" + std::string(key) + "'");
    }
}

ScenarioConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open file '" + path + "'");
    ScenarioConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = line;
        const std::size_t hash = sv.find('#');
        if (hash != std::string_view::npos) sv = sv.substr(0, hash);
        sv = trim(sv);
        if (sv.empty()) continue;
        const std::size_t eq = sv.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config: line " + std::to_string(line_no) + " of '" + path +
                              "' is not 'key = value'");
        apply_key_value(cfg, sv.substr(0, eq), sv.substr(eq + 1));
    }
    return cfg;
}

}  // namespace negcall
