#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "negcall/pathgen.hpp"

namespace negcall {

/// Raised for malformed config files, bad flag values, and violated scenario
/// invariants; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Backend { euler_qv, euler_uniform_t, exact_law };
enum class OutFormat { csv, json, both };

std::string backend_name(Backend b);
Backend parse_backend(std::string_view name);
std::string format_name(OutFormat f);
OutFormat parse_format(std::string_view name);

/// One scenario: which market, which discretization/backend, how many paths,
/// and how results are reported. Mirrored 1:1 by the config-file keys and CLI
/// flags (flags override file values).
struct ScenarioConfig {
    std::string claim = "atm_call";
    Backend backend = Backend::euler_qv;
    std::size_t n_steps = 4096;
    double tau_max = 40.0;
    std::size_t n_paths = 10000;
    std::uint64_t seed = 12345;
    double alpha = 0.01;
    std::vector<double> ruin_levels{1.0, 5.0, 10.0};
    std::string output_dir = "out";
    OutFormat format = OutFormat::both;
    bool bridge_correction = true;
    unsigned threads = 0;  ///< 0 = hardware concurrency
    std::vector<std::size_t> n_list{64, 128, 256, 512, 1024, 2048, 4096};
    std::size_t converge_paths = 10000;

    /// Throws ConfigError when any field violates its invariant (unknown
    /// claim, n_steps < 2, alpha outside (0, 0.5), ...).
    void validate() const;

    /// Grid implied by the backend; throws ConfigError for exact_law, which
    /// has no grid.
    GridSpec grid_spec() const;
};

/// Applies one `key = value` setting; both the file loader and the CLI flag
/// layer funnel through this. Throws ConfigError on unknown keys or
/// unparseable values.
void apply_key_value(ScenarioConfig& cfg, std::string_view key, std::string_view value);

/// Defaults overlaid with the flat key=value file at `path` (one setting per
/// line, '#' comments, blank lines ignored). Throws ConfigError when the file
/// is missing or malformed. Does not call validate().
ScenarioConfig load_config_file(const std::string& path);

}  // namespace negcall
