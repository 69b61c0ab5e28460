#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mimo/harness.hpp"

namespace mimo::cli {

/// Invalid or unreadable configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Combo {
    Method method = Method::proposed_somp;
    ArrayKind array = ArrayKind::sparse;
};

struct RunConfig {
    /// Radar, array, scene and detection sections, plus the trial section's method/array/SNR.
    TrialConfig trial;
    std::size_t trial_index = 0;

    std::vector<Combo> combos;
    std::vector<std::optional<double>> snr_list;
    std::size_t n_trials = 300;
    std::uint64_t seed = 1;
    bool calibrate = true;
    CalibrationOptions calibration;

    std::string out_dir = "out";
    bool plots = false;
};

RunConfig default_run_config();

/// Parses a config document or a run manifest (its embedded config is used).
/// Unknown keys and type mismatches raise ConfigError naming the field path; syntax errors carry line:column.
RunConfig parse_run_config(const std::string& text, const std::string& source_name);
RunConfig load_run_config(const std::string& path);

/// Fully resolved config; parse_run_config(to_json(c).dump()) reproduces c.
nlohmann::ordered_json to_json(const RunConfig& config);

/// Throws ConfigError when the resolved config is unusable.
void validate(const RunConfig& config);

}  // namespace mimo::cli
