#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mramsim/analysis.hpp"
#include "mramsim/config.hpp"
#include "mramsim/engine.hpp"

namespace mramsim {

inline constexpr const char* kVersion = "0.1.0";

/// Resolved inputs shared by every subcommand.
struct RunContext {
    MacroConfig config;               // calibration applied
    std::string calibration_source;   // empty when uncalibrated
    Json calibration_residuals = Json::object();
    int threads = 1;                  // worker cap; never part of the report
};

struct ContextOptions {
    std::string config_path;        // empty: built-in defaults
    std::string calibration_path;   // overrides the config's calibration_file
    std::optional<std::string> seed_env;   // value of MRAMSIM_SEED, if set
    std::optional<int> threads;
};

/// Loads the config, applies any calibration and the seed override.
/// Throws ConfigError on a malformed seed or thread count.
[[nodiscard]] RunContext make_context(const ContextOptions& opts);

/// A report plus the CSV artifacts it names, keyed by file name.
struct CommandOutput {
    Json report;
    std::map<std::string, std::string> files;

    /// Pretty-printed report with a trailing newline.
    [[nodiscard]] std::string report_text() const;
};

/// ASCII 0/1 grid, one row per line. Blank lines are skipped; commas and
/// spaces between digits are allowed. Throws ConfigError naming row and column.
[[nodiscard]] BitMatrix parse_weights(const std::string& text);
/// One integer 0..3 per line. Throws ConfigError naming the line.
[[nodiscard]] InputVector parse_inputs(const std::string& text);

[[nodiscard]] MirrorMode parse_mode(const std::string& s);

struct MvmArgs {
    std::string weights_text;
    std::string inputs_text;
    MirrorMode mode = MirrorMode::CMF;
    bool sequential = false;
    bool trace = false;   // emit trace.csv
};
[[nodiscard]] CommandOutput cmd_mvm(const RunContext& ctx, const MvmArgs& args);

struct SweepArgs {
    SweepGrid grid;   // empty axes take the built-in grid
    std::optional<int> trials;
};
[[nodiscard]] CommandOutput cmd_sweep(const RunContext& ctx, const SweepArgs& args);

enum class InlMode { TCM, CMF, Both };
[[nodiscard]] InlMode parse_inl_mode(const std::string& s);
[[nodiscard]] CommandOutput cmd_inl(const RunContext& ctx, InlMode mode);

[[nodiscard]] CommandOutput cmd_energy(const RunContext& ctx, int rows);

[[nodiscard]] CommandOutput cmd_adc_test(const RunContext& ctx, int grid);

/// Result also carries the calibration document under files["calibration.json"].
[[nodiscard]] CommandOutput cmd_calibrate(const RunContext& ctx);

[[nodiscard]] CommandOutput cmd_compare_conventional(const RunContext& ctx, const std::vector<double>& tmr,
                                                     int rows);

}  // namespace mramsim
