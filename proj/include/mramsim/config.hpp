#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mramsim/adc.hpp"
#include "mramsim/array.hpp"
#include "mramsim/device.hpp"
#include "mramsim/integrator.hpp"
#include "mramsim/latch.hpp"

namespace mramsim {

using Json = nlohmann::ordered_json;

// Every field carries its unit in the name, exactly as it appears in the
// config file. Module parameter structs (SI units) are derived on demand.

struct DeviceConfig {
    double r_p_nominal_ohm = 6000.0;
    double tmr0 = 2.0;
    double sigma_r = 0.05;
    std::string area_note = "40nm x 40nm x pi/4";
    std::string t_ox_note = "0.85nm";
    double r_on_ohm = 1000.0;
    double r_off_ohm = 7.501e6;
    bool operator==(const DeviceConfig&) const = default;
};

struct LatchConfig {
    double r_ref_ohm = 9500.0;
    double v_l_mv = 600.0;
    double gain_k = 50.0;
    double sigma_offset = 0.05;
    double hold_time_ns = 4.0;
    double energy_c0 = 0.25;
    bool operator==(const LatchConfig&) const = default;
};

struct ArrayConfig {
    double v_cl_mv = 100.0;
    double t_cp_ps = 800.0;
    bool operator==(const ArrayConfig&) const = default;
};

struct IntegratorConfig {
    double gamma = 1.0;
    std::optional<double> c1_ff;   // unset: sized so one unit equals v_max / 15
    double t_h_ps = 800.0;
    double v_max_mv = 650.0;
    double droop_lambda_per_v = 0.0;
    double feedback_factor = 0.5;
    double v_bias_swing_mv = 80.0;
    int steps_per_quantum = 64;
    bool operator==(const IntegratorConfig&) const = default;
};

struct AdcConfig {
    int bits = 4;
    std::optional<double> v_ref_mv;   // unset: v_max * 16 / 15
    double v_com_mv = 450.0;
    std::vector<int> cap_weights{8, 4, 2, 1, 1};
    double comparator_offset_sigma_mv = 0.0;
    bool operator==(const AdcConfig&) const = default;
};

/// Per-column energy constants. The optional ones are fitted by calibration
/// against published efficiency figures and are absent until then.
struct EngineConfig {
    double t_latch_ps = 1600.0;
    double t_adc_ps = 2000.0;
    int pipeline_columns = 16;
    bool pipelined = true;
    double cmf_bias_fj = 200.0;
    double cmf_full_scale_fj = 60.0;
    double adc_fj = 60.0;
    double array_per_row_fj = 4.0;
    double input_per_pulse_fj = 1.5;
    std::optional<double> other_fj;
    std::optional<double> baseline_energy_per_row_fj;
    std::optional<double> baseline_delay_per_row_ps;
    double baseline_delay_fixed_ps = 0.0;
    bool operator==(const EngineConfig&) const = default;
};

struct AnalysisConfig {
    int trials = 5000;
    int threads = 1;
    bool operator==(const AnalysisConfig&) const = default;
};

struct MacroConfig {
    std::uint64_t seed = 1;
    std::string calibration_file;
    double v_dd_mv = 900.0;
    DeviceConfig device;
    LatchConfig latch;
    ArrayConfig array;
    IntegratorConfig integrator;
    AdcConfig adc;
    EngineConfig engine;
    AnalysisConfig analysis;

    bool operator==(const MacroConfig&) const = default;

    /// Re-checks every module invariant. Throws ConfigError.
    void validate() const;

    [[nodiscard]] MtjParams mtj_params() const;
    [[nodiscard]] SwitchParams switch_params() const;
    [[nodiscard]] LatchParams latch_params() const;
    [[nodiscard]] MirrorParams mirror_params() const;
    [[nodiscard]] SarAdcParams adc_params() const;

    [[nodiscard]] double v_dd() const noexcept { return v_dd_mv / 1e3; }
    [[nodiscard]] double t_cp_s() const noexcept { return array.t_cp_ps / 1e12; }
    /// Row current when N1 and N2 both conduct.
    [[nodiscard]] double i_a() const;
    /// Output step of one conducting row over one quantum.
    [[nodiscard]] double unit_voltage() const;

    /// Nominal parameters; latch noise and droop uncalibrated.
    [[nodiscard]] static MacroConfig defaults() { return MacroConfig{}; }
    /// Noise-free, droop-free configuration for exact-arithmetic checks.
    [[nodiscard]] static MacroConfig ideal();
};

[[nodiscard]] Json to_json(const MacroConfig& cfg);

/// Parses a config document. Unknown keys are rejected; missing keys keep
/// their defaults. `device.m_tmr_preset` (7500 or 15000) sets r_off_ohm.
[[nodiscard]] MacroConfig config_from_json(const Json& j);

/// Applies the constants of a calibration document onto `cfg`.
void apply_calibration(MacroConfig& cfg, const Json& calibration);

struct LoadedConfig {
    MacroConfig config;          // calibration already applied, calibration_file cleared
    std::string calibration_source;
    Json calibration_residuals = Json::object();
};

/// Reads a config file (or defaults when `path` is empty) and applies the
/// calibration file it names, resolved relative to the config file.
[[nodiscard]] LoadedConfig load_config(const std::string& path);

[[nodiscard]] LoadedConfig resolve_config(MacroConfig cfg, const std::string& base_dir);

[[nodiscard]] Json read_json_file(const std::string& path);

}  // namespace mramsim
