#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mramsim/adc.hpp"
#include "mramsim/array.hpp"
#include "mramsim/config.hpp"
#include "mramsim/integrator.hpp"

namespace mramsim {

// ---------------------------------------------------------------------------
// Timing

struct PipelineTiming {
    double t_cen_s = 4e-9;   // latch + compute per column
    double t_adc_s = 2e-9;   // conversion
};

/// Latch window plus the three SW0 quanta, and the conversion time.
[[nodiscard]] PipelineTiming pipeline_timing(const MacroConfig& cfg);

/// Single-column delay T_CEN + T_ADC.
[[nodiscard]] double column_delay(const PipelineTiming& t);

/// Average per-column delay when n columns share the pipeline:
/// T_CEN + T_ADC / n.
[[nodiscard]] double average_delay(const PipelineTiming& t, long n_cols);

// ---------------------------------------------------------------------------
// Energy

struct EnergyBreakdown {
    double latch_j = 0.0;
    double cmf_j = 0.0;
    double adc_j = 0.0;
    double array_j = 0.0;
    double input_j = 0.0;
    double other_j = 0.0;

    [[nodiscard]] double total() const noexcept { return latch_j + cmf_j + adc_j + array_j + input_j + other_j; }
    EnergyBreakdown& operator+=(const EnergyBreakdown& o) noexcept;
};

struct EnergyLedger {
    EnergyBreakdown energy;
    double dynamic_j = 0.0;   // data-dependent part: CMF charging and IN pulses
    long ops = 0;             // 2 per multiply-accumulate term

    /// Block shares of the total; zero when the total is zero.
    [[nodiscard]] EnergyBreakdown fractions() const noexcept;
    [[nodiscard]] double tops_per_watt() const noexcept;
    EnergyLedger& operator+=(const EnergyLedger& o) noexcept;
};

/// Operations counted for one MAC of `rows` terms.
[[nodiscard]] constexpr long mac_ops(long rows) noexcept { return 2 * rows; }

// ---------------------------------------------------------------------------
// MVM

/// Exact integer dot product. Throws std::invalid_argument on length mismatch.
[[nodiscard]] long mac_oracle(std::span<const std::uint8_t> weights, std::span<const std::uint8_t> x);

struct ColumnTiming {
    double latch_start_s = 0.0;
    double sample_end_s = 0.0;
    double adc_start_s = 0.0;
    double adc_end_s = 0.0;
};

struct MacResult {
    int column = 0;
    double v_final = 0.0;
    unsigned code = 0;
    long oracle = 0;
    bool integrator_saturated = false;
    bool adc_saturated = false;
    int latch_failures = 0;
    int input_pulses = 0;
    double latch_energy_j = 0.0;
    ColumnTiming timing;
    std::optional<EnergyLedger> energy;   // present once the energy constants are calibrated
    std::optional<IntegratorTrace> trace;
};

struct MvmRun {
    int rows = 0;
    MirrorMode mode = MirrorMode::CMF;
    bool pipelined = true;
    double makespan_s = 0.0;
    std::vector<MacResult> columns;
};

struct MvmOptions {
    bool pipelined = true;
    bool keep_traces = false;
};

/// Column by column: latch, compute-line current, integrate, convert. The
/// pipelined schedule overlaps conversion of column j with latching of j+1;
/// it changes timing only.
[[nodiscard]] MvmRun run_mvm(const LocalBca& bca, const InputVector& inputs, const MacroConfig& cfg,
                             MirrorMode mode, std::uint64_t seed, const MvmOptions& opts);
[[nodiscard]] MvmRun run_mvm(const LocalBca& bca, const InputVector& inputs, const MacroConfig& cfg,
                             MirrorMode mode, std::uint64_t seed);

/// Splits up to 1024 rows over local BCAs of at most 64 rows each and adds
/// their per-column codes digitally.
struct MacroColumn {
    long value = 0;
    long oracle = 0;
};
[[nodiscard]] std::vector<MacroColumn> run_macro(const BitMatrix& weights, const InputVector& inputs,
                                                 const MacroConfig& cfg, MirrorMode mode, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Multi-bit recombination

struct PlaneCode {
    long value = 0;
    int weight_bit = 0;
    int input_plane = 0;
};

struct Recombined {
    long value = 0;
    bool overflow = false;
};

/// Shift-adder: sum of value << (weight_bit + input_plane_bits * input_plane).
/// Flags results that do not fit in `output_bits`.
[[nodiscard]] Recombined recombine_multibit(std::span<const PlaneCode> codes, int input_plane_bits = 2,
                                            int output_bits = 24);

/// Splits unsigned activations of `input_bits` into 2-bit planes, LSB first.
[[nodiscard]] std::vector<InputVector> split_input_planes(std::span<const unsigned> x, int input_bits);

/// Bit-serial MVM over 2-bit input planes, recombined per column.
[[nodiscard]] std::vector<Recombined> run_mvm_multibit(const LocalBca& bca, std::span<const unsigned> x,
                                                       int input_bits, const MacroConfig& cfg, MirrorMode mode,
                                                       std::uint64_t seed);

// ---------------------------------------------------------------------------
// Energy accounting

/// Sums per-column energies of a run. Throws UncalibratedError when the
/// fitted engine constants are missing.
[[nodiscard]] EnergyLedger energy_report(const MvmRun& run, const MacroConfig& cfg);

struct EfficiencyPoint {
    int rows_on = 0;
    EnergyLedger ledger;              // one full-activity column
    double tops_per_watt = 0.0;
    double baseline_tops_per_watt = 0.0;
    double efficiency_ratio = 0.0;    // in-memory / digital baseline
    double delay_s = 0.0;             // average per-column delay
    double baseline_delay_s = 0.0;
    double delay_ratio = 0.0;         // in-memory / digital baseline
};

/// Efficiency of one column with every row active at the maximum activation.
/// The row current is rescaled as 1/rows_on beyond the 4-bit full scale so
/// the peak output stays at v_max. Throws UncalibratedError when needed.
[[nodiscard]] EfficiencyPoint tops_per_watt(int rows_on, const MacroConfig& cfg);

/// Fraction of v_max reached by the full-activity column at rows_on.
[[nodiscard]] double full_activity_swing(int rows_on) noexcept;

}  // namespace mramsim
