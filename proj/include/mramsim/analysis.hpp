#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mramsim/config.hpp"
#include "mramsim/engine.hpp"
#include "mramsim/latch.hpp"

namespace mramsim {

// ---------------------------------------------------------------------------
// Latch Monte-Carlo

struct SweepGrid {
    std::vector<double> r_ref_ohm;
    std::vector<double> v_l_mv;
    std::vector<double> tmr;
    int trials = 5000;

    void validate() const;
    [[nodiscard]] std::size_t size() const noexcept { return r_ref_ohm.size() * v_l_mv.size() * tmr.size(); }
};

struct YieldRow {
    double r_ref_ohm = 0.0;
    double v_l_mv = 0.0;
    double tmr = 0.0;
    YieldEstimate yield;
    double power_fj = 0.0;
    bool power_extrapolated = false;
};

/// Reference latch operating points: (TMR, R_ref, V_l) with the reported
/// 1-bit latch energy and average yield.
struct LatchReferencePoint {
    double tmr = 0.0;
    double r_ref_ohm = 0.0;
    double v_l_mv = 0.0;
    double power_fj = 0.0;
    double yield_pct = 0.0;
};

[[nodiscard]] std::vector<LatchReferencePoint> published_latch_points();

/// Cartesian sweep; rows ordered r_ref-major, then v_l, then tmr. Point i
/// draws from derive_seed(seed, {i}), so `threads` never changes the table.
[[nodiscard]] std::vector<YieldRow> yield_sweep(const SweepGrid& grid, const MacroConfig& cfg, std::uint64_t seed,
                                                int threads = 1);

/// Same statistics at paired operating points instead of a product grid.
[[nodiscard]] std::vector<YieldRow> latch_table(std::span<const LatchReferencePoint> points, const MacroConfig& cfg,
                                                int trials, std::uint64_t seed, int threads = 1);

// ---------------------------------------------------------------------------
// Linearity

struct CurvePoint {
    double code = 0.0;
    double value = 0.0;
};

struct InlReport {
    std::vector<CurvePoint> curve;
    std::vector<double> inl;   // LSB, endpoint-fit
    double lsb = 0.0;          // endpoint slope per code
    double max_abs_inl = 0.0;
};

/// Endpoint-fit INL. Needs >= 2 points with strictly increasing codes.
[[nodiscard]] InlReport compute_inl(std::span<const CurvePoint> curve);

/// Compute-line trace for `units` total conducting row-quanta, filled
/// quantum-first: rows at activation 3 plus one remainder row.
[[nodiscard]] ColumnCurrentTrace thermometer_trace(int units, int rows, double i_a);

/// Analog transfer curve V_OUT / V_a over ideal results 0..codes-1.
[[nodiscard]] std::vector<CurvePoint> transfer_curve(const MacroConfig& cfg, MirrorMode mode, int codes = 16);

[[nodiscard]] double max_inl(const MacroConfig& cfg, MirrorMode mode, int codes = 16);

struct QuantizedSweep {
    std::vector<CurvePoint> curve;   // (oracle, ADC code)
    InlReport inl;
    long max_abs_error = 0;          // max |code - oracle|
};

/// End-to-end sweep of every MAC result 0..rows*3 through run_mvm with a
/// noise-free latch and converter.
[[nodiscard]] QuantizedSweep quantized_sweep(const MacroConfig& cfg, MirrorMode mode, int rows = 4);

// ---------------------------------------------------------------------------
// Conventional 1T-1M comparison

struct InfluenceCurves {
    std::vector<double> ideal;     // ideal MAC result at each point
    std::vector<double> w_sweep;   // all inputs 3, weights 1 row by row
    std::vector<double> x_sweep;   // all weights 1, inputs raised unit by unit
    double mismatch_lsb = 0.0;     // max |w_sweep - x_sweep| at matching ideal values
};

struct ConventionalComparison {
    double tmr = 0.0;
    InfluenceCurves conventional;
    InfluenceCurves proposed;
    double mismatch_factor = 0.0;   // conventional / proposed
};

/// Conventional cell: current V_CL / (R_MTJ + r_on) with the weight held in
/// R_MTJ. Proposed cell: the latched weight switches N1 between r_on and
/// r_off. Outputs are in units of one fully conducting row-quantum.
[[nodiscard]] std::vector<ConventionalComparison> compare_conventional(std::span<const double> tmr_values,
                                                                       const MacroConfig& cfg, int rows = 4);

// ---------------------------------------------------------------------------
// Calibration

struct CalibrationTargets {
    std::vector<LatchReferencePoint> latch_points;
    double inl_tcm_lsb = 0.0;
    double inl_cmf_lsb = 0.0;
    int efficiency_rows = 0;
    double tops_per_watt = 0.0;
    double baseline_ratio = 0.0;
    double delay_ratio = 0.0;

    [[nodiscard]] static CalibrationTargets published();
    /// Throws CalibrationError on missing or non-positive targets.
    void validate() const;
};

struct CalibrationResult {
    double gain_k = 0.0;
    double sigma_offset = 0.0;
    double sigma_r = 0.0;
    double energy_c0 = 0.0;
    double droop_lambda_per_v = 0.0;
    double feedback_factor = 0.0;
    double other_fj = 0.0;
    double baseline_energy_per_row_fj = 0.0;
    double baseline_delay_per_row_ps = 0.0;
    Json residuals = Json::object();

    /// Calibration document: targets, constants, residuals.
    [[nodiscard]] Json to_json(const CalibrationTargets& targets) const;
    void apply(MacroConfig& cfg) const;
};

/// Deterministic fit of the model knobs to the targets: closed-form minimax
/// for the latch energy constant, pattern search on the analytic yield for
/// (gain_k, sigma_offset, sigma_r), bisection for droop and feedback, and
/// closed-form solves for the engine constants. Throws CalibrationError
/// naming the first target that cannot be met.
[[nodiscard]] CalibrationResult calibrate(const CalibrationTargets& targets, const MacroConfig& base);

}  // namespace mramsim
