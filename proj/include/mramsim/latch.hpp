#pragma once

#include <cstdint>

#include "mramsim/device.hpp"

namespace mramsim {

enum class LatchBit { One, Zero, Fail };

[[nodiscard]] const char* to_string(LatchBit b) noexcept;

// Node-W classification levels (absolute, for a 900 mV supply).
inline constexpr double kLatchOneThresholdV = 0.750;
inline constexpr double kLatchZeroThresholdV = 0.150;

// TMR range spanned by the energy-surface anchor points.
inline constexpr double kEnergyHullTmrMin = 0.5;
inline constexpr double kEnergyHullTmrMax = 2.5;

/// Constants of the latch energy surface
///   E = c0 * v_l^2 * t_hold * G_eff,
///   G_eff = 1/(r_ref + r_series) + (1/(R_P + r_series) + 1/(R_AP + r_series)) / 2.
struct LatchEnergyFit {
    double c0 = 0.25;
    double r_p_ohm = 6000.0;
    double r_series_ohm = 1000.0;
};

struct LatchParams {
    double r_ref_ohm = 9500.0;
    double v_l = 0.600;          // V
    double v_dd = 0.900;         // V
    double gain_k = 50.0;
    double sigma_offset = 0.05;  // fraction of r_ref, referred to v_l == v_dd
    double hold_time_s = 4e-9;
    LatchEnergyFit energy;

    void validate() const;

    /// Input-referred offset sigma after supply scaling: a lower latch
    /// voltage regenerates less and sees proportionally more offset.
    [[nodiscard]] double effective_offset_sigma() const noexcept { return sigma_offset * v_dd / v_l; }
};

struct LatchOutcome {
    double v_w = 0.0;       // V
    LatchBit bit = LatchBit::Fail;
    double energy_j = 0.0;
};

struct LatchEnergy {
    double energy_j = 0.0;
    bool extrapolated = false;
};

[[nodiscard]] LatchBit classify(double v_w) noexcept;

/// Node-W voltage for a known offset draw. Exposed for tests and sweeps.
[[nodiscard]] double node_w_voltage(double dev_r_ohm, const LatchParams& p, double offset) noexcept;

/// Latch one MTJ against r_ref. The offset draw is seeded by `seed`; energy
/// comes from energy_model(p, tmr0).
[[nodiscard]] LatchOutcome resolve(double dev_r_ohm, const LatchParams& p, double tmr0, std::uint64_t seed);

/// Energy of one latch-and-hold. Throws std::domain_error on non-positive
/// parameters; flags tmr0 outside the anchor hull as extrapolated.
[[nodiscard]] LatchEnergy energy_model(const LatchParams& p, double tmr0);

struct YieldEstimate {
    double yield_one = 0.0;    // AP devices resolved One
    double yield_zero = 0.0;   // P devices resolved Zero
    double yield_avg = 0.0;
};

/// Monte-Carlo latch yield over `trials` P and `trials` AP devices. Trial t
/// draws from derive_seed(seed, {state, t, ...}) so any `threads` value gives
/// the same counts.
[[nodiscard]] YieldEstimate yield_estimate(const MtjParams& dev, const LatchParams& p, int trials,
                                           std::uint64_t seed, int threads = 1);

/// Closed-form expectation of yield_estimate (Gaussian resistance and offset,
/// ignoring the positive clamp on sampled resistance).
[[nodiscard]] YieldEstimate expected_yield(const MtjParams& dev, const LatchParams& p);

}  // namespace mramsim
