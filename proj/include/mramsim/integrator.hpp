#pragma once

#include <ostream>
#include <vector>

#include "mramsim/array.hpp"

namespace mramsim {

enum class MirrorMode { TCM, CMF };

[[nodiscard]] const char* to_string(MirrorMode m) noexcept;

struct MirrorParams {
    double gamma = 1.0;               // (W/L)_P2 / (W/L)_P1
    double c1_f = 0.9230769230769231e-12;
    double t_h_s = 800e-12;           // SW0 charge window per quantum
    double v_dd = 0.900;
    double v_max = 0.650;             // top of the linear CMF range
    double droop_lambda = 0.0;        // 1/V, output-conductance droop
    double feedback_factor = 0.5;     // 0 = ideal CMF, 1 = same as TCM
    double v_bias_swing = 0.080;      // V_BIAS reduction at v_max
    int steps_per_quantum = 64;

    void validate() const;

    /// Output step for one conducting row over one quantum, gamma*i_a*T_H/C.
    [[nodiscard]] double unit_voltage(double i_a) const noexcept { return gamma * i_a * t_h_s / c1_f; }
};

/// Relative charging current g(V) in (0, 1] for the given front end.
[[nodiscard]] double charge_efficiency(double v_out, const MirrorParams& p, MirrorMode mode) noexcept;

/// V_BIAS pulled down by the feedback pair at output voltage v_out.
[[nodiscard]] double bias_reduction(double v_out, const MirrorParams& p, MirrorMode mode) noexcept;

/// Ideal mirrored current gamma * i_cl.
[[nodiscard]] double mirror_current(double i_cl, const MirrorParams& p);

struct IntegratorSample {
    double t_s = 0.0;
    double v_out = 0.0;
    double i_out = 0.0;
};

struct IntegratorTrace {
    std::vector<IntegratorSample> samples;
    double v_final = 0.0;
    bool saturated = false;   // output clamped at v_dd

    /// time_ps,v_out_mv,i_out_ua
    void write_csv(std::ostream& os) const;
};

/// Integrating current mirror charging C1. Holds V_OUT between calls, so one
/// instance serves one local BCA and is used sequentially.
class Integrator {
public:
    explicit Integrator(MirrorParams p);

    /// Discharge the output capacitor.
    void reset() noexcept { v_out_ = 0.0; }
    [[nodiscard]] double v_out() const noexcept { return v_out_; }
    [[nodiscard]] const MirrorParams& params() const noexcept { return p_; }

    /// Charges over the three SW0 quanta with fixed-step RK4, starting from
    /// the present V_OUT.
    IntegratorTrace integrate(const ColumnCurrentTrace& trace, MirrorMode mode);

private:
    MirrorParams p_;
    double v_out_ = 0.0;
};

/// Fresh-integrator convenience.
[[nodiscard]] IntegratorTrace integrate(const ColumnCurrentTrace& trace, const MirrorParams& p, MirrorMode mode);

}  // namespace mramsim
