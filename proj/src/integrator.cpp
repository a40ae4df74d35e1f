#include "mramsim/integrator.hpp"

#include <algorithm>
#include <stdexcept>

namespace mramsim {

const char* to_string(MirrorMode m) noexcept { return m == MirrorMode::TCM ? "tcm" : "cmf"; }

void MirrorParams::validate() const {
    if (!(gamma > 0.0)) throw std::domain_error("MirrorParams: gamma must be > 0");
    if (!(c1_f > 0.0)) throw std::domain_error("MirrorParams: c1 must be > 0");
    if (!(t_h_s > 0.0)) throw std::domain_error("MirrorParams: t_h must be > 0");
    if (!(v_max > 0.0 && v_max < v_dd)) throw std::domain_error("MirrorParams: need 0 < v_max < v_dd");
    if (!(droop_lambda >= 0.0)) throw std::domain_error("MirrorParams: droop_lambda must be >= 0");
    if (!(feedback_factor >= 0.0 && feedback_factor <= 1.0)) {
        throw std::domain_error("MirrorParams: feedback_factor must be in [0, 1]");
    }
    if (!(v_bias_swing >= 0.0)) throw std::domain_error("MirrorParams: v_bias_swing must be >= 0");
    if (steps_per_quantum < 64) throw std::domain_error("MirrorParams: steps_per_quantum must be >= 64");
}

double charge_efficiency(double v_out, const MirrorParams& p, MirrorMode mode) noexcept {
    const double v = std::max(v_out, 0.0);
    double g = 0.0;
    if (mode == MirrorMode::TCM) {
        g = 1.0 - p.droop_lambda * v;
    } else {
        // Feedback compensates up to v_max; past it the swing is exhausted
        // and the remaining droop is uncompensated.
        const double held = std::min(v, p.v_max);
        g = 1.0 - p.feedback_factor * p.droop_lambda * held - p.droop_lambda * (v - held);
    }
    return std::max(g, 0.0);
}

double bias_reduction(double v_out, const MirrorParams& p, MirrorMode mode) noexcept {
    if (mode == MirrorMode::TCM) return 0.0;
    return p.v_bias_swing * std::clamp(v_out, 0.0, p.v_max) / p.v_max;
}

double mirror_current(double i_cl, const MirrorParams& p) {
    if (!(i_cl >= 0.0)) throw std::domain_error("mirror_current: i_cl must be >= 0");
    return p.gamma * i_cl;
}

void IntegratorTrace::write_csv(std::ostream& os) const {
    os << "time_ps,v_out_mv,i_out_ua\n";
    for (const auto& s : samples) {
        os << s.t_s * 1e12 << ',' << s.v_out * 1e3 << ',' << s.i_out * 1e6 << '\n';
    }
}

Integrator::Integrator(MirrorParams p) : p_(p) { p_.validate(); }

IntegratorTrace Integrator::integrate(const ColumnCurrentTrace& trace, MirrorMode mode) {
    IntegratorTrace out;
    const int steps = p_.steps_per_quantum;
    const double dt = p_.t_h_s / steps;
    out.samples.reserve(static_cast<std::size_t>(kChargeQuanta * steps + 1));

    double v = v_out_;
    double drive = 0.0;
    auto slope = [&](double vv) { return drive * charge_efficiency(vv, p_, mode) / p_.c1_f; };
    out.samples.push_back({0.0, v, mirror_current(trace.current(0), p_) * charge_efficiency(v, p_, mode)});

    for (int q = 0; q < kChargeQuanta; ++q) {
        drive = mirror_current(trace.current(q), p_);
        for (int s = 0; s < steps; ++s) {
            if (drive > 0.0) {
                const double k1 = slope(v);
                const double k2 = slope(v + 0.5 * dt * k1);
                const double k3 = slope(v + 0.5 * dt * k2);
                const double k4 = slope(v + dt * k3);
                v += dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
            }
            if (v > p_.v_dd) {
                v = p_.v_dd;
                out.saturated = true;
            }
            const double t = (q * steps + s + 1) * dt;
            out.samples.push_back({t, v, drive * charge_efficiency(v, p_, mode)});
        }
    }
    v_out_ = v;
    out.v_final = v;
    return out;
}

IntegratorTrace integrate(const ColumnCurrentTrace& trace, const MirrorParams& p, MirrorMode mode) {
    Integrator integ(p);
    return integ.integrate(trace, mode);
}

}  // namespace mramsim
