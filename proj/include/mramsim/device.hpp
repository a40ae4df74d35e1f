#pragma once

#include <cstdint>
#include <string>

namespace mramsim {

enum class MtjState { P, AP };

[[nodiscard]] const char* to_string(MtjState s) noexcept;

/// Static two-state MTJ description. The free-text notes carry the physical
/// stack description along with a run; they do not enter any computation.
struct MtjParams {
    double r_p_nominal_ohm = 6000.0;
    double tmr0 = 2.0;       // (R_AP - R_P) / R_P, 2.0 == 200 %
    double sigma_r = 0.05;   // relative std-dev of the resistance
    std::string area_note = "40nm x 40nm x pi/4";
    std::string t_ox_note = "0.85nm";

    void validate() const;
    [[nodiscard]] double r_ap_nominal_ohm() const noexcept { return r_p_nominal_ohm * (1.0 + tmr0); }
    [[nodiscard]] double nominal_ohm(MtjState s) const noexcept {
        return s == MtjState::P ? r_p_nominal_ohm : r_ap_nominal_ohm();
    }
};

struct MtjDevice {
    MtjParams params;
    MtjState state = MtjState::P;
    double sampled_r_ohm = 0.0;

    /// Device with its sampled resistance at the nominal value of `s`.
    [[nodiscard]] static MtjDevice nominal(const MtjParams& p, MtjState s);
};

/// Access / pull-down transistor modelled as a two-valued resistor.
struct SwitchParams {
    double r_on_ohm = 1.0e3;
    double r_off_ohm = 7.501e6;   // m-TMR 7500

    void validate() const;

    /// Switch whose on/off contrast equals `m_tmr_ratio`.
    [[nodiscard]] static SwitchParams with_m_tmr(double m_tmr_ratio, double r_on_ohm = 1.0e3);
    [[nodiscard]] static SwitchParams magnified_7500() { return with_m_tmr(7500.0); }
    [[nodiscard]] static SwitchParams magnified_15000() { return with_m_tmr(15000.0); }
};

/// (r_ap - r_p) / r_p. Throws std::domain_error for r_p <= 0.
[[nodiscard]] double tmr(double r_ap_ohm, double r_p_ohm);

/// (r_off - r_on) / r_on of the weight-driven transistor.
[[nodiscard]] double m_tmr(const SwitchParams& sw);

/// Gaussian draw around the device's state-nominal resistance with std-dev
/// sigma_r * nominal. Deterministic in `seed`; never returns <= 0.
[[nodiscard]] double sample_resistance(const MtjDevice& dev, std::uint64_t seed);

}  // namespace mramsim
