#include "mramsim/device.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mramsim/rng.hpp"

namespace mramsim {

const char* to_string(MtjState s) noexcept { return s == MtjState::P ? "P" : "AP"; }

void MtjParams::validate() const {
    if (!(r_p_nominal_ohm > 0.0)) throw std::domain_error("MtjParams: r_p_nominal must be > 0");
    if (!(tmr0 > 0.0)) throw std::domain_error("MtjParams: tmr0 must be > 0");
    if (!(sigma_r >= 0.0 && sigma_r < 0.5)) throw std::domain_error("MtjParams: sigma_r must be in [0, 0.5)");
}

MtjDevice MtjDevice::nominal(const MtjParams& p, MtjState s) {
    p.validate();
    return MtjDevice{p, s, p.nominal_ohm(s)};
}

void SwitchParams::validate() const {
    if (!(r_on_ohm > 0.0)) throw std::domain_error("SwitchParams: r_on must be > 0");
    if (!(r_off_ohm > r_on_ohm)) throw std::domain_error("SwitchParams: r_off must exceed r_on");
}

SwitchParams SwitchParams::with_m_tmr(double m_tmr_ratio, double r_on_ohm) {
    if (!(m_tmr_ratio > 0.0)) throw std::domain_error("SwitchParams: m-TMR must be > 0");
    SwitchParams sw{r_on_ohm, r_on_ohm * (1.0 + m_tmr_ratio)};
    sw.validate();
    return sw;
}

double tmr(double r_ap_ohm, double r_p_ohm) {
    if (!(r_p_ohm > 0.0)) throw std::domain_error("tmr: r_p must be > 0");
    return (r_ap_ohm - r_p_ohm) / r_p_ohm;
}

double m_tmr(const SwitchParams& sw) {
    sw.validate();
    return (sw.r_off_ohm - sw.r_on_ohm) / sw.r_on_ohm;
}

double sample_resistance(const MtjDevice& dev, std::uint64_t seed) {
    const double nominal = dev.params.nominal_ohm(dev.state);
    if (dev.params.sigma_r == 0.0) return nominal;
    const double r = nominal * (1.0 + dev.params.sigma_r * standard_normal(seed));
    // Gaussian tail below zero is clamped to a small positive floor.
    return std::max(r, 1e-3 * nominal);
}

}  // namespace mramsim
