#include "mramsim/adc.hpp"

#include <numeric>
#include <stdexcept>

#include "mramsim/rng.hpp"

namespace mramsim {

void SarAdcParams::validate() const {
    if (bits != 4) throw std::domain_error("SarAdcParams: this macro uses a 4-bit converter");
    if (cap_weights.size() != static_cast<std::size_t>(bits) + 1) {
        throw std::domain_error("SarAdcParams: expected bits + 1 capacitors");
    }
    if (total_units() != 16) throw std::domain_error("SarAdcParams: capacitor weights must sum to 16 units");
    for (int w : cap_weights) {
        if (w <= 0) throw std::domain_error("SarAdcParams: capacitor weights must be positive");
    }
    if (!(v_ref > 0.0)) throw std::domain_error("SarAdcParams: v_ref must be > 0");
    if (!(comparator_offset_sigma >= 0.0)) throw std::domain_error("SarAdcParams: offset sigma must be >= 0");
}

int SarAdcParams::total_units() const { return std::accumulate(cap_weights.begin(), cap_weights.end(), 0); }

AdcResult convert(double v_in, const SarAdcParams& p, std::uint64_t seed) {
    p.validate();
    if (!(v_in >= 0.0)) throw std::domain_error("convert: v_in must be >= 0");

    const double units = p.total_units();
    const double tie = kComparatorTieFraction * p.v_ref;
    const double v_n = p.v_com;

    AdcResult r;
    r.saturated = v_in > p.v_ref;
    r.vp_history.reserve(static_cast<std::size_t>(p.bits) + 1);

    // Sampling: all bottom plates swing from V_IN to ground.
    double v_p = p.v_com - v_in;
    r.vp_history.push_back(v_p);

    unsigned code = 0;
    bool prev_kept = true;
    for (int i = 0; i < p.bits; ++i) {
        const double step = p.cap_weights[static_cast<std::size_t>(i)] / units * p.v_ref;
        if (i > 0 && !prev_kept) {
            // Previous capacitor back to ground, this one to V_REF.
            const double back = p.cap_weights[static_cast<std::size_t>(i - 1)] / units * p.v_ref;
            v_p += step - back;
        } else {
            v_p += step;
        }
        r.vp_history.push_back(v_p);

        double offset = 0.0;
        if (p.comparator_offset_sigma > 0.0) {
            offset = p.comparator_offset_sigma *
                     standard_normal(derive_seed(seed, {salt(Stream::Comparator), static_cast<std::uint64_t>(i)}));
        }
        // V_P above V_N means V_IN is below the trial level.
        const bool bit = (v_p - (v_n + offset)) <= tie;
        prev_kept = bit;
        code = (code << 1U) | (bit ? 1U : 0U);
    }
    r.code = code;
    return r;
}

AdcResult sample_and_convert_pipelined(const std::function<double()>& v_out_provider, const SarAdcParams& p,
                                       std::uint64_t seed) {
    const double held = v_out_provider();
    return convert(held, p, seed);
}

}  // namespace mramsim
