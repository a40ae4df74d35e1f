#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace mramsim {

/// Charge-redistribution SAR converter. cap_weights lists the decision
/// capacitors MSB first followed by the dummy LSB unit that only takes part
/// in sampling.
struct SarAdcParams {
    int bits = 4;
    double v_ref = 0.650 * 16.0 / 15.0;   // V
    double v_com = 0.450;                  // V
    std::vector<int> cap_weights{8, 4, 2, 1, 1};
    double comparator_offset_sigma = 0.0;  // V

    void validate() const;
    [[nodiscard]] int total_units() const;
    [[nodiscard]] double lsb() const noexcept { return v_ref / 16.0; }
    [[nodiscard]] unsigned max_code() const noexcept { return (1U << bits) - 1U; }
};

// Comparator ties resolve toward the higher code. A difference within this
// fraction of V_REF counts as a tie.
inline constexpr double kComparatorTieFraction = 1e-9;

struct AdcResult {
    unsigned code = 0;
    std::vector<double> vp_history;   // post-sample node P, then one entry per phase
    bool saturated = false;           // v_in > v_ref
};

/// Successive-approximation conversion of v_in (V). Throws
/// std::domain_error for v_in < 0.
[[nodiscard]] AdcResult convert(double v_in, const SarAdcParams& p, std::uint64_t seed = 0);

/// Samples the settled output at the close of the sample window, then
/// converts. The code equals convert(provider()).
[[nodiscard]] AdcResult sample_and_convert_pipelined(const std::function<double()>& v_out_provider,
                                                     const SarAdcParams& p, std::uint64_t seed = 0);

}  // namespace mramsim
