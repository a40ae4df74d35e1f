#include "mramsim/latch.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "mramsim/rng.hpp"

namespace mramsim {

const char* to_string(LatchBit b) noexcept {
    switch (b) {
        case LatchBit::One: return "1";
        case LatchBit::Zero: return "0";
        case LatchBit::Fail: return "fail";
    }
    return "?";
}

void LatchParams::validate() const {
    if (!(r_ref_ohm > 0.0)) throw std::domain_error("LatchParams: r_ref must be > 0");
    if (!(v_dd > 0.0)) throw std::domain_error("LatchParams: v_dd must be > 0");
    if (!(v_l > 0.0 && v_l <= v_dd)) throw std::domain_error("LatchParams: v_l must be in (0, v_dd]");
    if (!(gain_k > 0.0)) throw std::domain_error("LatchParams: gain_k must be > 0");
    if (!(sigma_offset >= 0.0)) throw std::domain_error("LatchParams: sigma_offset must be >= 0");
    if (!(hold_time_s > 0.0)) throw std::domain_error("LatchParams: hold_time must be > 0");
}

LatchBit classify(double v_w) noexcept {
    if (v_w > kLatchOneThresholdV) return LatchBit::One;
    if (v_w < kLatchZeroThresholdV) return LatchBit::Zero;
    return LatchBit::Fail;
}

double node_w_voltage(double dev_r_ohm, const LatchParams& p, double offset) noexcept {
    const double x = p.gain_k * (dev_r_ohm - p.r_ref_ohm * (1.0 + offset)) / p.r_ref_ohm;
    return p.v_dd / (1.0 + std::exp(-x));
}

LatchOutcome resolve(double dev_r_ohm, const LatchParams& p, double tmr0, std::uint64_t seed) {
    const double sigma = p.effective_offset_sigma();
    const double offset = sigma == 0.0 ? 0.0 : sigma * standard_normal(seed);
    const double v_w = node_w_voltage(dev_r_ohm, p, offset);
    return LatchOutcome{v_w, classify(v_w), energy_model(p, tmr0).energy_j};
}

LatchEnergy energy_model(const LatchParams& p, double tmr0) {
    const auto& fit = p.energy;
    if (!(p.r_ref_ohm > 0.0) || !(p.hold_time_s > 0.0) || !(tmr0 > 0.0) || !(fit.r_p_ohm > 0.0) ||
        !(fit.r_series_ohm >= 0.0) || !(fit.c0 >= 0.0) || p.v_l < 0.0) {
        throw std::domain_error("energy_model: parameters must be positive");
    }
    const double r_ap = fit.r_p_ohm * (1.0 + tmr0);
    const double g_eff = 1.0 / (p.r_ref_ohm + fit.r_series_ohm) +
                         0.5 * (1.0 / (fit.r_p_ohm + fit.r_series_ohm) + 1.0 / (r_ap + fit.r_series_ohm));
    LatchEnergy e;
    e.energy_j = fit.c0 * p.v_l * p.v_l * p.hold_time_s * g_eff;
    e.extrapolated = tmr0 < kEnergyHullTmrMin || tmr0 > kEnergyHullTmrMax;
    return e;
}

namespace {

struct Counts {
    long ones = 0;
    long zeros = 0;
};

Counts count_range(const MtjParams& dev, const LatchParams& p, std::uint64_t seed, int begin, int end) {
    Counts c;
    const MtjDevice ap = MtjDevice::nominal(dev, MtjState::AP);
    const MtjDevice pp = MtjDevice::nominal(dev, MtjState::P);
    for (int t = begin; t < end; ++t) {
        const auto ut = static_cast<std::uint64_t>(t);
        {
            const double r = sample_resistance(ap, derive_seed(seed, {salt(Stream::DeviceAP), ut, salt(Stream::Resistance)}));
            const auto out = resolve(r, p, dev.tmr0, derive_seed(seed, {salt(Stream::DeviceAP), ut, salt(Stream::LatchOffset)}));
            if (out.bit == LatchBit::One) ++c.ones;
        }
        {
            const double r = sample_resistance(pp, derive_seed(seed, {salt(Stream::DeviceP), ut, salt(Stream::Resistance)}));
            const auto out = resolve(r, p, dev.tmr0, derive_seed(seed, {salt(Stream::DeviceP), ut, salt(Stream::LatchOffset)}));
            if (out.bit == LatchBit::Zero) ++c.zeros;
        }
    }
    return c;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

YieldEstimate yield_estimate(const MtjParams& dev, const LatchParams& p, int trials, std::uint64_t seed,
                             int threads) {
    if (trials < 1) throw std::invalid_argument("yield_estimate: trials must be >= 1");
    dev.validate();
    p.validate();
    threads = std::clamp(threads, 1, trials);

    Counts total;
    if (threads == 1) {
        total = count_range(dev, p, seed, 0, trials);
    } else {
        std::vector<Counts> parts(static_cast<std::size_t>(threads));
        std::vector<std::thread> workers;
        for (int w = 0; w < threads; ++w) {
            const int begin = static_cast<int>(static_cast<long>(trials) * w / threads);
            const int end = static_cast<int>(static_cast<long>(trials) * (w + 1) / threads);
            workers.emplace_back([&, w, begin, end] { parts[static_cast<std::size_t>(w)] = count_range(dev, p, seed, begin, end); });
        }
        for (auto& t : workers) t.join();
        for (const auto& c : parts) {
            total.ones += c.ones;
            total.zeros += c.zeros;
        }
    }
    YieldEstimate y;
    y.yield_one = static_cast<double>(total.ones) / trials;
    y.yield_zero = static_cast<double>(total.zeros) / trials;
    y.yield_avg = 0.5 * (y.yield_one + y.yield_zero);
    return y;
}

YieldEstimate expected_yield(const MtjParams& dev, const LatchParams& p) {
    dev.validate();
    p.validate();
    // One  <=> gain * x > ln 5, Zero <=> gain * x < -ln 5, where
    // x = dev_r / r_ref - 1 - offset is Gaussian.
    const double t = std::log(kLatchOneThresholdV / (p.v_dd - kLatchOneThresholdV)) / p.gain_k;
    const double t0 = std::log((p.v_dd - kLatchZeroThresholdV) / kLatchZeroThresholdV) / p.gain_k;
    const double so = p.effective_offset_sigma();
    auto spread = [&](double r) { return std::hypot(dev.sigma_r * r / p.r_ref_ohm, so); };
    auto prob_above = [](double mean, double sd, double thr) {
        if (sd == 0.0) return mean > thr ? 1.0 : 0.0;
        return normal_cdf((mean - thr) / sd);
    };
    const double r_ap = dev.r_ap_nominal_ohm();
    const double r_p = dev.r_p_nominal_ohm;
    YieldEstimate y;
    y.yield_one = prob_above(r_ap / p.r_ref_ohm - 1.0, spread(r_ap), t);
    y.yield_zero = prob_above(-(r_p / p.r_ref_ohm - 1.0), spread(r_p), t0);
    y.yield_avg = 0.5 * (y.yield_one + y.yield_zero);
    return y;
}

}  // namespace mramsim
