#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "mramsim/latch.hpp"

using namespace mramsim;

namespace {

LatchParams noiseless() {
    LatchParams p;
    p.sigma_offset = 0.0;
    p.gain_k = 200.0;
    return p;
}

}  // namespace

TEST(Latch, ClassifyThresholds) {
    EXPECT_EQ(classify(0.80), LatchBit::One);
    EXPECT_EQ(classify(0.75), LatchBit::Fail);
    EXPECT_EQ(classify(0.40), LatchBit::Fail);
    EXPECT_EQ(classify(0.15), LatchBit::Fail);
    EXPECT_EQ(classify(0.10), LatchBit::Zero);
}

TEST(Latch, NodeVoltageMidpointAtReference) {
    const auto p = noiseless();
    EXPECT_NEAR(node_w_voltage(p.r_ref_ohm, p, 0.0), p.v_dd / 2, 1e-12);
    EXPECT_GT(node_w_voltage(p.r_ref_ohm * 1.1, p, 0.0), p.v_dd / 2);
    EXPECT_LT(node_w_voltage(p.r_ref_ohm * 0.9, p, 0.0), p.v_dd / 2);
}

TEST(Latch, OffsetShiftsReference) {
    const auto p = noiseless();
    EXPECT_NEAR(node_w_voltage(p.r_ref_ohm * 1.05, p, 0.05), p.v_dd / 2, 1e-12);
}

TEST(Latch, NominalDevicesResolveCorrectly) {
    const auto p = noiseless();
    MtjParams d;
    EXPECT_EQ(resolve(d.nominal_ohm(MtjState::AP), p, d.tmr0, 1).bit, LatchBit::One);
    EXPECT_EQ(resolve(d.nominal_ohm(MtjState::P), p, d.tmr0, 1).bit, LatchBit::Zero);
}

TEST(Latch, EffectiveOffsetScalesWithLatchVoltage) {
    LatchParams p;
    p.sigma_offset = 0.06;
    p.v_l = 0.45;
    EXPECT_NEAR(p.effective_offset_sigma(), 0.06 * 0.9 / 0.45, 1e-15);
}

TEST(Latch, EnergyClosedForm) {
    LatchParams p;
    p.energy.c0 = 0.3;
    const double tmr0 = 2.0;
    const double r_ap = 6000.0 * 3.0;
    const double g = 1.0 / (9500.0 + 1000.0) + 0.5 * (1.0 / 7000.0 + 1.0 / (r_ap + 1000.0));
    const auto e = energy_model(p, tmr0);
    EXPECT_NEAR(e.energy_j, 0.3 * 0.36 * 4e-9 * g, 1e-24);
    EXPECT_FALSE(e.extrapolated);
}

TEST(Latch, EnergyFlagsExtrapolationAndRejectsBadInput) {
    LatchParams p;
    EXPECT_TRUE(energy_model(p, 3.0).extrapolated);
    EXPECT_TRUE(energy_model(p, 0.4).extrapolated);
    EXPECT_THROW((void)energy_model(p, 0.0), std::domain_error);
    p.r_ref_ohm = 0.0;
    EXPECT_THROW((void)energy_model(p, 2.0), std::domain_error);
}

TEST(Latch, EnergyDecreasesWithTmrAndGrowsWithVl) {
    LatchParams p;
    EXPECT_GT(energy_model(p, 1.0).energy_j, energy_model(p, 2.0).energy_j);
    LatchParams q = p;
    q.v_l = 0.7;
    EXPECT_GT(energy_model(q, 2.0).energy_j, energy_model(p, 2.0).energy_j);
}

TEST(Latch, YieldIsThreadInvariant) {
    MtjParams d;
    d.sigma_r = 0.2;
    LatchParams p;
    p.gain_k = 100.0;
    p.sigma_offset = 0.1;
    const auto a = yield_estimate(d, p, 3000, 99, 1);
    const auto b = yield_estimate(d, p, 3000, 99, 4);
    EXPECT_EQ(a.yield_one, b.yield_one);
    EXPECT_EQ(a.yield_zero, b.yield_zero);
}

TEST(Latch, MonteCarloMatchesAnalyticExpectation) {
    MtjParams d;
    d.sigma_r = 0.15;
    d.tmr0 = 1.0;
    LatchParams p;
    p.r_ref_ohm = 8500.0;
    p.gain_k = 120.0;
    p.sigma_offset = 0.08;
    const int n = 20000;
    const auto mc = yield_estimate(d, p, n, 5);
    const auto ex = expected_yield(d, p);
    // Four binomial standard errors.
    auto tol = [&](double y) { return 4.0 * std::sqrt(y * (1 - y) / n) + 1e-3; };
    EXPECT_NEAR(mc.yield_one, ex.yield_one, tol(ex.yield_one));
    EXPECT_NEAR(mc.yield_zero, ex.yield_zero, tol(ex.yield_zero));
}

TEST(Latch, YieldRisesWithTmr) {
    MtjParams d;
    d.sigma_r = 0.2;
    LatchParams p;
    p.gain_k = 100.0;
    p.sigma_offset = 0.1;
    double prev = 0.0;
    for (double t : {0.5, 1.0, 1.5, 2.0, 2.5}) {
        d.tmr0 = t;
        const double y = expected_yield(d, p).yield_avg;
        EXPECT_GT(y, prev);
        prev = y;
    }
}

TEST(Latch, RejectsBadTrials) {
    EXPECT_THROW((void)yield_estimate(MtjParams{}, LatchParams{}, 0, 1), std::invalid_argument);
}
