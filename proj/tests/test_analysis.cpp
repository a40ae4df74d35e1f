#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mramsim/analysis.hpp"
#include "mramsim/errors.hpp"

using namespace mramsim;

TEST(Analysis, EndpointInlIsZeroAtEnds) {
    const std::vector<CurvePoint> c{{0, 0.0}, {1, 1.2}, {2, 2.1}, {3, 3.0}};
    const auto r = compute_inl(c);
    EXPECT_DOUBLE_EQ(r.lsb, 1.0);
    EXPECT_EQ(r.inl.front(), 0.0);
    EXPECT_EQ(r.inl.back(), 0.0);
    EXPECT_NEAR(r.inl[1], 0.2, 1e-12);
    EXPECT_NEAR(r.max_abs_inl, 0.2, 1e-12);
}

TEST(Analysis, InlUsesEndpointSlope) {
    // A straight line of slope 2 has zero INL.
    const std::vector<CurvePoint> c{{0, 1.0}, {1, 3.0}, {2, 5.0}};
    EXPECT_NEAR(compute_inl(c).max_abs_inl, 0.0, 1e-15);
}

TEST(Analysis, InlRejectsBadCurves) {
    const std::vector<CurvePoint> one{{0, 0}};
    const std::vector<CurvePoint> dup{{0, 0}, {0, 1}};
    const std::vector<CurvePoint> flat{{0, 1}, {1, 1}};
    EXPECT_THROW((void)compute_inl(one), std::domain_error);
    EXPECT_THROW((void)compute_inl(dup), std::domain_error);
    EXPECT_THROW((void)compute_inl(flat), std::domain_error);
}

TEST(Analysis, ThermometerTraceFillsQuantumFirst) {
    const auto t = thermometer_trace(7, 3, 1.0);
    EXPECT_EQ(t.active_rows, (std::array<int, 3>{3, 2, 2}));
    EXPECT_EQ(t.total_units(), 7);
    EXPECT_THROW((void)thermometer_trace(10, 3, 1.0), std::domain_error);
}

TEST(Analysis, IdealTransferCurveIsStraight) {
    const auto cfg = MacroConfig::ideal();
    for (auto m : {MirrorMode::TCM, MirrorMode::CMF}) {
        const auto c = transfer_curve(cfg, m);
        ASSERT_EQ(c.size(), 16u);
        for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(c[i].value, static_cast<double>(i), 1e-9);
        EXPECT_LT(max_inl(cfg, m), 1e-9);
    }
}

TEST(Analysis, MaxInlMonotoneInLambda) {
    auto cfg = MacroConfig::ideal();
    double prev_t = -1.0, prev_c = -1.0;
    for (double l : {0.1, 0.3, 0.5, 0.7, 0.9, 1.1}) {
        cfg.integrator.droop_lambda_per_v = l;
        const double t = max_inl(cfg, MirrorMode::TCM);
        const double c = max_inl(cfg, MirrorMode::CMF);
        EXPECT_GT(t, prev_t);
        EXPECT_GT(c, prev_c);
        EXPECT_LT(c, t);
        prev_t = t;
        prev_c = c;
    }
}

TEST(Analysis, QuantizedSweepIdealIsExact) {
    const auto s = quantized_sweep(MacroConfig::ideal(), MirrorMode::CMF, 4);
    EXPECT_EQ(s.curve.size(), 13u);
    EXPECT_EQ(s.max_abs_error, 0);
    EXPECT_NEAR(s.inl.max_abs_inl, 0.0, 1e-12);
}

TEST(Analysis, YieldSweepOrderAndThreadInvariance) {
    SweepGrid g{{8500, 9500}, {600}, {1.0, 2.0}, 400};
    auto cfg = MacroConfig::defaults();
    cfg.device.sigma_r = 0.2;
    const auto a = yield_sweep(g, cfg, 3, 1);
    const auto b = yield_sweep(g, cfg, 3, 3);
    ASSERT_EQ(a.size(), 4u);
    EXPECT_EQ(a[1].r_ref_ohm, 8500);
    EXPECT_EQ(a[1].tmr, 2.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].yield.yield_avg, b[i].yield.yield_avg);
        EXPECT_EQ(a[i].power_fj, b[i].power_fj);
    }
    g.trials = 50;
    EXPECT_THROW((void)yield_sweep(g, cfg, 3), std::invalid_argument);
}

TEST(Analysis, ConventionalMismatchAndTmrIndependence) {
    const std::vector<double> tmr{0.5, 1.0, 2.0};
    const auto cmp = compare_conventional(tmr, MacroConfig::defaults(), 4);
    ASSERT_EQ(cmp.size(), 3u);
    // Conventional: leak ratio r = (R_P + r_on) / (R_AP + r_on), mismatch 3 * 4 * r.
    const double r = 7000.0 / (18000.0 + 1000.0);
    EXPECT_NEAR(cmp[2].conventional.mismatch_lsb, 12.0 * r, 1e-12);
    EXPECT_GT(cmp[0].conventional.mismatch_lsb, cmp[2].conventional.mismatch_lsb);
    for (const auto& c : cmp) {
        EXPECT_DOUBLE_EQ(c.proposed.mismatch_lsb, cmp[0].proposed.mismatch_lsb);
        EXPECT_LT(c.proposed.mismatch_lsb, 0.01);
        EXPECT_EQ(c.conventional.ideal.back(), 12.0);
    }
}

TEST(Analysis, PublishedTargetsValidate) {
    EXPECT_NO_THROW(CalibrationTargets::published().validate());
    CalibrationTargets zero;
    EXPECT_THROW(zero.validate(), CalibrationError);
    auto t = CalibrationTargets::published();
    t.inl_tcm_lsb = 0.0;
    EXPECT_THROW(t.validate(), CalibrationError);
}

TEST(Analysis, CalibrationHitsTargets) {
    const auto targets = CalibrationTargets::published();
    const auto r = calibrate(targets, MacroConfig::defaults());
    auto cfg = MacroConfig::defaults();
    r.apply(cfg);
    EXPECT_NEAR(max_inl(cfg, MirrorMode::TCM), 1.014, 0.01);
    EXPECT_NEAR(max_inl(cfg, MirrorMode::CMF), 0.430, 0.01);
    for (double v : r.residuals.at("latch_yield_pts")) EXPECT_LT(std::abs(v), 1.5);
    for (double v : r.residuals.at("latch_power_rel")) EXPECT_LT(std::abs(v), 0.10);
    const auto e = tops_per_watt(64, cfg);
    EXPECT_NEAR(e.tops_per_watt, 25.4, 1e-9);
    EXPECT_NEAR(e.efficiency_ratio, 3.05, 1e-9);
    EXPECT_NEAR(e.delay_ratio, 0.838, 1e-9);
}

TEST(Analysis, CalibrationIsDeterministic) {
    const auto t = CalibrationTargets::published();
    const auto a = calibrate(t, MacroConfig::defaults()).to_json(t).dump();
    const auto b = calibrate(t, MacroConfig::defaults()).to_json(t).dump();
    EXPECT_EQ(a, b);
}

TEST(Analysis, UnreachableInlTargetNamed) {
    auto t = CalibrationTargets::published();
    t.inl_tcm_lsb = 50.0;
    try {
        (void)calibrate(t, MacroConfig::defaults());
        FAIL() << "expected CalibrationError";
    } catch (const CalibrationError& e) {
        EXPECT_NE(std::string(e.what()).find("inl_tcm_lsb"), std::string::npos);
    }
}

TEST(Analysis, UnreachableEfficiencyNamed) {
    auto t = CalibrationTargets::published();
    t.tops_per_watt = 1000.0;
    try {
        (void)calibrate(t, MacroConfig::defaults());
        FAIL() << "expected CalibrationError";
    } catch (const CalibrationError& e) {
        EXPECT_NE(std::string(e.what()).find("tops_per_watt"), std::string::npos);
    }
}
