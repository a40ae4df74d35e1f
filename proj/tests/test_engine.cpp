#include <gtest/gtest.h>

#include <stdexcept>

#include "mramsim/engine.hpp"
#include "mramsim/errors.hpp"

using namespace mramsim;

namespace {

MacroConfig calibrated_ideal() {
    MacroConfig c = MacroConfig::ideal();
    c.engine.other_fj = 50.0;
    c.engine.baseline_energy_per_row_fj = 200.0;
    c.engine.baseline_delay_per_row_ps = 70.0;
    return c;
}

}  // namespace

TEST(Engine, PipelineTimingDefaults) {
    const auto t = pipeline_timing(MacroConfig::defaults());
    EXPECT_DOUBLE_EQ(t.t_cen_s, 4e-9);
    EXPECT_DOUBLE_EQ(t.t_adc_s, 2e-9);
    EXPECT_DOUBLE_EQ(column_delay(t), 6e-9);
    EXPECT_DOUBLE_EQ(average_delay(t, 1), column_delay(t));
    EXPECT_DOUBLE_EQ(average_delay(t, 16), 4e-9 + 2e-9 / 16);
}

TEST(Engine, TimingRejectsBadInput) {
    const auto t = pipeline_timing(MacroConfig::defaults());
    EXPECT_THROW((void)average_delay(t, 0), std::domain_error);
    EXPECT_THROW((void)column_delay(PipelineTiming{0.0, 1e-9}), std::domain_error);
}

TEST(Engine, MacOracle) {
    const std::vector<std::uint8_t> w{1, 0, 1, 1}, x{3, 2, 1, 0};
    EXPECT_EQ(mac_oracle(w, x), 4);
    const std::vector<std::uint8_t> shorter{1};
    EXPECT_THROW((void)mac_oracle(w, shorter), std::invalid_argument);
}

TEST(Engine, IdealRunEqualsOracle) {
    const auto cfg = MacroConfig::ideal();
    BitMatrix w(5, 3);
    for (int r = 0; r < 5; ++r) w.set(r, 0, true);
    w.set(1, 1, true);
    w.set(4, 2, true);
    const InputVector x{{3, 2, 3, 3, 1}};
    const auto run = run_mvm(LocalBca::load_weights(w, cfg.mtj_params()), x, cfg, MirrorMode::CMF, 1);
    ASSERT_EQ(run.columns.size(), 3u);
    for (const auto& c : run.columns) EXPECT_EQ(static_cast<long>(c.code), c.oracle);
    EXPECT_EQ(run.columns[0].oracle, 12);
    EXPECT_EQ(run.columns[1].oracle, 2);
}

TEST(Engine, PipelinedScheduleOverlapsConversion) {
    const auto cfg = MacroConfig::ideal();
    const auto bca = LocalBca::load_weights(BitMatrix(2, 4, 1), cfg.mtj_params());
    const InputVector x{{1, 1}};
    MvmOptions seq;
    seq.pipelined = false;
    const auto a = run_mvm(bca, x, cfg, MirrorMode::CMF, 1, MvmOptions{});
    const auto b = run_mvm(bca, x, cfg, MirrorMode::CMF, 1, seq);
    EXPECT_NEAR(a.makespan_s, 4 * 4e-9 + 2e-9, 1e-18);
    EXPECT_NEAR(b.makespan_s, 4 * 6e-9, 1e-18);
    for (std::size_t i = 0; i < a.columns.size(); ++i) {
        EXPECT_EQ(a.columns[i].code, b.columns[i].code);
        EXPECT_GE(a.columns[i].timing.adc_start_s, a.columns[i].timing.sample_end_s);
    }
}

TEST(Engine, MacroSumsLocalArrays) {
    const auto cfg = MacroConfig::ideal();
    BitMatrix w(130, 2);
    InputVector x;
    for (int r = 0; r < 130; ++r) {
        x.activations.push_back(r % 20 == 0 ? 3 : 0);
        w.set(r, 0, true);
        w.set(r, 1, r % 40 == 0);
    }
    for (const auto& c : run_macro(w, x, cfg, MirrorMode::CMF, 4)) EXPECT_EQ(c.value, c.oracle);
    EXPECT_THROW((void)run_macro(BitMatrix(1025, 1), InputVector{std::vector<std::uint8_t>(1025, 0)}, cfg,
                                 MirrorMode::CMF, 1),
                 ConfigError);
}

TEST(Engine, MultibitRecombination) {
    const std::vector<PlaneCode> codes{{5, 0, 0}, {3, 0, 1}, {1, 1, 1}};
    EXPECT_EQ(recombine_multibit(codes).value, 5 + (3 << 2) + (1 << 3));
    const std::vector<PlaneCode> big{{1, 0, 12}};
    EXPECT_TRUE(recombine_multibit(big).overflow);
}

TEST(Engine, MultibitRunMatchesIntegerProduct) {
    const auto cfg = MacroConfig::ideal();
    BitMatrix w(4, 1);
    w.set(0, 0, true);
    w.set(2, 0, true);
    const std::vector<unsigned> x{13, 7, 9, 2};
    const auto out = run_mvm_multibit(LocalBca::load_weights(w, cfg.mtj_params()), x, 4, cfg, MirrorMode::CMF, 2);
    EXPECT_EQ(out.at(0).value, 13 + 9);
    EXPECT_THROW((void)split_input_planes(x, 3), std::invalid_argument);
}

TEST(Engine, EnergyNeedsCalibration) {
    const auto cfg = MacroConfig::ideal();
    const auto bca = LocalBca::load_weights(BitMatrix(2, 1, 1), cfg.mtj_params());
    const auto run = run_mvm(bca, InputVector{{1, 2}}, cfg, MirrorMode::CMF, 1);
    EXPECT_FALSE(run.columns[0].energy.has_value());
    EXPECT_THROW((void)energy_report(run, cfg), UncalibratedError);
    EXPECT_THROW((void)tops_per_watt(64, cfg), UncalibratedError);
}

TEST(Engine, EnergyBlocksAddUp) {
    const auto cfg = calibrated_ideal();
    const auto bca = LocalBca::load_weights(BitMatrix(4, 2, 1), cfg.mtj_params());
    const auto run = run_mvm(bca, InputVector{{1, 1, 1, 1}}, cfg, MirrorMode::CMF, 1);
    const auto l = energy_report(run, cfg);
    EXPECT_EQ(l.ops, 2 * mac_ops(4));
    EXPECT_NEAR(l.energy.adc_j, 2 * 60e-15, 1e-27);
    EXPECT_NEAR(l.energy.other_j, 2 * 50e-15, 1e-27);
    EXPECT_NEAR(l.energy.input_j, 2 * 4 * 1.5e-15, 1e-27);
    const auto f = l.fractions();
    EXPECT_NEAR(f.latch_j + f.cmf_j + f.adc_j + f.array_j + f.input_j + f.other_j, 1.0, 1e-12);
}

TEST(Engine, ZeroActivityHasNoDynamicEnergy) {
    const auto cfg = calibrated_ideal();
    const auto bca = LocalBca::load_weights(BitMatrix(4, 1, 1), cfg.mtj_params());
    const auto run = run_mvm(bca, InputVector{{0, 0, 0, 0}}, cfg, MirrorMode::CMF, 1);
    const auto l = energy_report(run, cfg);
    EXPECT_EQ(run.columns[0].code, 0u);
    EXPECT_EQ(l.dynamic_j, 0.0);
    EXPECT_GT(l.energy.latch_j, 0.0);
    EXPECT_GT(l.energy.total(), 0.0);
}

TEST(Engine, FullActivitySwing) {
    EXPECT_DOUBLE_EQ(full_activity_swing(1), 0.2);
    EXPECT_DOUBLE_EQ(full_activity_swing(5), 1.0);
    EXPECT_DOUBLE_EQ(full_activity_swing(64), 1.0);
}

TEST(Engine, EfficiencyGrowsWithRows) {
    const auto cfg = calibrated_ideal();
    double prev = 0.0;
    for (int m : {1, 4, 16, 64}) {
        const auto p = tops_per_watt(m, cfg);
        EXPECT_GT(p.tops_per_watt, prev);
        prev = p.tops_per_watt;
    }
}
