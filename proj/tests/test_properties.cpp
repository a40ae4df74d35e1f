#include <gtest/gtest.h>

#include <random>

#include "mramsim/adc.hpp"
#include "mramsim/engine.hpp"
#include "mramsim/integrator.hpp"

using namespace mramsim;

namespace {

struct Case {
    BitMatrix w;
    InputVector x;
};

/// Random column whose dot product stays within the 4-bit range.
Case random_case(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> rows_d(1, 64), bit(0, 1), act(0, 3);
    const int m = rows_d(rng);
    Case c{BitMatrix(m, 1), {}};
    long acc = 0;
    for (int r = 0; r < m; ++r) {
        int w = bit(rng), x = act(rng);
        if (acc + w * x > 15) w = 0;
        acc += w * x;
        c.w.set(r, 0, w != 0);
        c.x.activations.push_back(static_cast<std::uint8_t>(x));
    }
    return c;
}

}  // namespace

TEST(Properties, IdealCodeEqualsOracle) {
    const auto cfg = MacroConfig::ideal();
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 300; ++i) {
        const auto c = random_case(rng);
        const auto run = run_mvm(LocalBca::load_weights(c.w, cfg.mtj_params()), c.x, cfg, MirrorMode::CMF, i);
        ASSERT_EQ(static_cast<long>(run.columns[0].code), run.columns[0].oracle) << "case " << i;
    }
}

TEST(Properties, CodeMonotoneInInput) {
    auto cfg = MacroConfig::defaults();
    cfg.integrator.droop_lambda_per_v = 0.8;
    cfg.device.sigma_r = 0.0;
    cfg.latch.sigma_offset = 0.0;
    cfg.latch.gain_k = 500.0;
    const auto bca = LocalBca::load_weights(BitMatrix(5, 1, 1), cfg.mtj_params());
    for (auto mode : {MirrorMode::TCM, MirrorMode::CMF}) {
        unsigned prev = 0;
        for (int n = 0; n <= 15; ++n) {
            InputVector x;
            int left = n;
            for (int r = 0; r < 5; ++r) {
                const int a = std::min(left, 3);
                x.activations.push_back(static_cast<std::uint8_t>(a));
                left -= a;
            }
            const unsigned code = run_mvm(bca, x, cfg, mode, 1).columns[0].code;
            EXPECT_GE(code, prev);
            prev = code;
        }
    }
}

TEST(Properties, AdcCodeMonotoneAndBounded) {
    SarAdcParams p;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> v(0.0, 1.2 * p.v_ref);
    for (int i = 0; i < 2000; ++i) {
        const double a = v(rng), b = v(rng);
        const auto ca = convert(std::min(a, b), p).code;
        const auto cb = convert(std::max(a, b), p).code;
        EXPECT_LE(ca, cb);
        EXPECT_LE(cb, p.max_code());
    }
}

TEST(Properties, IntegratorOrderIndependence) {
    MirrorParams p;
    p.droop_lambda = 0.9;
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> d(0, 5);
    for (int i = 0; i < 100; ++i) {
        ColumnCurrentTrace t;
        t.i_a = 50e-6;
        t.active_rows = {d(rng), d(rng), d(rng)};
        ColumnCurrentTrace u = t;
        std::swap(u.active_rows[0], u.active_rows[2]);
        for (auto mode : {MirrorMode::TCM, MirrorMode::CMF}) {
            EXPECT_NEAR(integrate(t, p, mode).v_final, integrate(u, p, mode).v_final, 1e-9);
        }
    }
}

TEST(Properties, AverageDelayDecreasing) {
    const auto t = pipeline_timing(MacroConfig::defaults());
    double prev = average_delay(t, 1);
    for (long n = 2; n < 5000; n = n * 3 / 2 + 1) {
        const double d = average_delay(t, n);
        EXPECT_LT(d, prev);
        EXPECT_GT(d, t.t_cen_s);
        prev = d;
    }
}
