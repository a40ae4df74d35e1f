#include <gtest/gtest.h>

#include <stdexcept>

#include "mramsim/array.hpp"
#include "mramsim/errors.hpp"

using namespace mramsim;

namespace {

LatchParams clean_latch() {
    LatchParams p;
    p.sigma_offset = 0.0;
    p.gain_k = 1000.0;
    return p;
}

MtjParams clean_device() {
    MtjParams d;
    d.sigma_r = 0.0;
    return d;
}

}  // namespace

TEST(Array, BitMatrixBasics) {
    BitMatrix m(3, 2);
    m.set(1, 0, true);
    m.set(2, 1, true);
    EXPECT_EQ(m(1, 0), 1);
    EXPECT_EQ(m(0, 0), 0);
    EXPECT_EQ(m.column(1), (std::vector<std::uint8_t>{0, 0, 1}));
    const auto id = BitMatrix::identity(4);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) EXPECT_EQ(id(r, c), r == c ? 1 : 0);
    EXPECT_THROW((void)m(3, 0), std::out_of_range);
}

TEST(Array, WeightOneStoredAsAntiParallel) {
    EXPECT_EQ(state_for_weight(true), MtjState::AP);
    EXPECT_EQ(state_for_weight(false), MtjState::P);
    const auto bca = LocalBca::load_weights(BitMatrix::identity(2), clean_device());
    EXPECT_EQ(bca.device(0, 0).state, MtjState::AP);
    EXPECT_EQ(bca.device(0, 1).state, MtjState::P);
}

TEST(Array, LoadWeightsChecksDimensions) {
    EXPECT_THROW((void)LocalBca::load_weights(BitMatrix(65, 1), clean_device()), ConfigError);
    EXPECT_THROW((void)LocalBca::load_weights(BitMatrix(4, 17), clean_device()), ConfigError);
    EXPECT_THROW((void)LocalBca::load_weights(BitMatrix(0, 0), clean_device()), ConfigError);
    EXPECT_NO_THROW((void)LocalBca::load_weights(BitMatrix(64, 16), clean_device()));
}

TEST(Array, EncodeInputPulseCount) {
    for (int x = 0; x <= 3; ++x) {
        const auto p = encode_input(x, 800e-12);
        EXPECT_EQ(p.count, x);
        EXPECT_DOUBLE_EQ(p.total_high_s(), x * 800e-12);
    }
    EXPECT_THROW((void)encode_input(4, 800e-12), std::domain_error);
    EXPECT_THROW((void)encode_input(-1, 800e-12), std::domain_error);
}

TEST(Array, UnitRowCurrent) {
    EXPECT_DOUBLE_EQ(unit_row_current(0.1, SwitchParams{}), 50e-6);
}

TEST(Array, LatchedColumnMatchesWeights) {
    BitMatrix w(4, 1);
    w.set(0, 0, true);
    w.set(2, 0, true);
    const auto bca = LocalBca::load_weights(w, clean_device());
    const auto out = latch_column(bca, 0, clean_latch(), 3);
    ASSERT_EQ(out.size(), 4u);
    EXPECT_EQ(out[0].bit, LatchBit::One);
    EXPECT_EQ(out[1].bit, LatchBit::Zero);
    EXPECT_EQ(out[2].bit, LatchBit::One);
    EXPECT_EQ(out[3].bit, LatchBit::Zero);
}

TEST(Array, ThermometerCountsPerQuantum) {
    std::vector<LatchOutcome> lat(4);
    for (auto& l : lat) l.bit = LatchBit::One;
    lat[3].bit = LatchBit::Zero;
    InputVector x{{3, 1, 2, 3}};
    const auto tr = compute_line_current(lat, x, 50e-6, 0);
    // Rows 0..2 conduct; quantum q counts rows with x > q.
    EXPECT_EQ(tr.active_rows[0], 3);
    EXPECT_EQ(tr.active_rows[1], 2);
    EXPECT_EQ(tr.active_rows[2], 1);
    EXPECT_EQ(tr.total_units(), 6);
    EXPECT_DOUBLE_EQ(tr.current(0), 150e-6);
}

TEST(Array, FailedLatchIsSeededCoin) {
    std::vector<LatchOutcome> lat(64);
    for (auto& l : lat) l.bit = LatchBit::Fail;
    InputVector x;
    x.activations.assign(64, 1);
    const auto a = compute_line_current(lat, x, 1.0, 11);
    const auto b = compute_line_current(lat, x, 1.0, 11);
    EXPECT_EQ(a.active_rows, b.active_rows);
    EXPECT_GT(a.active_rows[0], 10);
    EXPECT_LT(a.active_rows[0], 54);
}

TEST(Array, LengthMismatchAndBadInput) {
    std::vector<LatchOutcome> lat(2);
    EXPECT_THROW((void)compute_line_current(lat, InputVector{{1}}, 1.0, 0), std::invalid_argument);
    EXPECT_THROW((void)compute_line_current(lat, InputVector{{1, 4}}, 1.0, 0), std::domain_error);
}
