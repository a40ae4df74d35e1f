#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mramsim/device.hpp"
#include "mramsim/errors.hpp"
#include "mramsim/latch.hpp"

namespace mramsim {

inline constexpr int kMaxRowsPerBca = 64;
inline constexpr int kColumnsPerBca = 16;
inline constexpr int kLocalBcasPerMacro = 16;
inline constexpr int kChargeQuanta = 3;   // 2-bit activation -> up to 3 SW0 pulses
inline constexpr int kMaxActivation = 3;

/// Dense row-major 0/1 matrix.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(int rows, int cols, std::uint8_t fill = 0);

    [[nodiscard]] int rows() const noexcept { return rows_; }
    [[nodiscard]] int cols() const noexcept { return cols_; }
    [[nodiscard]] std::uint8_t operator()(int r, int c) const { return bits_[index(r, c)]; }
    void set(int r, int c, bool v) { bits_[index(r, c)] = v ? 1 : 0; }
    [[nodiscard]] std::vector<std::uint8_t> column(int c) const;

    [[nodiscard]] static BitMatrix identity(int n);

    bool operator==(const BitMatrix&) const = default;

private:
    [[nodiscard]] std::size_t index(int r, int c) const;

    int rows_ = 0;
    int cols_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// One local bit-cell array: weights and the MTJs storing them. Weight 1 is
/// stored as AP so that the latch resolves it to One.
class LocalBca {
public:
    /// Storage-mode write. Throws ConfigError when the matrix does not fit
    /// (1..64 rows, 1..16 columns).
    [[nodiscard]] static LocalBca load_weights(const BitMatrix& weights, const MtjParams& device);

    [[nodiscard]] int rows() const noexcept { return weights_.rows(); }
    [[nodiscard]] int cols() const noexcept { return weights_.cols(); }
    [[nodiscard]] const BitMatrix& weights() const noexcept { return weights_; }
    [[nodiscard]] const MtjDevice& device(int r, int c) const;

private:
    BitMatrix weights_;
    std::vector<MtjDevice> devices_;
};

[[nodiscard]] constexpr MtjState state_for_weight(bool w) noexcept { return w ? MtjState::AP : MtjState::P; }

/// 2-bit activations, one per row.
struct InputVector {
    std::vector<std::uint8_t> activations;

    void validate() const;
    [[nodiscard]] std::size_t size() const noexcept { return activations.size(); }
};

struct PulseTrain {
    int count = 0;
    double width_s = 0.0;
    [[nodiscard]] double total_high_s() const noexcept { return count * width_s; }
};

/// x pulses of width t_cp. Throws std::domain_error for x outside 0..3.
[[nodiscard]] PulseTrain encode_input(int x, double t_cp_s);

/// Rows conducting during each SW0 charge quantum.
struct ColumnCurrentTrace {
    std::array<int, kChargeQuanta> active_rows{};
    double i_a = 0.0;   // A per conducting row

    [[nodiscard]] int total_units() const noexcept { return active_rows[0] + active_rows[1] + active_rows[2]; }
    [[nodiscard]] double current(int quantum) const { return active_rows.at(static_cast<std::size_t>(quantum)) * i_a; }
};

/// Latches every row of column `col` against the reference column. Each row
/// samples its MTJ resistance and offset from derive_seed(seed, {row, ...}).
[[nodiscard]] std::vector<LatchOutcome> latch_column(const LocalBca& bca, int col, const LatchParams& p,
                                                    std::uint64_t seed);

/// Compute-line current per charge quantum. A Fail outcome conducts as One
/// with probability 1/2, decided by derive_seed(seed, {row}).
[[nodiscard]] ColumnCurrentTrace compute_line_current(std::span<const LatchOutcome> latched,
                                                      const InputVector& input, double i_a, std::uint64_t seed);

/// Unit row current through the N1/N2 pair when both are on.
[[nodiscard]] double unit_row_current(double v_cl, const SwitchParams& sw);

}  // namespace mramsim
