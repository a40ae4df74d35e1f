#include "mramsim/array.hpp"

#include <string>

#include "mramsim/rng.hpp"

namespace mramsim {

BitMatrix::BitMatrix(int rows, int cols, std::uint8_t fill) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("BitMatrix: negative dimension");
    bits_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill ? 1 : 0);
}

std::size_t BitMatrix::index(int r, int c) const {
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_) throw std::out_of_range("BitMatrix: index out of range");
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(c);
}

std::vector<std::uint8_t> BitMatrix::column(int c) const {
    std::vector<std::uint8_t> out(static_cast<std::size_t>(rows_));
    for (int r = 0; r < rows_; ++r) out[static_cast<std::size_t>(r)] = (*this)(r, c);
    return out;
}

BitMatrix BitMatrix::identity(int n) {
    BitMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.set(i, i, true);
    return m;
}

LocalBca LocalBca::load_weights(const BitMatrix& weights, const MtjParams& device) {
    if (weights.rows() < 1 || weights.rows() > kMaxRowsPerBca) {
        throw ConfigError("local BCA holds 1.." + std::to_string(kMaxRowsPerBca) + " rows, got " +
                          std::to_string(weights.rows()));
    }
    if (weights.cols() < 1 || weights.cols() > kColumnsPerBca) {
        throw ConfigError("local BCA holds 1.." + std::to_string(kColumnsPerBca) + " columns, got " +
                          std::to_string(weights.cols()));
    }
    device.validate();
    LocalBca bca;
    bca.weights_ = weights;
    bca.devices_.reserve(static_cast<std::size_t>(weights.rows() * weights.cols()));
    for (int r = 0; r < weights.rows(); ++r) {
        for (int c = 0; c < weights.cols(); ++c) {
            bca.devices_.push_back(MtjDevice::nominal(device, state_for_weight(weights(r, c) != 0)));
        }
    }
    return bca;
}

const MtjDevice& LocalBca::device(int r, int c) const {
    if (r < 0 || r >= rows() || c < 0 || c >= cols()) throw std::out_of_range("LocalBca: index out of range");
    return devices_[static_cast<std::size_t>(r * cols() + c)];
}

void InputVector::validate() const {
    for (std::size_t i = 0; i < activations.size(); ++i) {
        if (activations[i] > kMaxActivation) {
            throw std::domain_error("input " + std::to_string(i) + " = " + std::to_string(activations[i]) +
                                    " is not a 2-bit value");
        }
    }
}

PulseTrain encode_input(int x, double t_cp_s) {
    if (x < 0 || x > kMaxActivation) throw std::domain_error("encode_input: activation must be 0..3");
    if (!(t_cp_s > 0.0)) throw std::domain_error("encode_input: t_cp must be > 0");
    return PulseTrain{x, t_cp_s};
}

std::vector<LatchOutcome> latch_column(const LocalBca& bca, int col, const LatchParams& p, std::uint64_t seed) {
    if (col < 0 || col >= bca.cols()) throw std::out_of_range("latch_column: column out of range");
    p.validate();
    std::vector<LatchOutcome> out;
    out.reserve(static_cast<std::size_t>(bca.rows()));
    for (int r = 0; r < bca.rows(); ++r) {
        const auto ur = static_cast<std::uint64_t>(r);
        const MtjDevice& dev = bca.device(r, col);
        const double res = sample_resistance(dev, derive_seed(seed, {ur, salt(Stream::Resistance)}));
        out.push_back(resolve(res, p, dev.params.tmr0, derive_seed(seed, {ur, salt(Stream::LatchOffset)})));
    }
    return out;
}

ColumnCurrentTrace compute_line_current(std::span<const LatchOutcome> latched, const InputVector& input,
                                        double i_a, std::uint64_t seed) {
    if (latched.size() != input.size()) throw std::invalid_argument("compute_line_current: length mismatch");
    input.validate();
    ColumnCurrentTrace trace;
    trace.i_a = i_a;
    for (std::size_t i = 0; i < latched.size(); ++i) {
        bool on = latched[i].bit == LatchBit::One;
        if (latched[i].bit == LatchBit::Fail) {
            on = uniform01(derive_seed(seed, {static_cast<std::uint64_t>(i), salt(Stream::FailCoin)})) < 0.5;
        }
        if (!on) continue;
        for (int q = 0; q < input.activations[i]; ++q) ++trace.active_rows[static_cast<std::size_t>(q)];
    }
    return trace;
}

double unit_row_current(double v_cl, const SwitchParams& sw) {
    sw.validate();
    return v_cl / (2.0 * sw.r_on_ohm);
}

}  // namespace mramsim
