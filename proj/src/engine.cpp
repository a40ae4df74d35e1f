#include "mramsim/engine.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "mramsim/errors.hpp"
#include "mramsim/rng.hpp"

namespace mramsim {

PipelineTiming pipeline_timing(const MacroConfig& cfg) {
    PipelineTiming t;
    t.t_cen_s = (cfg.engine.t_latch_ps + kChargeQuanta * cfg.integrator.t_h_ps) / 1e12;
    t.t_adc_s = cfg.engine.t_adc_ps / 1e12;
    return t;
}

double column_delay(const PipelineTiming& t) {
    if (!(t.t_cen_s > 0.0) || !(t.t_adc_s > 0.0)) throw std::domain_error("PipelineTiming: durations must be > 0");
    return t.t_cen_s + t.t_adc_s;
}

double average_delay(const PipelineTiming& t, long n_cols) {
    if (n_cols < 1) throw std::domain_error("average_delay: n_cols must be >= 1");
    if (!(t.t_cen_s > 0.0) || !(t.t_adc_s > 0.0)) throw std::domain_error("PipelineTiming: durations must be > 0");
    return t.t_cen_s + t.t_adc_s / static_cast<double>(n_cols);
}

EnergyBreakdown& EnergyBreakdown::operator+=(const EnergyBreakdown& o) noexcept {
    latch_j += o.latch_j;
    cmf_j += o.cmf_j;
    adc_j += o.adc_j;
    array_j += o.array_j;
    input_j += o.input_j;
    other_j += o.other_j;
    return *this;
}

EnergyBreakdown EnergyLedger::fractions() const noexcept {
    const double total = energy.total();
    if (total <= 0.0) return {};
    return EnergyBreakdown{energy.latch_j / total, energy.cmf_j / total,   energy.adc_j / total,
                           energy.array_j / total, energy.input_j / total, energy.other_j / total};
}

double EnergyLedger::tops_per_watt() const noexcept {
    const double total = energy.total();
    return total > 0.0 ? static_cast<double>(ops) / total / 1e12 : 0.0;
}

EnergyLedger& EnergyLedger::operator+=(const EnergyLedger& o) noexcept {
    energy += o.energy;
    dynamic_j += o.dynamic_j;
    ops += o.ops;
    return *this;
}

long mac_oracle(std::span<const std::uint8_t> weights, std::span<const std::uint8_t> x) {
    if (weights.size() != x.size()) throw std::invalid_argument("mac_oracle: length mismatch");
    long sum = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) sum += static_cast<long>(weights[i]) * x[i];
    return sum;
}

namespace {

double other_energy_j(const MacroConfig& cfg) {
    if (!cfg.engine.other_fj) {
        throw UncalibratedError("energy constants are uncalibrated (engine.other_fj missing); run 'calibrate'");
    }
    return *cfg.engine.other_fj / 1e15;
}

/// Energy of one column with `rows` latched rows.
EnergyLedger column_energy(int rows, double latch_energy_j, double v_final, int input_pulses,
                           const MacroConfig& cfg) {
    const auto& e = cfg.engine;
    const double swing = v_final / (cfg.integrator.v_max_mv / 1e3);
    EnergyLedger l;
    const double cmf_dynamic = e.cmf_full_scale_fj / 1e15 * swing;
    const double input = e.input_per_pulse_fj / 1e15 * input_pulses;
    l.energy.latch_j = latch_energy_j;
    l.energy.cmf_j = e.cmf_bias_fj / 1e15 + cmf_dynamic;
    l.energy.adc_j = e.adc_fj / 1e15;
    l.energy.array_j = e.array_per_row_fj / 1e15 * rows;
    l.energy.input_j = input;
    l.energy.other_j = other_energy_j(cfg);
    l.dynamic_j = cmf_dynamic + input;
    l.ops = mac_ops(rows);
    return l;
}

}  // namespace

MvmRun run_mvm(const LocalBca& bca, const InputVector& inputs, const MacroConfig& cfg, MirrorMode mode,
               std::uint64_t seed, const MvmOptions& opts) {
    if (inputs.size() != static_cast<std::size_t>(bca.rows())) {
        throw std::invalid_argument("run_mvm: " + std::to_string(inputs.size()) + " inputs for " +
                                    std::to_string(bca.rows()) + " rows");
    }
    inputs.validate();
    const LatchParams latch = cfg.latch_params();
    const SarAdcParams adc = cfg.adc_params();
    const double i_a = cfg.i_a();
    const PipelineTiming timing = pipeline_timing(cfg);
    const bool calibrated = cfg.engine.other_fj.has_value();

    int pulses = 0;
    for (auto x : inputs.activations) pulses += x;

    MvmRun run;
    run.rows = bca.rows();
    run.mode = mode;
    run.pipelined = opts.pipelined;
    run.columns.reserve(static_cast<std::size_t>(bca.cols()));

    Integrator integrator(cfg.mirror_params());
    double adc_free_at = 0.0;
    for (int col = 0; col < bca.cols(); ++col) {
        const auto ucol = static_cast<std::uint64_t>(col);
        MacResult r;
        r.column = col;

        const auto latched = latch_column(bca, col, latch, derive_seed(seed, {ucol, salt(Stream::LatchOffset)}));
        const auto current =
            compute_line_current(latched, inputs, i_a, derive_seed(seed, {ucol, salt(Stream::FailCoin)}));
        integrator.reset();
        auto trace = integrator.integrate(current, mode);
        const auto conv = sample_and_convert_pipelined([&] { return integrator.v_out(); }, adc,
                                                       derive_seed(seed, {ucol, salt(Stream::Comparator)}));

        r.v_final = trace.v_final;
        r.code = conv.code;
        r.oracle = mac_oracle(bca.weights().column(col), inputs.activations);
        r.integrator_saturated = trace.saturated;
        r.adc_saturated = conv.saturated;
        r.input_pulses = pulses;
        for (const auto& o : latched) {
            r.latch_energy_j += o.energy_j;
            if (o.bit == LatchBit::Fail) ++r.latch_failures;
        }

        if (opts.pipelined) {
            r.timing.latch_start_s = col * timing.t_cen_s;
        } else {
            r.timing.latch_start_s = col * (timing.t_cen_s + timing.t_adc_s);
        }
        r.timing.sample_end_s = r.timing.latch_start_s + timing.t_cen_s;
        r.timing.adc_start_s = std::max(r.timing.sample_end_s, adc_free_at);
        r.timing.adc_end_s = r.timing.adc_start_s + timing.t_adc_s;
        adc_free_at = r.timing.adc_end_s;

        if (calibrated) r.energy = column_energy(bca.rows(), r.latch_energy_j, r.v_final, pulses, cfg);
        if (opts.keep_traces) r.trace = std::move(trace);
        run.columns.push_back(std::move(r));
    }
    run.makespan_s = adc_free_at;
    return run;
}

MvmRun run_mvm(const LocalBca& bca, const InputVector& inputs, const MacroConfig& cfg, MirrorMode mode,
               std::uint64_t seed) {
    MvmOptions opts;
    opts.pipelined = cfg.engine.pipelined;
    return run_mvm(bca, inputs, cfg, mode, seed, opts);
}

std::vector<MacroColumn> run_macro(const BitMatrix& weights, const InputVector& inputs, const MacroConfig& cfg,
                                   MirrorMode mode, std::uint64_t seed) {
    constexpr int kMaxRows = kMaxRowsPerBca * kLocalBcasPerMacro;
    if (weights.rows() < 1 || weights.rows() > kMaxRows) {
        throw ConfigError("macro holds 1.." + std::to_string(kMaxRows) + " rows, got " +
                          std::to_string(weights.rows()));
    }
    if (inputs.size() != static_cast<std::size_t>(weights.rows())) {
        throw std::invalid_argument("run_macro: input length does not match rows");
    }
    std::vector<MacroColumn> out(static_cast<std::size_t>(weights.cols()));
    const MtjParams mtj = cfg.mtj_params();
    for (int first = 0, bca_index = 0; first < weights.rows(); first += kMaxRowsPerBca, ++bca_index) {
        const int rows = std::min(kMaxRowsPerBca, weights.rows() - first);
        BitMatrix part(rows, weights.cols());
        InputVector x;
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < weights.cols(); ++c) part.set(r, c, weights(first + r, c) != 0);
            x.activations.push_back(inputs.activations[static_cast<std::size_t>(first + r)]);
        }
        const auto run = run_mvm(LocalBca::load_weights(part, mtj), x, cfg, mode,
                                 derive_seed(seed, {static_cast<std::uint64_t>(bca_index)}));
        for (const auto& col : run.columns) {
            out[static_cast<std::size_t>(col.column)].value += col.code;
            out[static_cast<std::size_t>(col.column)].oracle += col.oracle;
        }
    }
    return out;
}

Recombined recombine_multibit(std::span<const PlaneCode> codes, int input_plane_bits, int output_bits) {
    if (input_plane_bits < 1 || output_bits < 1 || output_bits > 62) {
        throw std::invalid_argument("recombine_multibit: bad bit widths");
    }
    Recombined r;
    for (const auto& c : codes) {
        const int shift = c.weight_bit + input_plane_bits * c.input_plane;
        if (c.value < 0 || c.weight_bit < 0 || c.input_plane < 0 || shift > 62) {
            throw std::invalid_argument("recombine_multibit: negative value or shift");
        }
        r.value += c.value << shift;
    }
    r.overflow = r.value >= (1L << output_bits);
    return r;
}

std::vector<InputVector> split_input_planes(std::span<const unsigned> x, int input_bits) {
    if (input_bits < 2 || input_bits % 2 != 0 || input_bits > 16) {
        throw std::invalid_argument("split_input_planes: input_bits must be an even number in 2..16");
    }
    const int planes = input_bits / 2;
    std::vector<InputVector> out(static_cast<std::size_t>(planes));
    for (unsigned v : x) {
        if (v >= (1U << input_bits)) throw std::domain_error("split_input_planes: value exceeds input width");
        for (int p = 0; p < planes; ++p) {
            out[static_cast<std::size_t>(p)].activations.push_back(static_cast<std::uint8_t>((v >> (2 * p)) & 3U));
        }
    }
    return out;
}

std::vector<Recombined> run_mvm_multibit(const LocalBca& bca, std::span<const unsigned> x, int input_bits,
                                         const MacroConfig& cfg, MirrorMode mode, std::uint64_t seed) {
    const auto planes = split_input_planes(x, input_bits);
    std::vector<std::vector<PlaneCode>> per_column(static_cast<std::size_t>(bca.cols()));
    for (std::size_t p = 0; p < planes.size(); ++p) {
        const auto run = run_mvm(bca, planes[p], cfg, mode, derive_seed(seed, {p}));
        for (const auto& col : run.columns) {
            per_column[static_cast<std::size_t>(col.column)].push_back({col.code, 0, static_cast<int>(p)});
        }
    }
    std::vector<Recombined> out;
    out.reserve(per_column.size());
    for (const auto& codes : per_column) out.push_back(recombine_multibit(codes));
    return out;
}

EnergyLedger energy_report(const MvmRun& run, const MacroConfig& cfg) {
    EnergyLedger total;
    for (const auto& col : run.columns) {
        total += col.energy ? *col.energy
                            : column_energy(run.rows, col.latch_energy_j, col.v_final, col.input_pulses, cfg);
    }
    return total;
}

double full_activity_swing(int rows_on) noexcept {
    const double units = static_cast<double>(kMaxActivation) * rows_on;
    return units / std::max(15.0, units);
}

EfficiencyPoint tops_per_watt(int rows_on, const MacroConfig& cfg) {
    if (rows_on < 1) throw std::domain_error("tops_per_watt: rows_on must be >= 1");
    const auto& e = cfg.engine;
    if (!e.baseline_energy_per_row_fj || !e.baseline_delay_per_row_ps) {
        throw UncalibratedError("digital baseline constants are uncalibrated; run 'calibrate'");
    }
    const LatchParams latch = cfg.latch_params();
    const double latch_j = energy_model(latch, cfg.device.tmr0).energy_j * rows_on;
    const double v_final = full_activity_swing(rows_on) * cfg.integrator.v_max_mv / 1e3;

    EfficiencyPoint p;
    p.rows_on = rows_on;
    p.ledger = column_energy(rows_on, latch_j, v_final, kMaxActivation * rows_on, cfg);
    p.tops_per_watt = p.ledger.tops_per_watt();
    p.baseline_tops_per_watt =
        static_cast<double>(mac_ops(rows_on)) / (*e.baseline_energy_per_row_fj / 1e15 * rows_on) / 1e12;
    p.efficiency_ratio = p.tops_per_watt / p.baseline_tops_per_watt;
    p.delay_s = average_delay(pipeline_timing(cfg), e.pipeline_columns);
    p.baseline_delay_s = (e.baseline_delay_fixed_ps + *e.baseline_delay_per_row_ps * rows_on) / 1e12;
    p.delay_ratio = p.delay_s / p.baseline_delay_s;
    return p;
}

}  // namespace mramsim
