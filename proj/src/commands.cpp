#include "mramsim/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "mramsim/errors.hpp"
#include "mramsim/rng.hpp"

namespace mramsim {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

const char* mode_name(MirrorMode m) { return m == MirrorMode::TCM ? "tcm" : "cmf"; }

Json provenance(const RunContext& ctx) {
    Json p;
    p["seed"] = ctx.config.seed;
    p["calibration_source"] = ctx.calibration_source;
    p["calibration_residuals"] = ctx.calibration_residuals;
    p["version"] = kVersion;
    return p;
}

CommandOutput wrap(const RunContext& ctx, const char* command, Json result) {
    CommandOutput out;
    out.report["command"] = command;
    out.report["config"] = to_json(ctx.config);
    out.report["result"] = std::move(result);
    out.report["provenance"] = provenance(ctx);
    return out;
}

/// Fixed-precision CSV number; identical text for identical doubles.
std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

Json ledger_json(const EnergyLedger& l) {
    const auto& e = l.energy;
    const auto f = l.fractions();
    return {
        {"total_fj", e.total() * 1e15},
        {"dynamic_fj", l.dynamic_j * 1e15},
        {"ops", l.ops},
        {"tops_per_watt", l.tops_per_watt()},
        {"blocks_fj",
         {{"latch", e.latch_j * 1e15},
          {"cmf", e.cmf_j * 1e15},
          {"adc", e.adc_j * 1e15},
          {"array", e.array_j * 1e15},
          {"input", e.input_j * 1e15},
          {"other", e.other_j * 1e15}}},
        {"fractions",
         {{"latch", f.latch_j},
          {"cmf", f.cmf_j},
          {"adc", f.adc_j},
          {"array", f.array_j},
          {"input", f.input_j},
          {"other", f.other_j}}},
    };
}

std::vector<double> or_default(const std::vector<double>& v, std::vector<double> fallback) {
    return v.empty() ? fallback : v;
}

}  // namespace

std::string CommandOutput::report_text() const { return report.dump(2) + "\n"; }

RunContext make_context(const ContextOptions& opts) {
    MacroConfig cfg = opts.config_path.empty() ? MacroConfig::defaults() : config_from_json(read_json_file(opts.config_path));
    std::string base_dir;
    if (!opts.calibration_path.empty()) {
        cfg.calibration_file = opts.calibration_path;
    } else if (!opts.config_path.empty()) {
        base_dir = std::filesystem::path(opts.config_path).parent_path().string();
    }
    LoadedConfig loaded = resolve_config(std::move(cfg), base_dir);

    RunContext ctx;
    ctx.config = std::move(loaded.config);
    ctx.calibration_source = std::move(loaded.calibration_source);
    ctx.calibration_residuals = std::move(loaded.calibration_residuals);

    if (opts.seed_env) {
        const std::string s = trim(*opts.seed_env);
        std::uint64_t seed = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
        if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
            throw ConfigError("MRAMSIM_SEED: expected an unsigned integer, got '" + *opts.seed_env + "'");
        }
        ctx.config.seed = seed;
    }
    ctx.threads = opts.threads.value_or(ctx.config.analysis.threads);
    if (ctx.threads < 1) throw ConfigError("threads: must be >= 1");
    ctx.config.validate();
    return ctx;
}

// ---------------------------------------------------------------------------
// Input files

BitMatrix parse_weights(const std::string& text) {
    std::vector<std::vector<std::uint8_t>> rows;
    int line_no = 0;
    for (const auto& raw : lines_of(text)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        std::vector<std::uint8_t> row;
        int col = 0;
        for (char ch : line) {
            if (ch == ',' || ch == ' ' || ch == '\t') continue;
            ++col;
            if (ch != '0' && ch != '1') {
                throw ConfigError("weights: row " + std::to_string(rows.size() + 1) + ", col " + std::to_string(col) +
                                  " (line " + std::to_string(line_no) + "): expected 0 or 1, got '" +
                                  std::string(1, ch) + "'");
            }
            row.push_back(static_cast<std::uint8_t>(ch - '0'));
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw ConfigError("weights: row " + std::to_string(rows.size() + 1) + " (line " + std::to_string(line_no) +
                              ") has " + std::to_string(row.size()) + " columns, expected " +
                              std::to_string(rows.front().size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ConfigError("weights: no rows");
    BitMatrix w(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) w.set(static_cast<int>(r), static_cast<int>(c), rows[r][c]);
    return w;
}

InputVector parse_inputs(const std::string& text) {
    InputVector x;
    int line_no = 0;
    for (const auto& raw : lines_of(text)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        int v = -1;
        const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
        if (ec != std::errc() || ptr != line.data() + line.size() || v < 0 || v > kMaxActivation) {
            throw ConfigError("inputs: line " + std::to_string(line_no) + ": expected an integer 0..3, got '" + line +
                              "'");
        }
        x.activations.push_back(static_cast<std::uint8_t>(v));
    }
    if (x.activations.empty()) throw ConfigError("inputs: no values");
    return x;
}

MirrorMode parse_mode(const std::string& s) {
    if (s == "tcm") return MirrorMode::TCM;
    if (s == "cmf") return MirrorMode::CMF;
    throw ConfigError("mode: expected tcm or cmf, got '" + s + "'");
}

InlMode parse_inl_mode(const std::string& s) {
    if (s == "tcm") return InlMode::TCM;
    if (s == "cmf") return InlMode::CMF;
    if (s == "both") return InlMode::Both;
    throw ConfigError("mode: expected tcm, cmf or both, got '" + s + "'");
}

// ---------------------------------------------------------------------------
// mvm

CommandOutput cmd_mvm(const RunContext& ctx, const MvmArgs& args) {
    const BitMatrix w = parse_weights(args.weights_text);
    const InputVector x = parse_inputs(args.inputs_text);
    if (x.size() != static_cast<std::size_t>(w.rows())) {
        throw ConfigError("inputs: " + std::to_string(x.size()) + " values for " + std::to_string(w.rows()) +
                          " weight rows");
    }
    const MacroConfig& cfg = ctx.config;
    Json result;
    result["rows"] = w.rows();
    result["cols"] = w.cols();
    result["mode"] = mode_name(args.mode);

    if (w.rows() > kMaxRowsPerBca) {
        // Whole macro: per-BCA codes added digitally.
        const auto cols = run_macro(w, x, cfg, args.mode, cfg.seed);
        Json jc = Json::array();
        for (std::size_t c = 0; c < cols.size(); ++c) {
            jc.push_back({{"column", c}, {"value", cols[c].value}, {"oracle", cols[c].oracle}});
        }
        result["local_bcas"] = (w.rows() + kMaxRowsPerBca - 1) / kMaxRowsPerBca;
        result["columns"] = jc;
        return wrap(ctx, "mvm", std::move(result));
    }

    const auto bca = LocalBca::load_weights(w, cfg.mtj_params());
    MvmOptions opts;
    opts.pipelined = !args.sequential;
    opts.keep_traces = args.trace;
    const MvmRun run = run_mvm(bca, x, cfg, args.mode, cfg.seed, opts);

    result["pipelined"] = run.pipelined;
    result["makespan_ps"] = run.makespan_s * 1e12;
    Json jc = Json::array();
    for (const auto& c : run.columns) {
        Json r;
        r["column"] = c.column;
        r["code"] = c.code;
        r["oracle"] = c.oracle;
        r["v_final_mv"] = c.v_final * 1e3;
        r["integrator_saturated"] = c.integrator_saturated;
        r["adc_saturated"] = c.adc_saturated;
        r["latch_failures"] = c.latch_failures;
        r["input_pulses"] = c.input_pulses;
        r["timing_ps"] = {{"latch_start", c.timing.latch_start_s * 1e12},
                          {"sample_end", c.timing.sample_end_s * 1e12},
                          {"adc_start", c.timing.adc_start_s * 1e12},
                          {"adc_end", c.timing.adc_end_s * 1e12}};
        if (c.energy) r["energy"] = ledger_json(*c.energy);
        jc.push_back(std::move(r));
    }
    result["columns"] = jc;
    if (cfg.engine.other_fj) {
        Json e = ledger_json(energy_report(run, cfg));
        e["label"] = "calibration-anchored";
        result["energy"] = e;
    }

    CommandOutput out = wrap(ctx, "mvm", std::move(result));
    if (args.trace) {
        std::string csv = "column,time_ps,v_out_mv,i_out_ua\n";
        for (const auto& c : run.columns) {
            if (!c.trace) continue;
            for (const auto& s : c.trace->samples) {
                csv += std::to_string(c.column) + "," + num(s.t_s * 1e12) + "," + num(s.v_out * 1e3) + "," +
                       num(s.i_out * 1e6) + "\n";
            }
        }
        out.files["trace.csv"] = std::move(csv);
        out.report["result"]["trace_file"] = "trace.csv";
    }
    return out;
}

// ---------------------------------------------------------------------------
// sweep

CommandOutput cmd_sweep(const RunContext& ctx, const SweepArgs& args) {
    const MacroConfig& cfg = ctx.config;
    SweepGrid grid;
    grid.r_ref_ohm = or_default(args.grid.r_ref_ohm, {7000, 7700, 8500, 9000, 9500, 10000, 11000});
    grid.v_l_mv = or_default(args.grid.v_l_mv, {500, 600, 700});
    grid.tmr = or_default(args.grid.tmr, {0.5, 1.0, 1.5, 2.0, 2.5});
    grid.trials = args.trials.value_or(cfg.analysis.trials);
    grid.validate();

    const auto sweep = yield_sweep(grid, cfg, derive_seed(cfg.seed, {1}), ctx.threads);
    std::string fig7 = "r_ref_ohm,v_l_mv,tmr,yield_one_pct,yield_zero_pct,yield_avg_pct,power_fj,power_extrapolated\n";
    for (const auto& r : sweep) {
        fig7 += num(r.r_ref_ohm) + "," + num(r.v_l_mv) + "," + num(r.tmr) + "," + num(100 * r.yield.yield_one) + "," +
                num(100 * r.yield.yield_zero) + "," + num(100 * r.yield.yield_avg) + "," + num(r.power_fj) + "," +
                (r.power_extrapolated ? "1" : "0") + "\n";
    }

    const auto ref = published_latch_points();
    const auto table = latch_table(ref, cfg, grid.trials, derive_seed(cfg.seed, {2}), ctx.threads);
    std::string t4 = "tmr,r_ref_ohm,v_l_mv,yield_avg_pct,target_yield_pct,yield_delta_pts,power_fj,target_power_fj,"
                     "power_rel_error\n";
    Json jt = Json::array();
    bool monotone = true;
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto& r = table[i];
        const double y = 100 * r.yield.yield_avg;
        if (i > 0 && y < 100 * table[i - 1].yield.yield_avg) monotone = false;
        t4 += num(r.tmr) + "," + num(r.r_ref_ohm) + "," + num(r.v_l_mv) + "," + num(y) + "," + num(ref[i].yield_pct) +
              "," + num(y - ref[i].yield_pct) + "," + num(r.power_fj) + "," + num(ref[i].power_fj) + "," +
              num(r.power_fj / ref[i].power_fj - 1.0) + "\n";
        jt.push_back({{"tmr", r.tmr},
                      {"yield_avg_pct", y},
                      {"target_yield_pct", ref[i].yield_pct},
                      {"power_fj", r.power_fj},
                      {"target_power_fj", ref[i].power_fj}});
    }

    Json result;
    result["trials"] = grid.trials;
    result["grid_points"] = grid.size();
    result["table"] = jt;
    result["yield_monotone_in_tmr"] = monotone;
    result["label"] = ctx.calibration_source.empty() ? "uncalibrated" : "calibration-anchored";
    result["files"] = {"fig7_yield.csv", "table4_repro.csv"};
    CommandOutput out = wrap(ctx, "sweep", std::move(result));
    out.files["fig7_yield.csv"] = std::move(fig7);
    out.files["table4_repro.csv"] = std::move(t4);
    return out;
}

// ---------------------------------------------------------------------------
// inl

CommandOutput cmd_inl(const RunContext& ctx, InlMode mode) {
    const MacroConfig& cfg = ctx.config;
    const bool tcm = mode != InlMode::CMF;
    const bool cmf = mode != InlMode::TCM;
    std::optional<InlReport> rt, rc;
    if (tcm) rt = compute_inl(transfer_curve(cfg, MirrorMode::TCM));
    if (cmf) rc = compute_inl(transfer_curve(cfg, MirrorMode::CMF));

    std::string csv = "code";
    if (tcm) csv += ",tcm_v_over_va,tcm_inl_lsb";
    if (cmf) csv += ",cmf_v_over_va,cmf_inl_lsb";
    csv += "\n";
    const std::size_t n = (rt ? rt->curve : rc->curve).size();
    for (std::size_t i = 0; i < n; ++i) {
        csv += std::to_string(i);
        if (rt) csv += "," + num(rt->curve[i].value) + "," + num(rt->inl[i]);
        if (rc) csv += "," + num(rc->curve[i].value) + "," + num(rc->inl[i]);
        csv += "\n";
    }

    Json result;
    auto block = [&](const InlReport& r, MirrorMode m) {
        const auto q = quantized_sweep(cfg, m);
        return Json{{"max_abs_inl_lsb", r.max_abs_inl},
                    {"inl_lsb", r.inl},
                    {"quantized", {{"max_abs_inl_lsb", q.inl.max_abs_inl}, {"max_abs_error_lsb", q.max_abs_error}}}};
    };
    if (rt) result["tcm"] = block(*rt, MirrorMode::TCM);
    if (rc) result["cmf"] = block(*rc, MirrorMode::CMF);
    if (rt && rc) {
        const double reduction = 100.0 * (1.0 - rc->max_abs_inl / rt->max_abs_inl);
        result["reduction_pct"] = reduction;
        result["summary"] = "max INL " + num(rt->max_abs_inl) + " LSB (TCM) -> " + num(rc->max_abs_inl) +
                            " LSB (CMF), reduction " + num(reduction) + "%";
    }
    result["label"] = ctx.calibration_source.empty() ? "uncalibrated" : "calibration-anchored";
    result["files"] = {"fig8_inl.csv"};
    CommandOutput out = wrap(ctx, "inl", std::move(result));
    out.files["fig8_inl.csv"] = std::move(csv);
    return out;
}

// ---------------------------------------------------------------------------
// energy

CommandOutput cmd_energy(const RunContext& ctx, int rows) {
    if (rows < 1 || rows > kMaxRowsPerBca) throw ConfigError("rows: must be in 1..64");
    const MacroConfig& cfg = ctx.config;
    const EfficiencyPoint p = tops_per_watt(rows, cfg);

    std::vector<int> sweep{1, 2, 4, 8, 16, 32, 64};
    if (std::find(sweep.begin(), sweep.end(), rows) == sweep.end()) {
        sweep.push_back(rows);
        std::sort(sweep.begin(), sweep.end());
    }
    std::string csv = "rows_on,tops_per_watt,baseline_tops_per_watt,efficiency_ratio,delay_ps,baseline_delay_ps,"
                      "delay_ratio,total_fj,latch_frac,cmf_frac,adc_frac,array_frac,input_frac,other_frac\n";
    for (int m : sweep) {
        const EfficiencyPoint e = tops_per_watt(m, cfg);
        const auto f = e.ledger.fractions();
        csv += std::to_string(m) + "," + num(e.tops_per_watt) + "," + num(e.baseline_tops_per_watt) + "," +
               num(e.efficiency_ratio) + "," + num(e.delay_s * 1e12) + "," + num(e.baseline_delay_s * 1e12) + "," +
               num(e.delay_ratio) + "," + num(e.ledger.energy.total() * 1e15) + "," + num(f.latch_j) + "," +
               num(f.cmf_j) + "," + num(f.adc_j) + "," + num(f.array_j) + "," + num(f.input_j) + "," +
               num(f.other_j) + "\n";
    }

    Json result;
    result["label"] = "calibration-anchored";
    result["note"] = "efficiency figures reproduce fitted anchor values; they are not independent predictions";
    result["rows_on"] = rows;
    result["tops_per_watt"] = p.tops_per_watt;
    result["baseline_tops_per_watt"] = p.baseline_tops_per_watt;
    result["efficiency_ratio"] = p.efficiency_ratio;
    result["delay_ps"] = p.delay_s * 1e12;
    result["baseline_delay_ps"] = p.baseline_delay_s * 1e12;
    result["delay_ratio"] = p.delay_ratio;
    result["column"] = ledger_json(p.ledger);
    result["breakdown_4_rows"] = ledger_json(tops_per_watt(4, cfg).ledger);
    const PipelineTiming t = pipeline_timing(cfg);
    result["timing_ps"] = {{"t_cen", t.t_cen_s * 1e12},
                           {"t_adc", t.t_adc_s * 1e12},
                           {"column_delay", column_delay(t) * 1e12},
                           {"average_delay_pipelined",
                            average_delay(t, cfg.engine.pipeline_columns) * 1e12}};
    result["files"] = {"fig9_energy.csv"};
    CommandOutput out = wrap(ctx, "energy", std::move(result));
    out.files["fig9_energy.csv"] = std::move(csv);
    return out;
}

// ---------------------------------------------------------------------------
// adc-test

CommandOutput cmd_adc_test(const RunContext& ctx, int grid) {
    if (grid < 1) throw ConfigError("grid: must be >= 1");
    const SarAdcParams p = ctx.config.adc_params();
    const double lsb = p.lsb();
    const double units = p.total_units();

    std::string csv = "v_in_mv,code,oracle,boundary,match,telescoping\n";
    int agree = 0;
    int boundary_points = 0;
    int non_boundary = 0;
    int telescoping_ok = 0;
    for (int i = 0; i < grid; ++i) {
        const double v = p.v_ref * i / grid;
        const double q = v / lsb;
        const bool boundary = std::abs(q - std::round(q)) < 1e-6;
        const auto oracle = static_cast<unsigned>(std::min<double>(std::floor(q + 1e-6), p.max_code()));
        const AdcResult r = convert(v, p, 0);

        // Every phase equals V_COM - V_IN plus the kept levels and the trial capacitor.
        bool tele = true;
        double kept = 0.0;
        for (int k = 0; k < p.bits; ++k) {
            const double w = p.cap_weights[static_cast<std::size_t>(k)];
            const double expect = p.v_com - v + (kept + w) / units * p.v_ref;
            if (std::abs(r.vp_history[static_cast<std::size_t>(k) + 1] - expect) > 1e-12) tele = false;
            if ((r.code >> (p.bits - 1 - k)) & 1U) kept += w;
        }
        const bool match = r.code == oracle;
        if (boundary) {
            ++boundary_points;
        } else {
            ++non_boundary;
            if (match) ++agree;
        }
        if (tele) ++telescoping_ok;
        csv += num(v * 1e3) + "," + std::to_string(r.code) + "," + std::to_string(oracle) + "," +
               (boundary ? "1" : "0") + "," + (match ? "1" : "0") + "," + (tele ? "1" : "0") + "\n";
    }

    Json result;
    result["grid"] = grid;
    result["v_ref_mv"] = p.v_ref * 1e3;
    result["non_boundary_points"] = non_boundary;
    result["boundary_points"] = boundary_points;
    result["oracle_agreements"] = agree;
    result["telescoping_ok"] = telescoping_ok;
    result["summary"] = std::to_string(agree) + "/" + std::to_string(non_boundary) + " oracle agreements";
    result["files"] = {"adc_test.csv"};
    CommandOutput out = wrap(ctx, "adc-test", std::move(result));
    out.files["adc_test.csv"] = std::move(csv);
    return out;
}

// ---------------------------------------------------------------------------
// calibrate

CommandOutput cmd_calibrate(const RunContext& ctx) {
    const CalibrationTargets targets = CalibrationTargets::published();
    const CalibrationResult cal = calibrate(targets, ctx.config);
    const Json doc = cal.to_json(targets);

    MacroConfig fitted = ctx.config;
    cal.apply(fitted);
    const double tcm = max_inl(fitted, MirrorMode::TCM);
    const double cmf = max_inl(fitted, MirrorMode::CMF);
    const EfficiencyPoint e = tops_per_watt(targets.efficiency_rows, fitted);

    Json result;
    result["constants"] = doc.at("constants");
    result["residuals"] = doc.at("residuals");
    result["check"] = {{"inl_tcm_lsb", tcm},
                       {"inl_cmf_lsb", cmf},
                       {"inl_reduction_pct", 100.0 * (1.0 - cmf / tcm)},
                       {"tops_per_watt", e.tops_per_watt},
                       {"efficiency_ratio", e.efficiency_ratio},
                       {"delay_ratio", e.delay_ratio}};
    result["label"] = "calibration-anchored";
    result["files"] = {"calibration.json"};
    CommandOutput out = wrap(ctx, "calibrate", std::move(result));
    out.files["calibration.json"] = doc.dump(2) + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// compare-conventional

CommandOutput cmd_compare_conventional(const RunContext& ctx, const std::vector<double>& tmr, int rows) {
    const std::vector<double> t = or_default(tmr, {0.5, 1.0, 1.5, 2.0, 2.5});
    const auto cmp = compare_conventional(t, ctx.config, rows);

    std::string csv = "tmr,cell,weight_ones,ideal,w_sweep,x_sweep\n";
    Json jr = Json::array();
    for (const auto& c : cmp) {
        for (const auto* side : {&c.conventional, &c.proposed}) {
            const char* name = side == &c.conventional ? "conventional" : "proposed";
            for (std::size_t j = 0; j < side->ideal.size(); ++j) {
                csv += num(c.tmr) + "," + name + "," + std::to_string(j) + "," + num(side->ideal[j]) + "," +
                       num(side->w_sweep[j]) + "," + num(side->x_sweep[j]) + "\n";
            }
        }
        jr.push_back({{"tmr", c.tmr},
                      {"conventional_mismatch_lsb", c.conventional.mismatch_lsb},
                      {"proposed_mismatch_lsb", c.proposed.mismatch_lsb},
                      {"mismatch_factor", c.mismatch_factor}});
    }
    Json result;
    result["rows"] = rows;
    result["points"] = jr;
    result["files"] = {"fig8e_compare.csv"};
    CommandOutput out = wrap(ctx, "compare-conventional", std::move(result));
    out.files["fig8e_compare.csv"] = std::move(csv);
    return out;
}

}  // namespace mramsim
