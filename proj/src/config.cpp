#include "mramsim/config.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace mramsim {

namespace {

/// Reads one JSON object section, remembering which keys were consumed so
/// leftovers can be reported.
class SectionReader {
public:
    SectionReader(const Json& j, std::string name) : j_(j), name_(std::move(name)) {
        if (!j_.is_object()) throw ConfigError(name_ + ": expected an object");
    }

    void num(const char* key, double& out) {
        if (const Json* v = take(key)) {
            if (!v->is_number()) throw ConfigError(where(key) + ": expected a number");
            out = v->get<double>();
        }
    }
    void integer(const char* key, int& out) {
        if (const Json* v = take(key)) {
            if (!v->is_number_integer()) throw ConfigError(where(key) + ": expected an integer");
            out = v->get<int>();
        }
    }
    void boolean(const char* key, bool& out) {
        if (const Json* v = take(key)) {
            if (!v->is_boolean()) throw ConfigError(where(key) + ": expected true/false");
            out = v->get<bool>();
        }
    }
    void text(const char* key, std::string& out) {
        if (const Json* v = take(key)) {
            if (!v->is_string()) throw ConfigError(where(key) + ": expected a string");
            out = v->get<std::string>();
        }
    }
    void optional_num(const char* key, std::optional<double>& out) {
        if (const Json* v = take(key)) {
            if (v->is_null()) {
                out.reset();
            } else if (v->is_number()) {
                out = v->get<double>();
            } else {
                throw ConfigError(where(key) + ": expected a number or null");
            }
        }
    }
    void int_list(const char* key, std::vector<int>& out) {
        if (const Json* v = take(key)) {
            if (!v->is_array()) throw ConfigError(where(key) + ": expected a list of integers");
            out.clear();
            for (const auto& e : *v) {
                if (!e.is_number_integer()) throw ConfigError(where(key) + ": expected a list of integers");
                out.push_back(e.get<int>());
            }
        }
    }
    const Json* take(const char* key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }
    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) throw ConfigError("unknown key '" + where(it.key().c_str()) + "'");
        }
    }

private:
    [[nodiscard]] std::string where(const char* key) const { return name_.empty() ? key : name_ + "." + key; }

    const Json& j_;
    std::string name_;
    std::set<std::string> seen_;
};

void read_device(const Json& j, DeviceConfig& d) {
    SectionReader r(j, "device");
    r.num("r_p_nominal_ohm", d.r_p_nominal_ohm);
    r.num("tmr0", d.tmr0);
    r.num("sigma_r", d.sigma_r);
    r.text("area_note", d.area_note);
    r.text("t_ox_note", d.t_ox_note);
    r.num("r_on_ohm", d.r_on_ohm);
    r.num("r_off_ohm", d.r_off_ohm);
    if (const Json* preset = r.take("m_tmr_preset")) {
        if (!preset->is_number()) throw ConfigError("device.m_tmr_preset: expected 7500 or 15000");
        const double m = preset->get<double>();
        if (m != 7500.0 && m != 15000.0) throw ConfigError("device.m_tmr_preset: expected 7500 or 15000");
        d.r_off_ohm = d.r_on_ohm * (1.0 + m);
    }
    r.finish();
}

void read_latch(const Json& j, LatchConfig& l) {
    SectionReader r(j, "latch");
    r.num("r_ref_ohm", l.r_ref_ohm);
    r.num("v_l_mv", l.v_l_mv);
    r.num("gain_k", l.gain_k);
    r.num("sigma_offset", l.sigma_offset);
    r.num("hold_time_ns", l.hold_time_ns);
    r.num("energy_c0", l.energy_c0);
    r.finish();
}

void read_array(const Json& j, ArrayConfig& a) {
    SectionReader r(j, "array");
    r.num("v_cl_mv", a.v_cl_mv);
    r.num("t_cp_ps", a.t_cp_ps);
    r.finish();
}

void read_integrator(const Json& j, IntegratorConfig& m) {
    SectionReader r(j, "integrator");
    r.num("gamma", m.gamma);
    r.optional_num("c1_ff", m.c1_ff);
    r.num("t_h_ps", m.t_h_ps);
    r.num("v_max_mv", m.v_max_mv);
    r.num("droop_lambda_per_v", m.droop_lambda_per_v);
    r.num("feedback_factor", m.feedback_factor);
    r.num("v_bias_swing_mv", m.v_bias_swing_mv);
    r.integer("steps_per_quantum", m.steps_per_quantum);
    r.finish();
}

void read_adc(const Json& j, AdcConfig& a) {
    SectionReader r(j, "adc");
    r.integer("bits", a.bits);
    r.optional_num("v_ref_mv", a.v_ref_mv);
    r.num("v_com_mv", a.v_com_mv);
    r.int_list("cap_weights", a.cap_weights);
    r.num("comparator_offset_sigma_mv", a.comparator_offset_sigma_mv);
    r.finish();
}

void read_engine(const Json& j, EngineConfig& e) {
    SectionReader r(j, "engine");
    r.num("t_latch_ps", e.t_latch_ps);
    r.num("t_adc_ps", e.t_adc_ps);
    r.integer("pipeline_columns", e.pipeline_columns);
    r.boolean("pipelined", e.pipelined);
    r.num("cmf_bias_fj", e.cmf_bias_fj);
    r.num("cmf_full_scale_fj", e.cmf_full_scale_fj);
    r.num("adc_fj", e.adc_fj);
    r.num("array_per_row_fj", e.array_per_row_fj);
    r.num("input_per_pulse_fj", e.input_per_pulse_fj);
    r.optional_num("other_fj", e.other_fj);
    r.optional_num("baseline_energy_per_row_fj", e.baseline_energy_per_row_fj);
    r.optional_num("baseline_delay_per_row_ps", e.baseline_delay_per_row_ps);
    r.num("baseline_delay_fixed_ps", e.baseline_delay_fixed_ps);
    r.finish();
}

void read_analysis(const Json& j, AnalysisConfig& a) {
    SectionReader r(j, "analysis");
    r.integer("trials", a.trials);
    r.integer("threads", a.threads);
    r.finish();
}

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

MacroConfig MacroConfig::ideal() {
    MacroConfig c;
    c.device.sigma_r = 0.0;
    c.latch.sigma_offset = 0.0;
    c.latch.gain_k = 1000.0;
    c.integrator.droop_lambda_per_v = 0.0;
    c.adc.comparator_offset_sigma_mv = 0.0;
    return c;
}

MtjParams MacroConfig::mtj_params() const {
    MtjParams p;
    p.r_p_nominal_ohm = device.r_p_nominal_ohm;
    p.tmr0 = device.tmr0;
    p.sigma_r = device.sigma_r;
    p.area_note = device.area_note;
    p.t_ox_note = device.t_ox_note;
    return p;
}

SwitchParams MacroConfig::switch_params() const { return SwitchParams{device.r_on_ohm, device.r_off_ohm}; }

LatchParams MacroConfig::latch_params() const {
    LatchParams p;
    p.r_ref_ohm = latch.r_ref_ohm;
    p.v_l = latch.v_l_mv / 1e3;
    p.v_dd = v_dd();
    p.gain_k = latch.gain_k;
    p.sigma_offset = latch.sigma_offset;
    p.hold_time_s = latch.hold_time_ns / 1e9;
    p.energy.c0 = latch.energy_c0;
    p.energy.r_p_ohm = device.r_p_nominal_ohm;
    p.energy.r_series_ohm = device.r_on_ohm;
    return p;
}

double MacroConfig::i_a() const { return unit_row_current(array.v_cl_mv / 1e3, switch_params()); }

MirrorParams MacroConfig::mirror_params() const {
    MirrorParams p;
    p.gamma = integrator.gamma;
    p.t_h_s = integrator.t_h_ps / 1e12;
    p.v_dd = v_dd();
    p.v_max = integrator.v_max_mv / 1e3;
    p.droop_lambda = integrator.droop_lambda_per_v;
    p.feedback_factor = integrator.feedback_factor;
    p.v_bias_swing = integrator.v_bias_swing_mv / 1e3;
    p.steps_per_quantum = integrator.steps_per_quantum;
    if (integrator.c1_ff) {
        p.c1_f = *integrator.c1_ff / 1e15;
    } else {
        p.c1_f = p.gamma * i_a() * p.t_h_s / (p.v_max / 15.0);
    }
    return p;
}

double MacroConfig::unit_voltage() const { return mirror_params().unit_voltage(i_a()); }

SarAdcParams MacroConfig::adc_params() const {
    SarAdcParams p;
    p.bits = adc.bits;
    p.v_ref = adc.v_ref_mv ? *adc.v_ref_mv / 1e3 : (integrator.v_max_mv / 1e3) * 16.0 / 15.0;
    p.v_com = adc.v_com_mv / 1e3;
    p.cap_weights = adc.cap_weights;
    p.comparator_offset_sigma = adc.comparator_offset_sigma_mv / 1e3;
    return p;
}

void MacroConfig::validate() const {
    try {
        if (!(v_dd_mv > 0.0)) throw std::domain_error("v_dd_mv must be > 0");
        mtj_params().validate();
        switch_params().validate();
        latch_params().validate();
        if (!(array.v_cl_mv > 0.0)) throw std::domain_error("array.v_cl_mv must be > 0");
        if (!(array.t_cp_ps > 0.0)) throw std::domain_error("array.t_cp_ps must be > 0");
        mirror_params().validate();
        adc_params().validate();
        if (!(engine.t_latch_ps > 0.0) || !(engine.t_adc_ps > 0.0)) {
            throw std::domain_error("engine timing must be > 0");
        }
        if (engine.pipeline_columns < 1) throw std::domain_error("engine.pipeline_columns must be >= 1");
        for (double e : {engine.cmf_bias_fj, engine.cmf_full_scale_fj, engine.adc_fj, engine.array_per_row_fj,
                         engine.input_per_pulse_fj, engine.baseline_delay_fixed_ps}) {
            if (!(e >= 0.0)) throw std::domain_error("engine energy/delay constants must be >= 0");
        }
        if (analysis.trials < 100) throw std::domain_error("analysis.trials must be >= 100");
        if (analysis.threads < 1) throw std::domain_error("analysis.threads must be >= 1");
    } catch (const std::domain_error& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
}

Json to_json(const MacroConfig& c) {
    Json j;
    j["seed"] = c.seed;
    j["calibration_file"] = c.calibration_file;
    j["v_dd_mv"] = c.v_dd_mv;
    j["device"] = {{"r_p_nominal_ohm", c.device.r_p_nominal_ohm}, {"tmr0", c.device.tmr0},
                   {"sigma_r", c.device.sigma_r},                 {"area_note", c.device.area_note},
                   {"t_ox_note", c.device.t_ox_note},             {"r_on_ohm", c.device.r_on_ohm},
                   {"r_off_ohm", c.device.r_off_ohm}};
    j["latch"] = {{"r_ref_ohm", c.latch.r_ref_ohm},       {"v_l_mv", c.latch.v_l_mv},
                  {"gain_k", c.latch.gain_k},             {"sigma_offset", c.latch.sigma_offset},
                  {"hold_time_ns", c.latch.hold_time_ns}, {"energy_c0", c.latch.energy_c0}};
    j["array"] = {{"v_cl_mv", c.array.v_cl_mv}, {"t_cp_ps", c.array.t_cp_ps}};
    j["integrator"] = {{"gamma", c.integrator.gamma},
                       {"c1_ff", opt(c.integrator.c1_ff)},
                       {"t_h_ps", c.integrator.t_h_ps},
                       {"v_max_mv", c.integrator.v_max_mv},
                       {"droop_lambda_per_v", c.integrator.droop_lambda_per_v},
                       {"feedback_factor", c.integrator.feedback_factor},
                       {"v_bias_swing_mv", c.integrator.v_bias_swing_mv},
                       {"steps_per_quantum", c.integrator.steps_per_quantum}};
    j["adc"] = {{"bits", c.adc.bits},
                {"v_ref_mv", opt(c.adc.v_ref_mv)},
                {"v_com_mv", c.adc.v_com_mv},
                {"cap_weights", c.adc.cap_weights},
                {"comparator_offset_sigma_mv", c.adc.comparator_offset_sigma_mv}};
    j["engine"] = {{"t_latch_ps", c.engine.t_latch_ps},
                   {"t_adc_ps", c.engine.t_adc_ps},
                   {"pipeline_columns", c.engine.pipeline_columns},
                   {"pipelined", c.engine.pipelined},
                   {"cmf_bias_fj", c.engine.cmf_bias_fj},
                   {"cmf_full_scale_fj", c.engine.cmf_full_scale_fj},
                   {"adc_fj", c.engine.adc_fj},
                   {"array_per_row_fj", c.engine.array_per_row_fj},
                   {"input_per_pulse_fj", c.engine.input_per_pulse_fj},
                   {"other_fj", opt(c.engine.other_fj)},
                   {"baseline_energy_per_row_fj", opt(c.engine.baseline_energy_per_row_fj)},
                   {"baseline_delay_per_row_ps", opt(c.engine.baseline_delay_per_row_ps)},
                   {"baseline_delay_fixed_ps", c.engine.baseline_delay_fixed_ps}};
    j["analysis"] = {{"trials", c.analysis.trials}, {"threads", c.analysis.threads}};
    return j;
}

MacroConfig config_from_json(const Json& j) {
    MacroConfig c;
    SectionReader r(j, "");
    if (const Json* v = r.take("seed")) {
        if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0)) {
            throw ConfigError("seed: expected a non-negative integer");
        }
        c.seed = v->get<std::uint64_t>();
    }
    r.text("calibration_file", c.calibration_file);
    r.num("v_dd_mv", c.v_dd_mv);
    if (const Json* v = r.take("device")) read_device(*v, c.device);
    if (const Json* v = r.take("latch")) read_latch(*v, c.latch);
    if (const Json* v = r.take("array")) read_array(*v, c.array);
    if (const Json* v = r.take("integrator")) read_integrator(*v, c.integrator);
    if (const Json* v = r.take("adc")) read_adc(*v, c.adc);
    if (const Json* v = r.take("engine")) read_engine(*v, c.engine);
    if (const Json* v = r.take("analysis")) read_analysis(*v, c.analysis);
    r.finish();
    c.validate();
    return c;
}

void apply_calibration(MacroConfig& cfg, const Json& cal) {
    if (!cal.is_object() || !cal.contains("constants")) {
        throw ConfigError("calibration file: missing 'constants' object");
    }
    const Json& k = cal.at("constants");
    SectionReader r(k, "constants");
    if (const Json* v = r.take("device")) {
        SectionReader s(*v, "constants.device");
        s.num("sigma_r", cfg.device.sigma_r);
        s.finish();
    }
    if (const Json* v = r.take("latch")) {
        SectionReader s(*v, "constants.latch");
        s.num("gain_k", cfg.latch.gain_k);
        s.num("sigma_offset", cfg.latch.sigma_offset);
        s.num("energy_c0", cfg.latch.energy_c0);
        s.finish();
    }
    if (const Json* v = r.take("integrator")) {
        SectionReader s(*v, "constants.integrator");
        s.num("droop_lambda_per_v", cfg.integrator.droop_lambda_per_v);
        s.num("feedback_factor", cfg.integrator.feedback_factor);
        s.finish();
    }
    if (const Json* v = r.take("engine")) {
        SectionReader s(*v, "constants.engine");
        s.optional_num("other_fj", cfg.engine.other_fj);
        s.optional_num("baseline_energy_per_row_fj", cfg.engine.baseline_energy_per_row_fj);
        s.optional_num("baseline_delay_per_row_ps", cfg.engine.baseline_delay_per_row_ps);
        s.finish();
    }
    r.finish();
    cfg.validate();
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("'" + path + "': " + e.what());
    }
}

LoadedConfig resolve_config(MacroConfig cfg, const std::string& base_dir) {
    LoadedConfig out;
    if (!cfg.calibration_file.empty()) {
        std::filesystem::path p(cfg.calibration_file);
        if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
        const Json cal = read_json_file(p.string());
        apply_calibration(cfg, cal);
        out.calibration_source = cfg.calibration_file;
        if (cal.contains("residuals")) out.calibration_residuals = cal.at("residuals");
        cfg.calibration_file.clear();
    }
    out.config = std::move(cfg);
    return out;
}

LoadedConfig load_config(const std::string& path) {
    if (path.empty()) return resolve_config(MacroConfig::defaults(), "");
    const MacroConfig cfg = config_from_json(read_json_file(path));
    return resolve_config(cfg, std::filesystem::path(path).parent_path().string());
}

}  // namespace mramsim
